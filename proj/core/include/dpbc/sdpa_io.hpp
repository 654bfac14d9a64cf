#pragma once

#include <iosfwd>
#include <string>

#include "dpbc/sdp_problem.hpp"

namespace dpbc {

/// Sparse SDPA (.dat-s) export. Rows map to SDPA constraint matrices with
/// c_r = b_r and F0 = -C, so SDPA's "max <F0, Y>" equals minus our minimum.
/// Free variables are split u = u+ - u- into a trailing diagonal block.
/// Comment lines carry the split size, objective constant and sense so that
/// read_sdpa reproduces the problem exactly (values are written with 17
/// significant digits).
void write_sdpa(const SdpProblem& p, std::ostream& out);
void write_sdpa(const SdpProblem& p, const std::string& path);

/// Reads sparse SDPA. Files from other tools (no free-split comment) are
/// accepted; diagonal blocks become dense blocks with diagonal data.
SdpProblem read_sdpa(std::istream& in);
SdpProblem read_sdpa_file(const std::string& path);

}  // namespace dpbc
