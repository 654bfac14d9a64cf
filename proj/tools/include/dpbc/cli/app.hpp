#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dpbc::cli {

enum ExitCode : int {
  kExitPass = 0,
  kExitCheckFailed = 1,
  kExitConfigError = 2,
  kExitNumericalError = 3,
};

/// Entry point of the `dpbc` tool: subcommands dp, mc, check, synthesize and
/// tables. Option precedence is flags > `--config` file (TOML/INI) > defaults.
/// Output goes to `out`, diagnostics to `err`; returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "0.99:1.01:0.002" (inclusive range), "0.99,1,1.01" or a single value.
/// Range points are rounded to 12 significant digits so that 0.99 + 5 * 0.002
/// prints as 1. Throws ConfigError on malformed input.
std::vector<double> parse_alpha_list(const std::string& spec);

}  // namespace dpbc::cli
