#pragma once

#include <string>

#include "dpbc/certificates.hpp"
#include "dpbc/system_model.hpp"

namespace dpbc {

/// JSON model files:
///   { "name": ..., "space": {"state_dim": n, "noise_dim": m},
///     "dynamics": [ [ {"exps": [...], "coef": c}, ... ], ... ],   // one per state
///     "noise": [ {"type": "uniform", "a": .., "b": ..} | {"type": "normal", "sigma": ..} ],
///     "horizon": T,
///     "regions": { "S": [poly, ...], "XminusS": [...], ... },
///     "initial_points": [[...]], "grid_box": {"lower": [...], "upper": [...]},
///     "check_box": {...} }
/// Exponent vectors have length n + m, or n for state-only terms.
/// Malformed input throws ConfigError naming the offending field.
SystemModel parse_model(const std::string& json_text);
SystemModel load_model(const std::string& path);
std::string model_to_json(const SystemModel& model);

/// { "kind": "DSBC", "alpha": .., "beta": .., "delta": .., "v": [ {"exps": [...], "coef": c}, ... ] }
BarrierCertificate parse_certificate(const std::string& json_text, const VarSpace& space);
BarrierCertificate load_certificate(const std::string& path, const VarSpace& space);
std::string certificate_to_json(const BarrierCertificate& cert);
void save_certificate(const BarrierCertificate& cert, const std::string& path);

/// x' = (w - 0.5) x, w ~ U[-1, 1], T = 50, S = [-1, 1], X0 = {-0.9}, G = [-0.6, 0.6].
SystemModel example1_model();
/// x' = x + w, w ~ N(0, 0.1^2), T = 20, S = [-1, 1], X0 = [-0.1, 0.1].
SystemModel example2_model();
/// "example1" / "example2" or a path to a JSON file.
SystemModel resolve_model(const std::string& name_or_path);

}  // namespace dpbc
