#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpbc/dp_oracle.hpp"
#include "dpbc/polynomial.hpp"
#include "dpbc/sampling.hpp"
#include "dpbc/system_model.hpp"

namespace dpbc {

/// MSBC: martingale-based safety certificate (alpha >= 1).
/// SSBC: switched-system-based safety certificate (0 < alpha <= 1).
/// DSBC: dynamic-programming-based safety certificate (alpha > 0).
/// RABC: reach-avoid certificate (alpha > 0).
enum class CertificateKind { MSBC, SSBC, DSBC, RABC };

std::string to_string(CertificateKind k);
/// Case-insensitive ("dsbc", "DSBC", ...).
CertificateKind kind_from_string(const std::string& s);
inline bool is_safety_kind(CertificateKind k) { return k != CertificateKind::RABC; }
bool alpha_in_domain(CertificateKind k, double alpha);
/// Throws DomainError if alpha is outside the kind's parameter domain.
void check_alpha_domain(CertificateKind k, double alpha);

struct BarrierCertificate {
  CertificateKind kind = CertificateKind::DSBC;
  Polynomial v;
  double alpha = 1.0;
  double beta = 0.0;
  std::optional<double> delta;  // bound of v over X0 (upper for safety, lower for RABC)

  /// Validates the parameter domain.
  static BarrierCertificate make(CertificateKind kind, Polynomial v, double alpha, double beta,
                                 std::optional<double> delta = std::nullopt);
};

/// sum_{i=0}^{T-1} alpha^{-i}, by direct summation.
double geometric_sum(double alpha, int T);
inline double gamma_of(double alpha, double beta) { return alpha * beta - alpha + 1.0; }

enum class BoundBranch { GammaNegative, AlphaPower };

struct BoundReport {
  double gamma = 0.0;
  BoundBranch branch = BoundBranch::AlphaPower;
  double v_value = 0.0;  // v(x) or delta
  double raw = 0.0;      // formula value
  double clamped = 0.0;  // raw clamped into [0, 1]
};

/// Probability bound induced by the certificate for a given value of v
/// (v(x) for a point, or delta for the whole of X0). Upper bound on 1 - SA
/// for safety kinds, lower bound on RA for RABC.
BoundReport evaluate_bound(const BarrierCertificate& cert, int T, double v_value);
BoundReport evaluate_bound_at(const BarrierCertificate& cert, int T, std::span<const double> x);
/// Uses cert.delta; throws InvalidInputError when it is absent.
BoundReport evaluate_bound_over_x0(const BarrierCertificate& cert, int T);

/// Parameters (alpha', beta') with gamma' = 0 inducing the same bound as an
/// MSBC whose gamma < 0.
std::pair<double, double> msbc_normalize(double alpha, double beta);

/// Stage-t envelope alpha^{t-T} v + (sum_{i=0}^{T-t-1} alpha^{-i}) beta.
double eta(double v_value, double alpha, double beta, int t, int T);

struct SamplingConfig {
  std::optional<Box> box;           // for unbounded regions; falls back to model.check_box
  bool allow_default_box = true;    // [-5, 5]^n when neither is set
  int samples_per_region = 10000;
  std::uint64_t seed = 1;
};

struct ConditionResult {
  std::string id;           // "1", "2", "3", "4", "x0", "gamma"
  std::string description;
  std::string region;       // region of the worst margin
  double worst_margin = 0.0;
  std::vector<double> witness;
  int samples = 0;
};

struct CheckReport {
  CertificateKind kind = CertificateKind::DSBC;
  double gamma = 0.0;
  std::vector<ConditionResult> conditions;
  /// Extremes of v's top-degree form on unit directions; governs the sign of
  /// v far outside the sampling box.
  double tail_min = 0.0;
  double tail_max = 0.0;
  std::string tail_note;

  double worst_margin() const;
  bool passed(double tol = 1e-6) const { return worst_margin() >= -tol; }
  const ConditionResult* find(const std::string& id) const;
};

/// Sampling falsifier: evaluates each defining inequality of the
/// certificate's kind on deterministic low-discrepancy samples of the
/// relevant regions. The expectation term is exact (expect of compose).
CheckReport check_certificate(const BarrierCertificate& cert, const SystemModel& model,
                              const SamplingConfig& cfg = {});

struct EnvelopeViolation {
  int stage = 0;
  std::vector<double> x;
  double gap = 0.0;  // >= 0 means the envelope holds there
  long long points_checked = 0;
};

/// Checks v_t <= eta_t (safety) or v-hat_t >= eta_t (reach-avoid) at every
/// stage on the DP grid and on samples of the regions where v_t is fixed.
/// Returns the point of smallest gap.
EnvelopeViolation induction_envelope_check(const BarrierCertificate& cert, const SystemModel& model,
                                           const DpResult& dp, const SamplingConfig& cfg = {});

struct EtaExtremes {
  double eta0_min = 0.0, eta0_max = 0.0;
  double etaT_min = 0.0, etaT_max = 0.0;
  int samples = 0;

  double min_of_endpoints() const { return std::min(eta0_min, etaT_min); }
  double max_of_endpoints() const { return std::max(eta0_max, etaT_max); }
};

EtaExtremes eta_extremes(const BarrierCertificate& cert, const SystemModel& model, RegionName region,
                         int T, const SamplingConfig& cfg = {});

/// Region samples used by the checker (also includes model.initial_points for X0).
PointSet region_samples(const SystemModel& model, RegionName region, const SamplingConfig& cfg);

}  // namespace dpbc
