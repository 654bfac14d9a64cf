#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dpbc/certificates.hpp"
#include "dpbc/sdp_solver.hpp"
#include "dpbc/sos_program.hpp"

namespace dpbc {

struct SynthesisOptions {
  SosDegrees degrees;
  IpmSettings ipm;
  SamplingConfig check;
  const SdpBackend* backend = nullptr;  // defaults to InteriorPointSolver(ipm)
  bool run_check = true;
};

/// Reconstruction residual of one SOS identity: expression(u) - m^T Q m.
struct SosResidual {
  std::string label;
  double coefficient_norm = 0.0;   // Euclidean norm of the residual's coefficients
  double min_gram_eigenvalue = 0.0;
};

struct SynthesisResult {
  CertificateKind kind = CertificateKind::DSBC;
  double alpha = 1.0;
  int v_degree = 0;
  SdpStatus status = SdpStatus::NotSolved;
  std::optional<BarrierCertificate> certificate;  // absent unless the solve returned a point
  double beta = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double objective = 0.0;  // delta alpha^-T + (sum alpha^-i) beta
  std::optional<BoundReport> bound;
  // solver diagnostics
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  std::string solver_message;
  // post-validation
  std::optional<CheckReport> check;
  std::vector<SosResidual> residuals;
  double max_residual = 0.0;
  double min_gram_eigenvalue = 0.0;
  bool valid = false;

  /// Probability bound (clamped) when a certificate exists.
  std::optional<double> bound_value() const {
    return bound ? std::optional<double>(bound->clamped) : std::nullopt;
  }
};

inline constexpr double kValidMarginTolerance = 1e-6;
inline constexpr double kValidEigenvalueTolerance = 1e-8;
inline constexpr double kValidResidualTolerance = 1e-6;

/// Build -> compile -> solve -> extract (v, beta, delta) -> sampling check,
/// Gram eigenvalues and reconstruction residuals -> bound.
SynthesisResult synthesize(const SystemModel& model, CertificateKind kind, double alpha,
                           const SynthesisOptions& options = {});

struct SweepRow {
  double alpha = 1.0;
  bool applicable = true;  // false when alpha is outside the kind's domain
  std::optional<SynthesisResult> result;
  std::string error;  // failure message when synthesis threw
};

struct SweepTable {
  CertificateKind kind = CertificateKind::DSBC;
  std::vector<SweepRow> rows;
  /// Row with the best VALID bound (smallest for safety, largest for RABC).
  std::optional<int> best_index;
};

/// One synthesis per alpha, solved concurrently; per-row failures are recorded.
SweepTable alpha_sweep(const SystemModel& model, CertificateKind kind, const std::vector<double>& alphas,
                       const SynthesisOptions& options = {});

}  // namespace dpbc
