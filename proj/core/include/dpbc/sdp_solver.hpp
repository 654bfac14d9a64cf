#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpbc/sdp_problem.hpp"

namespace dpbc {

enum class SdpStatus { Optimal, Infeasible, Unbounded, NumericalFailure, NotSolved };
std::string to_string(SdpStatus s);

struct SdpSolution {
  SdpStatus status = SdpStatus::NotSolved;
  std::vector<Eigen::MatrixXd> X;  // primal blocks
  Eigen::VectorXd u;               // free variables
  Eigen::VectorXd y;               // equality multipliers
  std::vector<Eigen::MatrixXd> Z;  // dual slack blocks
  double objective = 0.0;          // in the problem's own sense, constant included
  double primal_objective = 0.0;   // of the stored minimisation
  double dual_objective = 0.0;
  double primal_residual = 0.0;    // ||b - A(X) - Bu|| / (1 + ||b||)
  double dual_residual = 0.0;
  double gap = 0.0;                // relative duality gap
  int iterations = 0;
  bool extended_precision = false;  // solved by the long double pass
  std::string message;
};

struct IpmSettings {
  double tolerance = 1e-8;
  double infeasibility_tolerance = 1e-8;
  int max_iterations = 100;
  /// Re-solve in long double when the double-precision run fails.
  bool extended_precision_fallback = true;
  bool verbose = false;
};

class SdpBackend {
 public:
  virtual ~SdpBackend() = default;
  virtual std::string name() const = 0;
  virtual SdpSolution solve(const SdpProblem& problem) const = 0;
};

/// Infeasible-start primal-dual interior point method (HKM direction,
/// Mehrotra predictor-corrector) on the standard-form problem obtained by
/// eliminating the free variables and dependent rows. Dense linear algebra;
/// single-threaded.
class InteriorPointSolver final : public SdpBackend {
 public:
  explicit InteriorPointSolver(IpmSettings settings = {}) : settings_(settings) {}
  std::string name() const override { return "ipm"; }
  SdpSolution solve(const SdpProblem& problem) const override;
  const IpmSettings& settings() const { return settings_; }

 private:
  IpmSettings settings_;
};

/// Writes the problem in SDPA sparse format and reports NotSolved; for
/// solving with an external tool.
class SdpaExportBackend final : public SdpBackend {
 public:
  explicit SdpaExportBackend(std::string path) : path_(std::move(path)) {}
  std::string name() const override { return "sdpa-export"; }
  SdpSolution solve(const SdpProblem& problem) const override;

 private:
  std::string path_;
};

std::unique_ptr<SdpBackend> make_backend(const std::string& name, const IpmSettings& settings = {},
                                         const std::string& export_path = "problem.dat-s");

}  // namespace dpbc
