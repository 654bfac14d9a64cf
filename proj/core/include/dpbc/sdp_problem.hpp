#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpbc/sos_program.hpp"

namespace dpbc {

/// Entry of a symmetric matrix, stored once with i <= j. As in SDPA, an
/// off-diagonal entry a stands for a at both (i, j) and (j, i).
struct SymEntry {
  int row = 0;  // equality row (unused for objective entries)
  int i = 0;
  int j = 0;
  double value = 0.0;
  friend bool operator==(const SymEntry&, const SymEntry&) = default;
};

struct FreeEntry {
  int row = 0;
  int col = 0;
  double value = 0.0;
  friend bool operator==(const FreeEntry&, const FreeEntry&) = default;
};

/// minimize   sum_b <C_b, X_b> + c^T u + objective_constant
/// subject to sum_b <A_{r,b}, X_b> + (B u)_r = b_r   for every row r
///            X_b PSD, u free.
/// Maximisation problems are stored negated with sense = Maximize; the
/// reported objective then flips back.
struct SdpProblem {
  std::vector<int> block_sizes;
  std::vector<std::string> block_labels;
  int num_free = 0;
  std::vector<std::string> free_labels;
  int num_rows = 0;
  std::vector<double> rhs;
  std::vector<std::vector<SymEntry>> constraint_entries;  // per block
  std::vector<FreeEntry> free_entries;
  std::vector<std::vector<SymEntry>> objective_entries;  // per block
  std::vector<double> free_objective;
  double objective_constant = 0.0;
  Sense sense = Sense::Minimize;

  int num_blocks() const { return static_cast<int>(block_sizes.size()); }
  /// Structural equality of the numerical data (labels and entry order ignored).
  bool same_data(const SdpProblem& o) const;
  /// Throws InvalidInputError on out-of-range indices or size mismatches.
  void validate() const;
};

/// Where each part of an SosProgram lives in the compiled problem.
struct SosLayout {
  std::vector<int> constraint_block;  // per SosConstraint
  std::vector<int> multiplier_block;  // per SosMultiplier
  std::vector<int> inequality_block;  // per ScalarInequality (1x1 slack)
  /// Row ranges per constraint and the monomial of each row.
  std::vector<std::vector<Monomial>> constraint_rows;
  std::vector<int> constraint_first_row;
};

struct CompiledSos {
  SdpProblem sdp;
  SosLayout layout;
};

/// Gram-matrix reduction: each SOS expression gets a PSD block over its Gram
/// basis and one equality row per monomial of the expression or of the
/// basis products; each multiplier gets its own PSD block; each scalar
/// inequality becomes a 1x1 slack block.
CompiledSos compile(const SosProgram& program);

/// Coefficients of sum_b <A_b, X_b> + B u for every row (testing and
/// residual checks).
Eigen::VectorXd apply_constraints(const SdpProblem& p, const std::vector<Eigen::MatrixXd>& X,
                                  const Eigen::VectorXd& u);

/// Multiplier polynomial m^T Q m for a Gram matrix.
Polynomial gram_polynomial(const VarSpace& space, const std::vector<Monomial>& basis,
                           const Eigen::MatrixXd& Q);

}  // namespace dpbc
