#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dpbc/system_model.hpp"

namespace dpbc {

struct GridAxis {
  double lower = -1.0;
  double upper = 1.0;
  int nodes = 2;

  double spacing() const { return (upper - lower) / (nodes - 1); }
  double node(int i) const { return i == nodes - 1 ? upper : lower + i * spacing(); }
};

/// Tensor grid over the state space plus the noise quadrature settings.
struct GridSpec {
  std::vector<GridAxis> axes;
  int quadrature_nodes = 201;     // per noise dimension (per panel for 1-D noise)
  double normal_truncation = 8.0; // multiples of sigma

  static GridSpec over_box(const Box& box, int nodes_per_dim, int quadrature_nodes = 201);

  int dim() const { return static_cast<int>(axes.size()); }
  int total_nodes() const;
  void node(int flat, std::span<double> out) const;
  void validate() const;
};

/// Default grid for a model: the model's grid_box (or an estimate of S's
/// bounding box) with 2001 / 201 / 41 nodes per axis for n = 1 / 2 / 3.
GridSpec default_grid(const SystemModel& model);

/// Stage-t value function on the grid. Off-grid values are fixed: `exterior`
/// outside S and `target` on G (reach-avoid only).
struct ValueTable {
  GridSpec grid;
  std::vector<double> values;
  int stage = 0;
  double exterior = 1.0;
  double target = 1.0;
};

/// Discretised one-step operator: T for safety, T-hat for reach-avoid.
/// Precomputes, for each free node, the probability mass leaving S, the mass
/// entering G and the interpolation weights of landing points inside the grid.
class BellmanOperator {
 public:
  enum class NodeKind : unsigned char { Free, Exterior, Target };

  BellmanOperator(const SystemModel& model, const GridSpec& grid, Task task);

  Task task() const { return task_; }
  const GridSpec& grid() const { return grid_; }
  NodeKind node_kind(int i) const { return kind_[i]; }
  /// Terminal table v_T (1 outside S for safety, 1 on G for reach-avoid).
  ValueTable terminal(int horizon) const;
  /// Applies the operator to a stage-(t+1) table, producing stage t.
  ValueTable apply(const ValueTable& next, bool clamp = true) const;
  /// Largest |row mass - 1| seen while building (quadrature bookkeeping).
  double max_mass_error() const { return max_mass_error_; }

 private:
  Task task_;
  GridSpec grid_;
  std::vector<NodeKind> kind_;
  std::vector<double> exit_mass_;
  std::vector<double> target_mass_;
  std::vector<int> row_ptr_;
  std::vector<int> cols_;
  std::vector<double> vals_;
  double max_mass_error_ = 0.0;
};

ValueTable bellman_safety_step(const SystemModel& model, const GridSpec& grid,
                               const ValueTable& v_next);
ValueTable bellman_reach_avoid_step(const SystemModel& model, const GridSpec& grid,
                                    const ValueTable& v_next);

/// Multilinear interpolation of a table at x; throws ConfigError if x is
/// outside the grid hull.
double interpolate(const ValueTable& table, std::span<const double> x);

/// All stage tables of a DP run, tables[t] for t = 0..horizon.
class DpResult {
 public:
  DpResult(Task task, int horizon, std::vector<ValueTable> tables, SemialgebraicSet safe,
           std::optional<SemialgebraicSet> goal, double mass_error);

  Task task() const { return task_; }
  int horizon() const { return horizon_; }
  const ValueTable& stage(int t) const { return tables_.at(t); }
  double max_mass_error() const { return mass_error_; }

  /// v_t(x) for safety (violation probability over the remaining T - t steps)
  /// or v-hat_t(x) for reach-avoid. Points off S / in G are resolved exactly.
  double value_at(std::span<const double> x, int t = 0) const;

 private:
  Task task_;
  int horizon_;
  std::vector<ValueTable> tables_;
  SemialgebraicSet safe_;
  std::optional<SemialgebraicSet> goal_;
  double mass_error_;
};

DpResult solve_dp(const SystemModel& model, const GridSpec& grid, Task task,
                  std::optional<int> horizon = std::nullopt);

/// 1 - SA_{x0}(S).
double safety_unsafe_probability(const SystemModel& model, const GridSpec& grid,
                                 std::span<const double> x0);
/// RA_{x0}(G, S).
double reach_avoid_probability(const SystemModel& model, const GridSpec& grid,
                               std::span<const double> x0);

}  // namespace dpbc
