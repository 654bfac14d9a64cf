#include "dpbc/dp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "dpbc/error.hpp"
#include "dpbc/parallel.hpp"
#include "dpbc/quadrature.hpp"
#include "dpbc/sampling.hpp"

namespace dpbc {

GridSpec GridSpec::over_box(const Box& box, int nodes_per_dim, int quadrature_nodes) {
  GridSpec g;
  for (int d = 0; d < box.dim(); ++d) g.axes.push_back({box.lower[d], box.upper[d], nodes_per_dim});
  g.quadrature_nodes = quadrature_nodes;
  return g;
}

int GridSpec::total_nodes() const {
  long long n = 1;
  for (const auto& a : axes) n *= a.nodes;
  return static_cast<int>(n);
}

void GridSpec::node(int flat, std::span<double> out) const {
  for (int d = dim() - 1; d >= 0; --d) {
    const int i = flat % axes[d].nodes;
    flat /= axes[d].nodes;
    out[d] = axes[d].node(i);
  }
}

void GridSpec::validate() const {
  if (axes.empty()) throw ConfigError("grid has no axes");
  for (const auto& a : axes) {
    if (a.nodes < 2) throw ConfigError("grid needs at least 2 nodes per axis");
    if (!(a.lower < a.upper)) throw ConfigError("grid axis must satisfy lower < upper");
  }
  if (quadrature_nodes < 1) throw ConfigError("quadrature needs at least one node");
  if (!(normal_truncation > 0.0)) throw ConfigError("normal truncation must be positive");
}

GridSpec default_grid(const SystemModel& model) {
  const int n = model.space.state_dim;
  const int nodes = n == 1 ? 2001 : n == 2 ? 201 : 41;
  if (model.grid_box) return GridSpec::over_box(*model.grid_box, nodes);

  // Estimate S's bounding box from samples of the check box.
  const Box search = model.check_box.value_or(Box::cube(n, -5.0, 5.0));
  const PointSet pts = sample_region(model.region(RegionName::S), search, 100000, 3, 2000000);
  if (pts.empty()) throw ConfigError("cannot locate S inside the sampling box; set grid_box");
  Box b{std::vector<double>(n, 1e300), std::vector<double>(n, -1e300)};
  for (int i = 0; i < pts.size(); ++i) {
    for (int d = 0; d < n; ++d) {
      b.lower[d] = std::min(b.lower[d], pts[i][d]);
      b.upper[d] = std::max(b.upper[d], pts[i][d]);
    }
  }
  for (int d = 0; d < n; ++d) {
    const double pad = 0.01 * (b.upper[d] - b.lower[d]) + 1e-9;
    b.lower[d] -= pad;
    b.upper[d] += pad;
  }
  return GridSpec::over_box(b, nodes);
}

namespace {

struct Stencil {
  std::vector<std::pair<int, double>> entries;
};

// Multilinear weights of the 2^n corners around x. Returns false if x lies
// outside the grid hull by more than a rounding tolerance.
bool stencil_at(const GridSpec& g, std::span<const double> x, std::vector<std::pair<int, double>>& out) {
  const int n = g.dim();
  int base_idx[8];
  double frac[8];
  for (int d = 0; d < n; ++d) {
    const auto& a = g.axes[d];
    const double tol = 1e-9 * (a.upper - a.lower);
    if (x[d] < a.lower - tol || x[d] > a.upper + tol) return false;
    double t = (std::clamp(x[d], a.lower, a.upper) - a.lower) / a.spacing();
    int i0 = static_cast<int>(std::floor(t));
    i0 = std::clamp(i0, 0, a.nodes - 2);
    base_idx[d] = i0;
    frac[d] = std::clamp(t - i0, 0.0, 1.0);
  }
  out.clear();
  for (int corner = 0; corner < (1 << n); ++corner) {
    int flat = 0;
    double w = 1.0;
    for (int d = 0; d < n; ++d) {
      const int bit = (corner >> d) & 1;
      flat = flat * g.axes[d].nodes + base_idx[d] + bit;
      w *= bit ? frac[d] : 1.0 - frac[d];
    }
    if (w != 0.0) out.emplace_back(flat, w);
  }
  return true;
}

// Real sign changes of a univariate polynomial (coefficients low->high) on [lo, hi].
void sign_change_roots(const std::vector<double>& coef, double lo, double hi, std::vector<double>& out) {
  auto eval = [&](double w) {
    double s = 0.0;
    for (auto it = coef.rbegin(); it != coef.rend(); ++it) s = s * w + *it;
    return s;
  };
  constexpr int kSamples = 1024;
  double prev_w = lo, prev_v = eval(lo);
  for (int i = 1; i <= kSamples; ++i) {
    const double w = lo + (hi - lo) * i / kSamples;
    const double v = eval(w);
    if (v == 0.0) {
      out.push_back(w);
    } else if (prev_v != 0.0 && (prev_v < 0.0) != (v < 0.0)) {
      double a = prev_w, b = w, fa = prev_v;
      for (int it = 0; it < 80 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
        const double m = 0.5 * (a + b);
        const double fm = eval(m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      out.push_back(0.5 * (a + b));
    }
    prev_w = w;
    prev_v = v;
  }
}

}  // namespace

BellmanOperator::BellmanOperator(const SystemModel& model, const GridSpec& grid, Task task)
    : task_(task), grid_(grid) {
  grid_.validate();
  const VarSpace& sp = model.space;
  if (grid_.dim() != sp.state_dim) throw ConfigError("grid dimension does not match the model");
  if (grid_.dim() > 8) throw ConfigError("grids support at most 8 state dimensions");

  const SemialgebraicSet& safe = model.region(RegionName::S);
  const SemialgebraicSet* goal = task == Task::ReachAvoid ? &model.region(RegionName::G) : nullptr;

  std::vector<CompiledPolynomial> dyn;
  for (const auto& f : model.dynamics) dyn.emplace_back(f);

  // Boundary polynomials composed with the dynamics: their sign changes in w
  // are the discontinuities of the integrand.
  std::vector<Polynomial> boundary;
  if (sp.noise_dim == 1) {
    for (const auto& p : safe.polys()) boundary.push_back(p.compose(model.dynamics));
    if (goal) {
      for (const auto& p : goal->polys()) boundary.push_back(p.compose(model.dynamics));
    }
  }

  // Fixed tensor rule for multi-dimensional noise.
  std::vector<std::vector<double>> tensor_nodes;
  std::vector<double> tensor_weights;
  if (sp.noise_dim == 0) {
    tensor_nodes.emplace_back();
    tensor_weights.push_back(1.0);
  } else if (sp.noise_dim >= 2) {
    std::vector<QuadratureRule> rules;
    for (const auto& c : model.noise.components()) {
      rules.push_back(noise_rule(c, grid_.quadrature_nodes, grid_.normal_truncation));
    }
    std::vector<int> idx(sp.noise_dim, 0);
    while (true) {
      std::vector<double> w(sp.noise_dim);
      double wt = 1.0;
      for (int j = 0; j < sp.noise_dim; ++j) {
        w[j] = rules[j].nodes[idx[j]];
        wt *= rules[j].weights[idx[j]];
      }
      tensor_nodes.push_back(std::move(w));
      tensor_weights.push_back(wt);
      int j = sp.noise_dim - 1;
      while (j >= 0 && ++idx[j] == rules[j].size()) idx[j--] = 0;
      if (j < 0) break;
    }
  }

  const int total = grid_.total_nodes();
  kind_.assign(total, NodeKind::Free);
  exit_mass_.assign(total, 0.0);
  target_mass_.assign(total, 0.0);
  std::vector<std::vector<std::pair<int, double>>> rows(total);
  std::vector<double> mass_error(total, 0.0);

  parallel_for(total, [&](int i) {
    const int n = sp.state_dim;
    std::vector<double> x(n), point(sp.size()), y(n);
    grid_.node(i, x);
    if (goal && goal->contains(x)) {
      kind_[i] = NodeKind::Target;
      return;
    }
    if (!safe.contains(x)) {
      kind_[i] = NodeKind::Exterior;
      return;
    }

    const std::vector<std::vector<double>>* nodes = &tensor_nodes;
    const std::vector<double>* weights = &tensor_weights;
    std::vector<std::vector<double>> local_nodes;
    std::vector<double> local_weights;
    if (sp.noise_dim == 1) {
      const auto& comp = model.noise[0];
      const auto [lo, hi] = noise_support(comp, grid_.normal_truncation);
      std::vector<double> breaks;
      for (const auto& b : boundary) {
        std::vector<double> coef(b.degree() + 1, 0.0);
        for (const auto& [m, c] : b.terms()) {
          double v = c;
          for (int d = 0; d < n; ++d) v *= std::pow(x[d], m[d]);
          coef[m[n]] += v;
        }
        sign_change_roots(coef, lo, hi, breaks);
      }
      const QuadratureRule rule = noise_rule(comp, grid_.quadrature_nodes, grid_.normal_truncation, breaks);
      local_nodes.reserve(rule.size());
      for (double w : rule.nodes) local_nodes.push_back({w});
      local_weights = rule.weights;
      nodes = &local_nodes;
      weights = &local_weights;
    }

    std::vector<std::pair<int, double>> stencil;
    auto& row = rows[i];
    double exit = 0.0, hit = 0.0, inner = 0.0;
    for (std::size_t q = 0; q < nodes->size(); ++q) {
      const double wt = (*weights)[q];
      std::copy(x.begin(), x.end(), point.begin());
      std::copy((*nodes)[q].begin(), (*nodes)[q].end(), point.begin() + n);
      for (int d = 0; d < n; ++d) y[d] = dyn[d](point);
      if (goal && goal->contains(y)) {
        hit += wt;
      } else if (!safe.contains(y)) {
        exit += wt;
      } else {
        if (!stencil_at(grid_, y, stencil)) {
          throw ConfigError("grid does not cover S: a successor state in S lies outside the grid");
        }
        for (const auto& [col, sw] : stencil) row.emplace_back(col, sw * wt);
        inner += wt;
      }
    }
    std::sort(row.begin(), row.end());
    std::size_t k = 0;
    for (std::size_t r = 0; r < row.size(); ++r) {
      if (k > 0 && row[k - 1].first == row[r].first) row[k - 1].second += row[r].second;
      else row[k++] = row[r];
    }
    row.resize(k);
    exit_mass_[i] = exit;
    target_mass_[i] = hit;
    mass_error[i] = std::abs(exit + hit + inner - 1.0);
  });

  max_mass_error_ = *std::max_element(mass_error.begin(), mass_error.end());
  if (max_mass_error_ > 1e-9) {
    throw ConfigError("quadrature weights do not sum to one (error " +
                      std::to_string(max_mass_error_) + ")");
  }
  row_ptr_.assign(total + 1, 0);
  for (int i = 0; i < total; ++i) row_ptr_[i + 1] = row_ptr_[i] + static_cast<int>(rows[i].size());
  cols_.reserve(row_ptr_.back());
  vals_.reserve(row_ptr_.back());
  for (auto& row : rows) {
    for (const auto& [c, v] : row) {
      cols_.push_back(c);
      vals_.push_back(v);
    }
    std::vector<std::pair<int, double>>().swap(row);
  }
}

ValueTable BellmanOperator::terminal(int horizon) const {
  ValueTable t;
  t.grid = grid_;
  t.stage = horizon;
  t.exterior = task_ == Task::Safety ? 1.0 : 0.0;
  t.target = 1.0;
  t.values.resize(kind_.size());
  for (std::size_t i = 0; i < kind_.size(); ++i) {
    switch (kind_[i]) {
      case NodeKind::Free: t.values[i] = 0.0; break;
      case NodeKind::Exterior: t.values[i] = t.exterior; break;
      case NodeKind::Target: t.values[i] = t.target; break;
    }
  }
  return t;
}

ValueTable BellmanOperator::apply(const ValueTable& next, bool clamp) const {
  if (next.values.size() != kind_.size()) throw DimensionError("value table does not match the grid");
  ValueTable out;
  out.grid = grid_;
  out.stage = next.stage - 1;
  out.exterior = task_ == Task::Safety ? 1.0 : 0.0;
  out.target = 1.0;
  out.values.resize(kind_.size());
  const auto total = static_cast<int>(kind_.size());
  for (int i = 0; i < total; ++i) {
    if (kind_[i] == NodeKind::Exterior) {
      out.values[i] = out.exterior;
      continue;
    }
    if (kind_[i] == NodeKind::Target) {
      out.values[i] = out.target;
      continue;
    }
    double s = exit_mass_[i] * next.exterior + target_mass_[i] * next.target;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += vals_[k] * next.values[cols_[k]];
    out.values[i] = clamp ? std::clamp(s, 0.0, 1.0) : s;
  }
  return out;
}

ValueTable bellman_safety_step(const SystemModel& model, const GridSpec& grid,
                               const ValueTable& v_next) {
  return BellmanOperator(model, grid, Task::Safety).apply(v_next);
}

ValueTable bellman_reach_avoid_step(const SystemModel& model, const GridSpec& grid,
                                    const ValueTable& v_next) {
  return BellmanOperator(model, grid, Task::ReachAvoid).apply(v_next);
}

double interpolate(const ValueTable& table, std::span<const double> x) {
  std::vector<std::pair<int, double>> st;
  if (!stencil_at(table.grid, x, st)) {
    throw ConfigError("point lies outside the grid hull (extrapolation is not supported)");
  }
  double s = 0.0;
  for (const auto& [i, w] : st) s += w * table.values[i];
  return s;
}

DpResult::DpResult(Task task, int horizon, std::vector<ValueTable> tables, SemialgebraicSet safe,
                   std::optional<SemialgebraicSet> goal, double mass_error)
    : task_(task),
      horizon_(horizon),
      tables_(std::move(tables)),
      safe_(std::move(safe)),
      goal_(std::move(goal)),
      mass_error_(mass_error) {}

double DpResult::value_at(std::span<const double> x, int t) const {
  if (task_ == Task::Safety) {
    if (!safe_.contains(x)) return 1.0;
  } else {
    if (goal_ && goal_->contains(x)) return 1.0;
    if (!safe_.contains(x)) return 0.0;
  }
  return std::clamp(interpolate(stage(t), x), 0.0, 1.0);
}

DpResult solve_dp(const SystemModel& model, const GridSpec& grid, Task task,
                  std::optional<int> horizon) {
  const int T = horizon.value_or(model.horizon);
  if (T < 0) throw ConfigError("horizon must be non-negative");
  BellmanOperator op(model, grid, task);
  std::vector<ValueTable> tables(T + 1);
  tables[T] = op.terminal(T);
  for (int t = T - 1; t >= 0; --t) tables[t] = op.apply(tables[t + 1]);
  std::optional<SemialgebraicSet> goal;
  if (task == Task::ReachAvoid) goal = model.region(RegionName::G);
  return DpResult(task, T, std::move(tables), model.region(RegionName::S), std::move(goal),
                  op.max_mass_error());
}

double safety_unsafe_probability(const SystemModel& model, const GridSpec& grid,
                                 std::span<const double> x0) {
  if (!model.region(RegionName::S).contains(x0)) return 1.0;
  return solve_dp(model, grid, Task::Safety).value_at(x0);
}

double reach_avoid_probability(const SystemModel& model, const GridSpec& grid,
                               std::span<const double> x0) {
  if (model.region(RegionName::G).contains(x0)) return 1.0;
  if (!model.region(RegionName::S).contains(x0)) return 0.0;
  return solve_dp(model, grid, Task::ReachAvoid).value_at(x0);
}

}  // namespace dpbc
