#include "dpbc/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpbc/error.hpp"
#include "dpbc/parallel.hpp"
#include "dpbc/sampling.hpp"

namespace dpbc {

std::string to_string(RegionName r) {
  switch (r) {
    case RegionName::X0: return "X0";
    case RegionName::S: return "S";
    case RegionName::XminusS: return "XminusS";
    case RegionName::G: return "G";
    case RegionName::SminusG: return "SminusG";
    case RegionName::XminusG: return "XminusG";
  }
  return "?";
}

RegionName region_from_string(const std::string& s) {
  for (auto r : {RegionName::X0, RegionName::S, RegionName::XminusS, RegionName::G,
                 RegionName::SminusG, RegionName::XminusG}) {
    if (to_string(r) == s) return r;
  }
  throw InvalidInputError("unknown region name '" + s + "'");
}

SemialgebraicSet::SemialgebraicSet(RegionName name, std::vector<Polynomial> defining_polys)
    : name_(name), polys_(std::move(defining_polys)) {
  if (polys_.empty()) {
    throw InvalidInputError("region " + to_string(name_) + " needs at least one polynomial");
  }
  for (const auto& p : polys_) {
    if (p.uses_noise()) {
      throw InvalidInputError("region " + to_string(name_) + " uses a noise variable");
    }
    compiled_.emplace_back(p);
  }
}

double SemialgebraicSet::membership_margin(std::span<const double> x) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : compiled_) m = std::min(m, c(x));
  return m;
}

Box Box::cube(int n, double lo, double hi) {
  return Box{std::vector<double>(n, lo), std::vector<double>(n, hi)};
}

const SemialgebraicSet& SystemModel::region(RegionName r) const {
  auto it = regions.find(r);
  if (it == regions.end()) {
    throw ConfigError("model '" + name + "' does not define region " + to_string(r));
  }
  return it->second;
}

void SystemModel::step(std::span<const double> x, std::span<const double> w,
                       std::span<double> out) const {
  std::vector<double> point(x.begin(), x.end());
  point.insert(point.end(), w.begin(), w.end());
  for (int i = 0; i < space.state_dim; ++i) out[i] = dynamics[i].eval(point);
}

ValidationReport validate(const SystemModel& model, std::optional<Task> task,
                          int containment_samples) {
  ValidationReport rep;
  const VarSpace& sp = model.space;
  rep.state_dim = sp.state_dim;
  rep.noise_dim = sp.noise_dim;

  if (static_cast<int>(model.dynamics.size()) != sp.state_dim) {
    throw DimensionError("expected " + std::to_string(sp.state_dim) + " dynamics polynomials, got " +
                         std::to_string(model.dynamics.size()));
  }
  for (const auto& f : model.dynamics) {
    if (f.space() != sp) throw DimensionError("dynamics polynomial uses a different variable space");
    rep.max_dynamics_degree = std::max(rep.max_dynamics_degree, f.degree());
    rep.max_dynamics_state_degree = std::max(rep.max_dynamics_state_degree, f.state_degree());
  }
  if (model.noise.size() != sp.noise_dim) {
    throw DimensionError("model declares " + std::to_string(sp.noise_dim) +
                         " noise variables but " + std::to_string(model.noise.size()) +
                         " noise components");
  }
  if (model.horizon < 1) throw ConfigError("horizon must be a positive integer");
  for (const auto& [name, set] : model.regions) {
    for (const auto& p : set.polys()) {
      if (p.space() != sp) {
        throw DimensionError("region " + to_string(name) + " uses a different variable space");
      }
    }
    rep.region_poly_count[name] = static_cast<int>(set.polys().size());
    if (!set.is_singleton()) rep.single_polynomial_regions = false;
  }
  for (const auto& x0 : model.initial_points) {
    if (static_cast<int>(x0.size()) != sp.state_dim) {
      throw DimensionError("initial point has wrong dimension");
    }
  }
  for (const auto* box : {model.grid_box ? &*model.grid_box : nullptr,
                          model.check_box ? &*model.check_box : nullptr}) {
    if (!box) continue;
    if (box->dim() != sp.state_dim || static_cast<int>(box->upper.size()) != sp.state_dim) {
      throw DimensionError("box dimension does not match state dimension");
    }
    for (int d = 0; d < box->dim(); ++d) {
      if (!(box->lower[d] < box->upper[d])) throw ConfigError("box bounds must satisfy lower < upper");
    }
  }

  const bool reach_avoid = task == Task::ReachAvoid;
  if (reach_avoid) {
    for (auto r : {RegionName::S, RegionName::G}) {
      if (!model.has_region(r)) throw ConfigError("reach-avoid task requires region " + to_string(r));
    }
  }
  if (model.has_region(RegionName::G) && model.has_region(RegionName::S)) {
    const Box box = model.check_box.value_or(Box::cube(sp.state_dim, -5.0, 5.0));
    const PointSet pts = sample_region(model.region(RegionName::G), box, containment_samples, 1);
    const auto& s = model.region(RegionName::S);
    rep.containment_samples = pts.size();
    for (int i = 0; i < pts.size(); ++i) {
      if (!s.contains(pts[i], 1e-12)) ++rep.containment_violations;
    }
    if (rep.containment_violations > 0) {
      const std::string msg = std::to_string(rep.containment_violations) + " of " +
                              std::to_string(rep.containment_samples) +
                              " sampled points of G lie outside S";
      if (reach_avoid) throw ConfigError(msg);
      rep.ok = false;
      rep.messages.push_back(msg);
    }
  }
  if (!rep.single_polynomial_regions) {
    rep.messages.push_back("some regions are intersections of several polynomials");
  }
  return rep;
}

PushforwardMap::PushforwardMap(VarSpace space, int source_degree,
                               std::vector<Monomial> source_basis,
                               std::vector<Monomial> target_basis, Eigen::MatrixXd matrix)
    : space_(space),
      source_degree_(source_degree),
      source_basis_(std::move(source_basis)),
      target_basis_(std::move(target_basis)),
      matrix_(std::move(matrix)) {}

int PushforwardMap::target_degree() const {
  return target_basis_.empty() ? 0 : target_basis_.back().degree();
}

Eigen::VectorXd PushforwardMap::coefficients(const Polynomial& v) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(source_basis_.size()));
  std::size_t matched = 0;
  for (std::size_t j = 0; j < source_basis_.size(); ++j) {
    const double cj = v.coefficient(source_basis_[j]);
    if (cj != 0.0) ++matched;
    c[static_cast<Eigen::Index>(j)] = cj;
  }
  if (matched != v.size()) {
    throw DimensionError("polynomial has terms outside the pushforward source basis");
  }
  return c;
}

Polynomial PushforwardMap::apply(const Polynomial& v) const {
  const Eigen::VectorXd out = matrix_ * coefficients(v);
  Polynomial::TermMap t;
  for (std::size_t i = 0; i < target_basis_.size(); ++i) {
    t.emplace(target_basis_[i], out[static_cast<Eigen::Index>(i)]);
  }
  return Polynomial(space_, std::move(t));
}

Polynomial PushforwardMap::column(int j) const {
  Polynomial::TermMap t;
  for (std::size_t i = 0; i < target_basis_.size(); ++i) {
    t.emplace(target_basis_[i], matrix_(static_cast<Eigen::Index>(i), j));
  }
  return Polynomial(space_, std::move(t));
}

std::vector<Monomial> state_basis(const VarSpace& space, int d) {
  std::vector<bool> active(space.size(), false);
  for (int i = 0; i < space.state_dim; ++i) active[i] = true;
  return monomials_up_to_degree(space.size(), d, active);
}

PushforwardMap pushforward(const SystemModel& model, int degree) {
  if (degree < 0) throw InvalidInputError("pushforward degree must be non-negative");
  const VarSpace& sp = model.space;
  int fdeg = 0;
  for (const auto& f : model.dynamics) fdeg = std::max(fdeg, f.state_degree());
  auto source = state_basis(sp, degree);
  auto target = state_basis(sp, degree * std::max(fdeg, 1));

  std::map<Monomial, Eigen::Index> row_of;
  for (std::size_t i = 0; i < target.size(); ++i) row_of.emplace(target[i], static_cast<Eigen::Index>(i));

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(target.size()),
                                            static_cast<Eigen::Index>(source.size()));
  parallel_for(static_cast<int>(source.size()), [&](int j) {
    const Polynomial col =
        expect(Polynomial::monomial(sp, source[j]).compose(model.dynamics), model.noise);
    for (const auto& [m, c] : col.terms()) M(row_of.at(m), j) = c;
  });
  return PushforwardMap(sp, degree, std::move(source), std::move(target), std::move(M));
}

namespace {

// Substitutes state variables by polynomials, leaving noise variables in place.
Polynomial substitute_states(const Polynomial& p, const std::vector<Polynomial>& subst) {
  const VarSpace& sp = p.space();
  Polynomial out(sp);
  for (const auto& [m, c] : p.terms()) {
    std::vector<int> noise_part(sp.size(), 0);
    for (int j = sp.state_dim; j < sp.size(); ++j) noise_part[j] = m[j];
    Polynomial term = Polynomial::monomial(sp, Monomial(noise_part), c);
    for (int i = 0; i < sp.state_dim; ++i) {
      if (m[i] > 0) term = term * subst[i].pow(m[i]);
    }
    out = out + term;
  }
  return out.pruned();
}

}  // namespace

AffineRescale AffineRescale::to_unit_box(const Box& box) {
  AffineRescale r;
  for (int d = 0; d < box.dim(); ++d) {
    if (!(box.lower[d] < box.upper[d])) throw ConfigError("rescale box must have lower < upper");
    r.center.push_back(0.5 * (box.lower[d] + box.upper[d]));
    r.half_width.push_back(0.5 * (box.upper[d] - box.lower[d]));
  }
  return r;
}

Polynomial AffineRescale::to_scaled(const Polynomial& p) const {
  const VarSpace& sp = p.space();
  std::vector<Polynomial> subst;
  for (int i = 0; i < sp.state_dim; ++i) {
    subst.push_back(Polynomial::variable(sp, i) * half_width[i] + center[i]);
  }
  return substitute_states(p, subst);
}

Polynomial AffineRescale::to_original(const Polynomial& p) const {
  const VarSpace& sp = p.space();
  std::vector<Polynomial> subst;
  for (int i = 0; i < sp.state_dim; ++i) {
    subst.push_back((Polynomial::variable(sp, i) - center[i]) * (1.0 / half_width[i]));
  }
  return substitute_states(p, subst);
}

std::vector<double> AffineRescale::point_to_scaled(std::span<const double> x) const {
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - center[i]) / half_width[i];
  return z;
}

SystemModel rescale_model(const SystemModel& model, const AffineRescale& r) {
  if (static_cast<int>(r.center.size()) != model.space.state_dim) {
    throw DimensionError("rescale dimension does not match the model");
  }
  SystemModel out = model;
  out.name = model.name + " (rescaled)";
  const VarSpace& sp = model.space;
  for (int i = 0; i < sp.state_dim; ++i) {
    out.dynamics[i] = (r.to_scaled(model.dynamics[i]) - r.center[i]) * (1.0 / r.half_width[i]);
  }
  out.regions.clear();
  for (const auto& [name, set] : model.regions) {
    std::vector<Polynomial> polys;
    for (const auto& p : set.polys()) polys.push_back(r.to_scaled(p));
    out.regions.emplace(name, SemialgebraicSet(name, std::move(polys)));
  }
  for (auto& x0 : out.initial_points) x0 = r.point_to_scaled(x0);
  auto map_box = [&](const Box& b) {
    return Box{r.point_to_scaled(b.lower), r.point_to_scaled(b.upper)};
  };
  if (model.grid_box) out.grid_box = map_box(*model.grid_box);
  if (model.check_box) out.check_box = map_box(*model.check_box);
  return out;
}

}  // namespace dpbc
