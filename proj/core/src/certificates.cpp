#include "dpbc/certificates.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "dpbc/error.hpp"
#include "dpbc/noise.hpp"
#include "dpbc/sampling.hpp"

namespace dpbc {

std::string to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::MSBC: return "MSBC";
    case CertificateKind::SSBC: return "SSBC";
    case CertificateKind::DSBC: return "DSBC";
    case CertificateKind::RABC: return "RABC";
  }
  return "?";
}

CertificateKind kind_from_string(const std::string& s) {
  std::string u(s);
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::toupper(c); });
  for (auto k : {CertificateKind::MSBC, CertificateKind::SSBC, CertificateKind::DSBC,
                 CertificateKind::RABC}) {
    if (to_string(k) == u) return k;
  }
  throw InvalidInputError("unknown certificate kind '" + s + "'");
}

bool alpha_in_domain(CertificateKind k, double alpha) {
  if (!std::isfinite(alpha)) return false;
  switch (k) {
    case CertificateKind::MSBC: return alpha >= 1.0;
    case CertificateKind::SSBC: return alpha > 0.0 && alpha <= 1.0;
    case CertificateKind::DSBC:
    case CertificateKind::RABC: return alpha > 0.0;
  }
  return false;
}

void check_alpha_domain(CertificateKind k, double alpha) {
  if (!alpha_in_domain(k, alpha)) {
    const char* dom = k == CertificateKind::MSBC   ? "alpha >= 1"
                      : k == CertificateKind::SSBC ? "0 < alpha <= 1"
                                                   : "alpha > 0";
    throw DomainError(to_string(k) + " requires " + dom + " (got alpha = " + std::to_string(alpha) + ")");
  }
}

BarrierCertificate BarrierCertificate::make(CertificateKind kind, Polynomial v, double alpha,
                                            double beta, std::optional<double> delta) {
  check_alpha_domain(kind, alpha);
  if (!std::isfinite(beta)) throw DomainError("beta must be finite");
  if (v.uses_noise()) throw InvalidInputError("certificate polynomial must not use noise variables");
  return BarrierCertificate{kind, std::move(v), alpha, beta, delta};
}

double geometric_sum(double alpha, int T) {
  if (!(alpha > 0.0)) throw DomainError("geometric sum requires alpha > 0");
  if (T < 1) throw DomainError("geometric sum requires T >= 1");
  double s = 0.0;
  for (int i = 0; i < T; ++i) s += std::pow(alpha, -i);
  return s;
}

namespace {

// sum_{i=0}^{k-1} alpha^{-i}, zero for k = 0.
double partial_sum(double alpha, int k) { return k <= 0 ? 0.0 : geometric_sum(alpha, k); }

}  // namespace

double eta(double v_value, double alpha, double beta, int t, int T) {
  return std::pow(alpha, t - T) * v_value + partial_sum(alpha, T - t) * beta;
}

BoundReport evaluate_bound(const BarrierCertificate& cert, int T, double v_value) {
  check_alpha_domain(cert.kind, cert.alpha);
  if (T < 1) throw DomainError("horizon must be at least 1");
  BoundReport r;
  r.gamma = gamma_of(cert.alpha, cert.beta);
  r.v_value = v_value;
  const bool martingale_like = cert.kind == CertificateKind::MSBC || cert.kind == CertificateKind::SSBC;
  if (martingale_like && r.gamma < 0.0) {
    if (cert.beta >= 1.0) throw DomainError("gamma < 0 branch requires beta < 1");
    r.branch = BoundBranch::GammaNegative;
    const double q = std::pow(1.0 - cert.beta, T);
    r.raw = v_value * q + 1.0 - q;
  } else {
    r.branch = BoundBranch::AlphaPower;
    r.raw = v_value * std::pow(cert.alpha, -T) + geometric_sum(cert.alpha, T) * cert.beta;
  }
  r.clamped = std::clamp(r.raw, 0.0, 1.0);
  return r;
}

BoundReport evaluate_bound_at(const BarrierCertificate& cert, int T, std::span<const double> x) {
  return evaluate_bound(cert, T, cert.v.eval(x));
}

BoundReport evaluate_bound_over_x0(const BarrierCertificate& cert, int T) {
  if (!cert.delta) throw InvalidInputError("certificate carries no delta");
  return evaluate_bound(cert, T, *cert.delta);
}

std::pair<double, double> msbc_normalize(double alpha, double beta) {
  const double g = gamma_of(alpha, beta);
  if (!(g < 0.0)) throw DomainError("normalisation applies only when gamma < 0");
  return {1.0 / (1.0 - beta), beta};
}

double CheckReport::worst_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : conditions) m = std::min(m, c.worst_margin);
  return m;
}

const ConditionResult* CheckReport::find(const std::string& id) const {
  for (const auto& c : conditions) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

namespace {

Box unbounded_box(const SystemModel& model, const SamplingConfig& cfg) {
  if (cfg.box) return *cfg.box;
  if (model.check_box) return *model.check_box;
  if (cfg.allow_default_box) return Box::cube(model.space.state_dim, -5.0, 5.0);
  throw ConfigError("checking an unbounded region requires a bounding box");
}

bool inside_safe_set(RegionName r) {
  return r == RegionName::S || r == RegionName::G || r == RegionName::SminusG;
}

// Evaluates margin(x) over a region's samples and folds the worst value into `cond`.
template <class Margin>
void fold_region(ConditionResult& cond, const std::string& region_label, const PointSet& pts,
                 Margin&& margin) {
  for (int i = 0; i < pts.size(); ++i) {
    const double m = margin(pts[i]);
    if (cond.samples == 0 || m < cond.worst_margin) {
      cond.worst_margin = m;
      cond.witness.assign(pts[i].begin(), pts[i].end());
      cond.region = region_label;
    }
    ++cond.samples;
  }
}

ConditionResult new_condition(std::string id, std::string description) {
  ConditionResult c;
  c.id = std::move(id);
  c.description = std::move(description);
  c.worst_margin = std::numeric_limits<double>::infinity();
  return c;
}

}  // namespace

PointSet region_samples(const SystemModel& model, RegionName region, const SamplingConfig& cfg) {
  const SemialgebraicSet& set = model.region(region);
  Box box = inside_safe_set(region) && model.grid_box ? *model.grid_box : unbounded_box(model, cfg);
  const std::uint64_t seed = cfg.seed * 7919u + static_cast<std::uint64_t>(region);
  PointSet pts = sample_region(set, box, cfg.samples_per_region, seed);
  if (region == RegionName::X0) {
    for (const auto& x0 : model.initial_points) {
      if (set.contains(x0, 1e-9)) pts.push_back(x0);
    }
  }
  return pts;
}

CheckReport check_certificate(const BarrierCertificate& cert, const SystemModel& model,
                              const SamplingConfig& cfg) {
  if (cert.v.space() != model.space) throw DimensionError("certificate and model use different spaces");
  const int T = model.horizon;
  const double a = cert.alpha, b = cert.beta;
  const double aT = std::pow(a, -T);
  const double g = geometric_sum(a, T);
  const CompiledPolynomial v(cert.v);
  const CompiledPolynomial ev(expect(cert.v.compose(model.dynamics), model.noise));

  CheckReport rep;
  rep.kind = cert.kind;
  rep.gamma = gamma_of(a, b);

  auto samples = [&](RegionName r) { return region_samples(model, r, cfg); };

  if (is_safety_kind(cert.kind)) {
    const PointSet s_pts = samples(RegionName::S);
    const PointSet out_pts = samples(RegionName::XminusS);

    auto c1 = new_condition("1", "v >= 1_{X\\S}");
    fold_region(c1, "S", s_pts, [&](auto x) { return v(x); });
    fold_region(c1, "XminusS", out_pts, [&](auto x) { return v(x) - 1.0; });
    rep.conditions.push_back(c1);

    auto c2 = new_condition("2", "E[v(f(x,w))] <= v(x)/alpha + beta on S");
    fold_region(c2, "S", s_pts, [&](auto x) { return v(x) / a + b - ev(x); });
    rep.conditions.push_back(c2);

    if (cert.kind == CertificateKind::DSBC) {
      auto c3 = new_condition("3", "v alpha^-T + (sum alpha^-i) beta >= 1 on X\\S");
      fold_region(c3, "XminusS", out_pts, [&](auto x) { return aT * v(x) + g * b - 1.0; });
      rep.conditions.push_back(c3);
    } else {
      auto cg = new_condition("gamma", "gamma = alpha beta - alpha + 1 >= 0");
      cg.worst_margin = rep.gamma;
      cg.region = "parameters";
      cg.samples = 1;
      rep.conditions.push_back(cg);
    }
    if (cert.delta && model.has_region(RegionName::X0)) {
      auto c0 = new_condition("x0", "v <= delta on X0");
      fold_region(c0, "X0", samples(RegionName::X0), [&](auto x) { return *cert.delta - v(x); });
      if (c0.samples > 0) rep.conditions.push_back(c0);
    }
  } else {
    const PointSet g_pts = samples(RegionName::G);
    const PointSet xg_pts = samples(RegionName::XminusG);
    const PointSet sg_pts = samples(RegionName::SminusG);
    const PointSet xs_pts = samples(RegionName::XminusS);

    auto c1 = new_condition("1", "v <= 1_G");
    fold_region(c1, "G", g_pts, [&](auto x) { return 1.0 - v(x); });
    fold_region(c1, "XminusG", xg_pts, [&](auto x) { return -v(x); });
    rep.conditions.push_back(c1);

    auto c2 = new_condition("2", "E[v(f(x,w))] >= v(x)/alpha + beta on S\\G");
    fold_region(c2, "SminusG", sg_pts, [&](auto x) { return ev(x) - v(x) / a - b; });
    rep.conditions.push_back(c2);

    auto c3 = new_condition("3", "v alpha^-T + (sum alpha^-i) beta <= 0 on X\\S");
    fold_region(c3, "XminusS", xs_pts, [&](auto x) { return -(aT * v(x) + g * b); });
    rep.conditions.push_back(c3);

    auto c4 = new_condition("4", "v alpha^-T + (sum alpha^-i) beta <= 1 on G");
    fold_region(c4, "G", g_pts, [&](auto x) { return 1.0 - (aT * v(x) + g * b); });
    rep.conditions.push_back(c4);

    if (cert.delta && model.has_region(RegionName::X0)) {
      auto c0 = new_condition("x0", "v >= delta on X0");
      fold_region(c0, "X0", samples(RegionName::X0), [&](auto x) { return v(x) - *cert.delta; });
      if (c0.samples > 0) rep.conditions.push_back(c0);
    }
  }

  // Growth of v beyond the sampling box.
  const Polynomial top = cert.v.leading_form();
  const int n = model.space.state_dim;
  rep.tail_min = std::numeric_limits<double>::infinity();
  rep.tail_max = -std::numeric_limits<double>::infinity();
  const PointSet dirs = sample_box(Box::cube(n, -1.0, 1.0), n == 1 ? 2 : 2000, cfg.seed);
  std::vector<double> u(n);
  auto visit = [&](std::span<const double> d) {
    double norm = 0.0;
    for (double c : d) norm += c * c;
    norm = std::sqrt(norm);
    if (norm < 1e-12) return;
    for (int k = 0; k < n; ++k) u[k] = d[k] / norm;
    const double val = top.is_zero() ? 0.0 : top.eval(u);
    rep.tail_min = std::min(rep.tail_min, val);
    rep.tail_max = std::max(rep.tail_max, val);
  };
  if (n == 1) {
    visit(std::vector<double>{1.0});
    visit(std::vector<double>{-1.0});
  } else {
    for (int i = 0; i < dirs.size(); ++i) visit(dirs[i]);
  }
  const int deg = cert.v.degree();
  const bool wants_positive = is_safety_kind(cert.kind);
  if (deg <= 0) {
    rep.tail_note = "constant certificate";
  } else if (deg % 2 == 1) {
    rep.tail_note = "odd leading degree: v changes sign far outside the sampling box";
  } else if (wants_positive ? rep.tail_min > 0.0 : rep.tail_max < 0.0) {
    rep.tail_note = wants_positive ? "leading form positive: v -> +inf off the box"
                                   : "leading form negative: v -> -inf off the box";
  } else {
    rep.tail_note = "leading form is not definite: conditions beyond the box are not implied";
  }
  return rep;
}

EnvelopeViolation induction_envelope_check(const BarrierCertificate& cert, const SystemModel& model,
                                           const DpResult& dp, const SamplingConfig& cfg) {
  if (dp.horizon() != model.horizon) {
    throw ConfigError("DP tables were computed for horizon " + std::to_string(dp.horizon()) +
                      ", model horizon is " + std::to_string(model.horizon));
  }
  const bool safety = is_safety_kind(cert.kind);
  if (safety != (dp.task() == Task::Safety)) {
    throw ConfigError("DP task does not match the certificate kind");
  }
  const int T = model.horizon;
  const CompiledPolynomial v(cert.v);

  // (point, v(point), fixed value or NaN for grid nodes)
  struct Probe {
    std::vector<double> x;
    double v;
    double fixed;
  };
  std::vector<Probe> probes;
  const GridSpec& grid = dp.stage(T).grid;
  const int n = grid.dim();
  std::vector<double> x(n);
  for (int i = 0; i < grid.total_nodes(); ++i) {
    grid.node(i, x);
    probes.push_back({x, v(x), std::numeric_limits<double>::quiet_NaN()});
  }
  auto add_fixed = [&](RegionName r, double value) {
    if (!model.has_region(r)) return;
    const PointSet pts = region_samples(model, r, cfg);
    for (int i = 0; i < pts.size(); ++i) {
      probes.push_back({{pts[i].begin(), pts[i].end()}, v(pts[i]), value});
    }
  };
  if (safety) {
    add_fixed(RegionName::XminusS, 1.0);
  } else {
    add_fixed(RegionName::XminusS, 0.0);
    add_fixed(RegionName::G, 1.0);
  }

  EnvelopeViolation worst;
  worst.gap = std::numeric_limits<double>::infinity();
  for (int t = 0; t <= T; ++t) {
    const double scale = std::pow(cert.alpha, t - T);
    const double offset = partial_sum(cert.alpha, T - t) * cert.beta;
    const ValueTable& table = dp.stage(t);
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const auto& pr = probes[p];
      double vt;
      if (std::isnan(pr.fixed)) {
        vt = p < table.values.size() ? table.values[p] : dp.value_at(pr.x, t);
      } else {
        vt = pr.fixed;
      }
      const double env = scale * pr.v + offset;
      const double gap = safety ? env - vt : vt - env;
      if (gap < worst.gap) {
        worst.gap = gap;
        worst.stage = t;
        worst.x = pr.x;
      }
      ++worst.points_checked;
    }
  }
  return worst;
}

EtaExtremes eta_extremes(const BarrierCertificate& cert, const SystemModel& model, RegionName region,
                         int T, const SamplingConfig& cfg) {
  if (cert.kind != CertificateKind::DSBC && cert.kind != CertificateKind::RABC) {
    throw InvalidInputError("eta extremes apply to DSBC and RABC certificates");
  }
  const PointSet pts = region_samples(model, region, cfg);
  const CompiledPolynomial v(cert.v);
  EtaExtremes e;
  e.eta0_min = e.etaT_min = std::numeric_limits<double>::infinity();
  e.eta0_max = e.etaT_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < pts.size(); ++i) {
    const double vx = v(pts[i]);
    const double e0 = eta(vx, cert.alpha, cert.beta, 0, T);
    e.eta0_min = std::min(e.eta0_min, e0);
    e.eta0_max = std::max(e.eta0_max, e0);
    e.etaT_min = std::min(e.etaT_min, vx);
    e.etaT_max = std::max(e.etaT_max, vx);
  }
  e.samples = pts.size();
  return e;
}

}  // namespace dpbc
