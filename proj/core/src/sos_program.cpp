#include "dpbc/sos_program.hpp"

#include <algorithm>
#include <cmath>

#include "dpbc/error.hpp"

namespace dpbc {

namespace {

int round_up_even(int d) { return d <= 0 ? 0 : d + (d % 2); }

class Builder {
 public:
  Builder(CertificateKind kind, const SystemModel& model, double alpha, const SosDegrees& degrees)
      : model_(model) {
    check_alpha_domain(kind, alpha);
    if (degrees.certificate < 0) throw DomainError("certificate degree must be non-negative");
    if (degrees.multiplier && *degrees.multiplier < 0) {
      throw DomainError("multiplier degree must be non-negative");
    }
    if (model.horizon < 1) throw ConfigError("horizon must be at least 1");
    p_.kind = kind;
    p_.alpha = alpha;
    p_.horizon = model.horizon;
    p_.space = model.space;
    p_.degrees = degrees;
    p_.v_basis = state_basis(model.space, degrees.certificate);
    for (const auto& m : p_.v_basis) {
      std::string name = "v[";
      for (int k = 0; k < m.nvars(); ++k) name += (k ? "," : "") + std::to_string(m[k]);
      p_.decision_names.push_back(name + "]");
    }
    p_.beta_index = p_.decision_count();
    p_.decision_names.push_back("beta");
    p_.delta_index = p_.decision_count();
    p_.decision_names.push_back("delta");

    v_ = AffinePolynomial::template_over(model.space, p_.v_basis, 0);
    const PushforwardMap pf = pushforward(model, degrees.certificate);
    ev_ = AffinePolynomial(model.space);
    for (int j = 0; j < static_cast<int>(p_.v_basis.size()); ++j) {
      const Polynomial col = pf.column(j);
      for (const auto& [m, c] : col.terms()) ev_.add_term(m, AffineExpr::variable(j, c));
    }
    a_pow_ = std::pow(alpha, -model.horizon);
    g_ = geometric_sum(alpha, model.horizon);
    p_.objective = AffineExpr::variable(p_.delta_index, a_pow_) + AffineExpr::variable(p_.beta_index, g_);
  }

  const AffinePolynomial& v() const { return v_; }
  const AffinePolynomial& ev() const { return ev_; }
  AffineExpr beta(double c = 1.0) const { return AffineExpr::variable(p_.beta_index, c); }
  AffineExpr delta(double c = 1.0) const { return AffineExpr::variable(p_.delta_index, c); }
  double a_pow() const { return a_pow_; }
  double g() const { return g_; }
  SosProgram& program() { return p_; }

  // expr - sum_i xi_i s_i must be SOS, one fresh multiplier per defining
  // polynomial; for a single-point region, expr(p) >= 0 instead.
  void add(const std::string& label, const std::string& description, const AffinePolynomial& expr,
           RegionName region) {
    const SemialgebraicSet& set = model_.region(region);
    if (p_.degrees.point_regions == PointRegionEncoding::Point) {
      if (auto pt = singleton_point(set)) {
        std::vector<double> full(*pt);
        full.resize(p_.space.size(), 0.0);
        AffineExpr at;
        for (const auto& [m, e] : expr.terms()) at += e * m.eval(full);
        p_.inequalities.push_back({label, at});
        return;
      }
    }
    SosConstraint c;
    c.label = label;
    c.description = description;
    c.affine = expr;
    const int main = round_up_even(std::max(expr.degree(), 0));
    int total = main;
    for (int i = 0; i < static_cast<int>(set.polys().size()); ++i) {
      const Polynomial& s = set.polys()[i];
      const int sdeg = std::max(s.degree(), 0);
      int mdeg = p_.degrees.multiplier ? round_up_even(*p_.degrees.multiplier)
                                       : round_up_even(std::max(main - sdeg, 0));
      SosMultiplier xi;
      xi.name = "xi_" + to_string(region) + "_" + label + (set.polys().size() > 1 ? "_" + std::to_string(i) : "");
      xi.region = region;
      xi.poly_index = i;
      xi.degree = mdeg;
      xi.basis = gram_basis(p_.space, mdeg);
      p_.multipliers.push_back(std::move(xi));
      c.terms.push_back({static_cast<int>(p_.multipliers.size()) - 1, s * -1.0});
      total = std::max(total, mdeg + sdeg);
    }
    c.degree = round_up_even(total);
    c.gram_basis = gram_basis(p_.space, c.degree);
    p_.constraints.push_back(std::move(c));
  }

 private:
  const SystemModel& model_;
  SosProgram p_;
  AffinePolynomial v_;
  AffinePolynomial ev_;
  double a_pow_ = 1.0;
  double g_ = 1.0;
};

AffinePolynomial lift(const AffinePolynomial& p, const AffineExpr& c) { return p + c; }

SosProgram build_safety(CertificateKind kind, const SystemModel& model, double alpha,
                        const SosDegrees& degrees) {
  for (auto r : {RegionName::S, RegionName::XminusS, RegionName::X0}) (void)model.region(r);
  Builder b(kind, model, alpha, degrees);
  const auto& v = b.v();
  b.add("1", "v - xi s_S", v, RegionName::S);
  b.add("2", "v - 1 - xi s_{X\\S}", lift(v, AffineExpr::scalar(-1.0)), RegionName::XminusS);
  b.add("3", "delta - v - xi s_X0", lift(v * -1.0, b.delta()), RegionName::X0);
  b.add("4", "v/alpha + beta - E[v(f)] - xi s_S", lift(v * (1.0 / alpha) - b.ev(), b.beta()), RegionName::S);
  SosProgram& p = b.program();
  if (kind == CertificateKind::DSBC) {
    b.add("5", "alpha^-T v + (sum alpha^-i) beta - 1 - xi s_{X\\S}",
          lift(v * b.a_pow(), b.beta(b.g()) + AffineExpr::scalar(-1.0)), RegionName::XminusS);
  } else {
    // gamma = alpha beta - alpha + 1 >= 0
    p.inequalities.push_back({"gamma", b.beta(alpha) + AffineExpr::scalar(1.0 - alpha)});
  }
  p.sense = Sense::Minimize;
  return std::move(p);
}

}  // namespace

std::optional<std::vector<double>> singleton_point(const SemialgebraicSet& set) {
  if (set.polys().size() != 1) return std::nullopt;
  const Polynomial& s = set.polys()[0];
  if (s.degree() != 2) return std::nullopt;
  const VarSpace& sp = s.space();
  const int n = sp.state_dim;
  const double c = -s.coefficient(Monomial::variable(sp.size(), 0, 2));
  if (!(c > 0.0)) return std::nullopt;
  std::vector<double> p(n);
  for (int i = 0; i < n; ++i) p[i] = s.coefficient(Monomial::variable(sp.size(), i)) / (2.0 * c);
  Polynomial rebuilt = Polynomial::constant(sp, 0.0);
  for (int i = 0; i < n; ++i) {
    const Polynomial d = Polynomial::variable(sp, i) - p[i];
    rebuilt = rebuilt + d * d * -c;
  }
  double scale = 0.0, err = 0.0;
  for (const auto& kv : s.terms()) scale = std::max(scale, std::abs(kv.second));
  const Polynomial diff = s - rebuilt;
  for (const auto& kv : diff.terms()) err = std::max(err, std::abs(kv.second));
  if (err > 1e-12 * std::max(scale, 1.0)) return std::nullopt;
  return p;
}

std::vector<Monomial> gram_basis(const VarSpace& space, int degree) {
  std::vector<bool> active(space.size(), false);
  for (int k = 0; k < space.state_dim; ++k) active[k] = true;
  return monomials_up_to_degree(space.size(), (std::max(degree, 0) + 1) / 2, active);
}

int SosProgram::constraint_groups() const {
  return static_cast<int>(constraints.size()) + (multipliers.empty() ? 0 : 1) +
         static_cast<int>(inequalities.size());
}

AffinePolynomial SosProgram::v_template() const {
  return AffinePolynomial::template_over(space, v_basis, 0);
}

SosProgram build_dsbc(const SystemModel& model, double alpha, const SosDegrees& degrees) {
  return build_safety(CertificateKind::DSBC, model, alpha, degrees);
}

SosProgram build_msbc(const SystemModel& model, double alpha, const SosDegrees& degrees) {
  return build_safety(CertificateKind::MSBC, model, alpha, degrees);
}

SosProgram build_ssbc(const SystemModel& model, double alpha, const SosDegrees& degrees) {
  return build_safety(CertificateKind::SSBC, model, alpha, degrees);
}

SosProgram build_rabc(const SystemModel& model, double alpha, const SosDegrees& degrees) {
  for (auto r : {RegionName::S, RegionName::XminusS, RegionName::X0, RegionName::G, RegionName::SminusG,
                 RegionName::XminusG}) {
    (void)model.region(r);
  }
  Builder b(CertificateKind::RABC, model, alpha, degrees);
  const auto& v = b.v();
  const AffinePolynomial env = v * -b.a_pow();  // -(alpha^-T v)
  b.add("1", "-v - xi s_{X\\G}", v * -1.0, RegionName::XminusG);
  b.add("2", "1 - v - xi s_G", lift(v * -1.0, AffineExpr::scalar(1.0)), RegionName::G);
  b.add("3", "v - delta - xi s_X0", lift(v, b.delta(-1.0)), RegionName::X0);
  b.add("4", "E[v(f)] - v/alpha - beta - xi s_{S\\G}", lift(b.ev() - v * (1.0 / alpha), b.beta(-1.0)),
        RegionName::SminusG);
  b.add("5", "1 - alpha^-T v - (sum alpha^-i) beta - xi s_G",
        lift(env, b.beta(-b.g()) + AffineExpr::scalar(1.0)), RegionName::G);
  b.add("6", "-alpha^-T v - (sum alpha^-i) beta - xi s_{X\\S}", lift(env, b.beta(-b.g())),
        RegionName::XminusS);
  SosProgram& p = b.program();
  p.sense = Sense::Maximize;
  return std::move(p);
}

SosProgram build_program(CertificateKind kind, const SystemModel& model, double alpha,
                         const SosDegrees& degrees) {
  switch (kind) {
    case CertificateKind::DSBC: return build_dsbc(model, alpha, degrees);
    case CertificateKind::MSBC: return build_msbc(model, alpha, degrees);
    case CertificateKind::SSBC: return build_ssbc(model, alpha, degrees);
    case CertificateKind::RABC: return build_rabc(model, alpha, degrees);
  }
  throw InvalidInputError("unknown certificate kind");
}

}  // namespace dpbc
