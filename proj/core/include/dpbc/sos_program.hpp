#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dpbc/affine.hpp"
#include "dpbc/certificates.hpp"
#include "dpbc/system_model.hpp"

namespace dpbc {

/// How a region that is a single point {p} (s = -c |x - p|^2) enters the
/// program. The multiplier form has no strictly feasible dual, which stalls
/// interior-point solvers; the point form imposes the exact condition at p.
enum class PointRegionEncoding { Point, Multiplier };

struct SosDegrees {
  int certificate = 6;
  /// Forces every multiplier to this degree (rounded up to even). By default
  /// deg(xi * s) matches the constraint's main expression degree.
  std::optional<int> multiplier;
  PointRegionEncoding point_regions = PointRegionEncoding::Point;
};

/// Unknown SOS polynomial xi = m(x)^T Q m(x) used as a region multiplier.
struct SosMultiplier {
  std::string name;
  RegionName region = RegionName::S;
  int poly_index = 0;  // which defining polynomial of the region it multiplies
  int degree = 0;
  std::vector<Monomial> basis;
};

struct MultiplierTerm {
  int multiplier = 0;
  Polynomial factor;  // the constraint contains factor * xi
};

/// affine + sum(factor_j * xi_j) must be SOS.
struct SosConstraint {
  std::string label;
  std::string description;
  AffinePolynomial affine;
  std::vector<MultiplierTerm> terms;
  int degree = 0;                  // even degree of the whole expression
  std::vector<Monomial> gram_basis;  // state monomials of degree <= degree / 2
};

/// expr >= 0.
struct ScalarInequality {
  std::string label;
  AffineExpr expr;
};

enum class Sense { Minimize, Maximize };

struct SosProgram {
  CertificateKind kind = CertificateKind::DSBC;
  double alpha = 1.0;
  int horizon = 1;
  VarSpace space;
  SosDegrees degrees;

  // Decision layout: v coefficients, then beta, then delta.
  std::vector<Monomial> v_basis;
  std::vector<std::string> decision_names;
  int beta_index = 0;
  int delta_index = 0;

  std::vector<SosMultiplier> multipliers;
  std::vector<SosConstraint> constraints;
  std::vector<ScalarInequality> inequalities;
  AffineExpr objective;  // delta alpha^-T + (sum alpha^-i) beta
  Sense sense = Sense::Minimize;

  int decision_count() const { return static_cast<int>(decision_names.size()); }
  /// Polynomial constraints, plus one group for "all multipliers SOS", plus
  /// scalar inequalities.
  int constraint_groups() const;
  AffinePolynomial v_template() const;
};

/// Throws DomainError for alpha outside the kind's domain, ConfigError for a
/// missing region.
SosProgram build_dsbc(const SystemModel& model, double alpha, const SosDegrees& degrees);
SosProgram build_rabc(const SystemModel& model, double alpha, const SosDegrees& degrees);
SosProgram build_msbc(const SystemModel& model, double alpha, const SosDegrees& degrees);
SosProgram build_ssbc(const SystemModel& model, double alpha, const SosDegrees& degrees);
SosProgram build_program(CertificateKind kind, const SystemModel& model, double alpha,
                         const SosDegrees& degrees);

/// p when the set is {x : -c |x - p|^2 >= 0} with c > 0.
std::optional<std::vector<double>> singleton_point(const SemialgebraicSet& set);

/// Gram basis for an SOS expression of the given degree: state monomials of
/// degree <= ceil(degree / 2).
std::vector<Monomial> gram_basis(const VarSpace& space, int degree);

}  // namespace dpbc
