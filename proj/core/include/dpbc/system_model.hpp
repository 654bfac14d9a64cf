#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpbc/noise.hpp"
#include "dpbc/polynomial.hpp"

namespace dpbc {

enum class RegionName { X0, S, XminusS, G, SminusG, XminusG };

std::string to_string(RegionName r);
RegionName region_from_string(const std::string& s);

/// Intersection of super-level sets {x : s_i(x) >= 0}.
class SemialgebraicSet {
 public:
  SemialgebraicSet(RegionName name, std::vector<Polynomial> defining_polys);

  RegionName name() const { return name_; }
  const std::vector<Polynomial>& polys() const { return polys_; }
  bool is_singleton() const { return polys_.size() == 1; }

  /// min_i s_i(x); the point is a member when this is >= 0.
  double membership_margin(std::span<const double> x) const;
  bool contains(std::span<const double> x, double tol = 0.0) const {
    return membership_margin(x) >= -tol;
  }

 private:
  RegionName name_;
  std::vector<Polynomial> polys_;
  std::vector<CompiledPolynomial> compiled_;
};

/// Axis-aligned box.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  int dim() const { return static_cast<int>(lower.size()); }
  static Box cube(int n, double lo, double hi);
};

enum class Task { Safety, ReachAvoid };

struct SystemModel {
  std::string name;
  VarSpace space;
  std::vector<Polynomial> dynamics;  // one per state variable, over (x, w)
  NoiseVector noise;
  int horizon = 1;
  std::map<RegionName, SemialgebraicSet> regions;
  std::vector<std::vector<double>> initial_points;
  std::optional<Box> grid_box;   // DP grid; must cover S
  std::optional<Box> check_box;  // sampling box for unbounded regions

  bool has_region(RegionName r) const { return regions.count(r) != 0; }
  /// Throws ConfigError when absent.
  const SemialgebraicSet& region(RegionName r) const;

  /// x' = f(x, w).
  void step(std::span<const double> x, std::span<const double> w, std::span<double> out) const;
};

struct ValidationReport {
  bool ok = true;
  int state_dim = 0;
  int noise_dim = 0;
  int max_dynamics_degree = 0;
  int max_dynamics_state_degree = 0;
  std::map<RegionName, int> region_poly_count;
  bool single_polynomial_regions = true;  // every region is a single super-level set
  int containment_samples = 0;            // points of G that were tested
  int containment_violations = 0;
  std::vector<std::string> messages;
};

/// Checks dimensions and (for reach-avoid) sampled G ⊆ S. Hard errors throw
/// DimensionError / ConfigError; softer findings go to messages.
ValidationReport validate(const SystemModel& model, std::optional<Task> task = std::nullopt,
                          int containment_samples = 10000);

/// Linear map M sending the coefficients of a degree <= d state polynomial v
/// (over source_basis) to the coefficients of E_w[v(f(x, w))] (over
/// target_basis).
class PushforwardMap {
 public:
  PushforwardMap(VarSpace space, int source_degree, std::vector<Monomial> source_basis,
                 std::vector<Monomial> target_basis, Eigen::MatrixXd matrix);

  int source_degree() const { return source_degree_; }
  int target_degree() const;
  const std::vector<Monomial>& source_basis() const { return source_basis_; }
  const std::vector<Monomial>& target_basis() const { return target_basis_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  Eigen::VectorXd coefficients(const Polynomial& v) const;
  Polynomial apply(const Polynomial& v) const;
  /// Column j as a polynomial (the image of source_basis[j]).
  Polynomial column(int j) const;

 private:
  VarSpace space_;
  int source_degree_;
  std::vector<Monomial> source_basis_;
  std::vector<Monomial> target_basis_;
  Eigen::MatrixXd matrix_;
};

/// Monomials of degree <= d in the state variables of `space`.
std::vector<Monomial> state_basis(const VarSpace& space, int d);

PushforwardMap pushforward(const SystemModel& model, int degree);

/// Affine change of coordinates x = c + h * z mapping `box` onto [-1, 1]^n.
struct AffineRescale {
  std::vector<double> center;
  std::vector<double> half_width;

  static AffineRescale to_unit_box(const Box& box);
  /// Substitution x_i -> c_i + h_i z_i applied to a polynomial.
  Polynomial to_scaled(const Polynomial& p_in_x) const;
  /// Inverse substitution z_i -> (x_i - c_i) / h_i.
  Polynomial to_original(const Polynomial& p_in_z) const;
  std::vector<double> point_to_scaled(std::span<const double> x) const;
};

/// Model expressed in rescaled coordinates z (dynamics, sets, boxes, points).
SystemModel rescale_model(const SystemModel& model, const AffineRescale& r);

}  // namespace dpbc
