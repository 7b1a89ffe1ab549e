#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dwrnet/geometry/domain.hpp"
#include "dwrnet/geometry/quadrature.hpp"
#include "dwrnet/problems/field.hpp"
#include "dwrnet/problems/system.hpp"

namespace dwrnet::goals {

using pde::AdjointRhs;
using pde::Field;
using ad::SpatialJet2;

enum class GoalKind { domain_integral, laplacian_integral, boundary_flux, point_value, abs_domain_integral, drag_lift, product };

GoalKind parse_goal_kind(const std::string& name);
std::string to_string(GoalKind kind);

/// Weight function of a domain integral.
enum class Weight {
  one,
  upper_ramp,  // y - x where x < y, else 0
};

Weight parse_weight(const std::string& name);
std::string to_string(Weight w);
double weight_value(Weight w, const Vec2& x);

struct GoalFunctional {
  GoalKind kind = GoalKind::domain_integral;
  std::string name;
  int component = 0;
  double scale = 1.0;
  Weight weight = Weight::one;
  std::optional<geo::HalfPlane> cut;  // integrate over Omega ∩ {a x > b y}
  double offset = 0.0;                // abs_domain_integral: |u_c - offset|
  std::vector<Vec2> points;           // point_value: sum_k coeffs_k u_c(points_k)
  std::vector<double> coeffs;
  std::vector<std::string> groups;    // boundary segments; empty = whole boundary
  Vec2 direction{1.0, 0.0};           // drag_lift
  double c_re = 1.0;
  double nu = 1.0;
  std::shared_ptr<const GoalFunctional> left, right;

  int depth() const;
  /// Throws FunctionalError when the declaration cannot be evaluated on the domain.
  void validate(const geo::Domain& domain, int n_fields) const;
};

GoalFunctional domain_integral(std::string name, int component = 0, Weight weight = Weight::one, double scale = 1.0);
GoalFunctional subdomain_integral(std::string name, double a, double b, int component = 0);
GoalFunctional laplacian_integral(std::string name, double a, double b, int component = 0);
GoalFunctional boundary_flux(std::string name, std::vector<std::string> groups = {}, int component = 0);
GoalFunctional point_value(std::string name, std::vector<Vec2> points, std::vector<double> coeffs = {}, int component = 0);
GoalFunctional abs_domain_integral(std::string name, int component, double scale, double offset = 0.0);
GoalFunctional drag_lift(std::string name, Vec2 direction, double c_re, double nu, std::vector<std::string> groups = {});
GoalFunctional product(std::string name, GoalFunctional left, GoalFunctional right);

/// Smoothing of |t| used by abs integrals.
inline constexpr double kAbsEps = 1e-8;

/// Quadrature-based evaluation and linearization of goal functionals on one
/// domain. Volume and boundary rules are built lazily and cached.
class GoalEvaluator {
 public:
  /// `spacing` is the collocation spacing; it sets the mollifier width of
  /// point values (2 * spacing) and the smoothing width of indicator
  /// densities (spacing).
  GoalEvaluator(geo::Domain domain, int order, int cells, double spacing);

  double evaluate(const GoalFunctional& J, const Field& u);
  /// J'(u)(phi), computed by quadrature (point values taken exactly).
  double directional(const GoalFunctional& J, const Field& u, const Field& phi);
  /// Adjoint right-hand side J'(u) as densities and adjoint boundary data.
  AdjointRhs derivative(const GoalFunctional& J, std::shared_ptr<const Field> u, const pde::PdeSystem& system);

  const geo::QuadratureRule& volume_rule(const std::optional<geo::HalfPlane>& cut = std::nullopt);
  const geo::QuadratureRule& boundary_rule(const std::vector<std::string>& groups);
  const geo::Domain& domain() const { return domain_; }
  double mollifier_width() const { return 2.0 * spacing_; }
  double smoothing_width() const { return spacing_; }
  int order() const { return order_; }
  int cells() const { return cells_; }

  /// Mollified delta at x0 normalized to unit mass on the volume rule.
  std::function<double(const Vec2&)> mollifier(const Vec2& x0);

 private:
  double evaluate_linear(const GoalFunctional& J, const Field& u);

  geo::Domain domain_;
  int order_;
  int cells_;
  double spacing_;
  std::map<std::pair<double, double>, geo::QuadratureRule> volume_;
  std::map<std::vector<std::string>, geo::QuadratureRule> boundary_;
};

}  // namespace dwrnet::goals
