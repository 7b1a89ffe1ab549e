#pragma once

#include <array>
#include <string>
#include <vector>

#include "dwrnet/common.hpp"

namespace dwrnet::geo {

/// Index of the knot span containing xi (the last non-degenerate span at the
/// right end of the range).
int find_span(const std::vector<double>& knots, int degree, double xi);

/// Cox–de Boor: the degree+1 nonzero basis functions N_{span-degree..span}.
std::vector<double> bspline_basis(const std::vector<double>& knots, int degree, int span, double xi);

/// Basis values and first derivatives.
void bspline_basis_d1(const std::vector<double>& knots, int degree, int span, double xi, std::vector<double>& n,
                      std::vector<double>& dn);

struct NurbsCurve {
  int degree = 1;
  std::vector<double> knots;
  std::vector<Vec2> ctrl;
  std::vector<double> weights;

  /// Throws GeometryError on inconsistent sizes, decreasing knots or nonpositive weights.
  void validate() const;
  double xi_min() const { return knots[static_cast<std::size_t>(degree)]; }
  double xi_max() const { return knots[knots.size() - 1 - static_cast<std::size_t>(degree)]; }

  Vec2 eval(double xi) const;
  Vec2 derivative(double xi) const;
  /// Rational basis values R_{k,p}(xi) for every control point.
  std::vector<double> rational_basis(double xi) const;
};

/// Boehm insertion of one knot; the curve is unchanged geometrically.
NurbsCurve knot_insert(const NurbsCurve& curve, double xi_new);

/// Tensor-product surface. ctrl and weights are indexed [i * n_v + j] with i
/// along u.
struct NurbsSurface {
  int degree_u = 1;
  int degree_v = 1;
  std::vector<double> knots_u;
  std::vector<double> knots_v;
  int n_u = 0;
  int n_v = 0;
  std::vector<Vec2> ctrl;
  std::vector<double> weights;

  void validate() const;
  Vec2 eval(double u, double v) const;
  /// d(x, y)/d(u, v) as {dx/du, dx/dv, dy/du, dy/dv}.
  std::array<double, 4> jacobian(double u, double v) const;
  /// Boundary curve: side 0 v=v_min, 1 u=u_max, 2 v=v_max, 3 u=u_min.
  NurbsCurve side(int s) const;
  double u_min() const { return knots_u[static_cast<std::size_t>(degree_u)]; }
  double u_max() const { return knots_u[knots_u.size() - 1 - static_cast<std::size_t>(degree_u)]; }
  double v_min() const { return knots_v[static_cast<std::size_t>(degree_v)]; }
  double v_max() const { return knots_v[knots_v.size() - 1 - static_cast<std::size_t>(degree_v)]; }
};

/// Full unit circle from nine control points, quadratic, four 90 degree arcs.
NurbsCurve unit_circle_curve();

/// Unit disc as a single quadratic 3x3 patch whose four sides are quarter arcs.
NurbsSurface unit_disc_surface();

NurbsCurve curve_from_json(const std::string& text);
NurbsSurface surface_from_json(const std::string& text);
std::string to_json(const NurbsSurface& s);

}  // namespace dwrnet::geo
