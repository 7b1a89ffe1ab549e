#include "dwrnet/geometry/nurbs.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>

namespace dwrnet::geo {

int find_span(const std::vector<double>& knots, int degree, double xi) {
  const int n = static_cast<int>(knots.size()) - degree - 2;  // last control index
  if (n < degree) throw GeometryError("find_span: too few knots for the degree");
  const double lo = knots[static_cast<std::size_t>(degree)];
  const double hi = knots[static_cast<std::size_t>(n + 1)];
  const double tol = 1e-12 * std::max(1.0, hi - lo);
  if (xi < lo - tol || xi > hi + tol) {
    std::ostringstream msg;
    msg << "parameter " << xi << " outside knot range [" << lo << ", " << hi << "]";
    throw GeometryError(msg.str());
  }
  if (xi >= hi) {
    int s = n;
    while (s > degree && knots[static_cast<std::size_t>(s)] >= hi) --s;
    return s;
  }
  if (xi <= lo) xi = lo;
  int low = degree, high = n + 1;
  int mid = (low + high) / 2;
  while (xi < knots[static_cast<std::size_t>(mid)] || xi >= knots[static_cast<std::size_t>(mid + 1)]) {
    if (xi < knots[static_cast<std::size_t>(mid)])
      high = mid;
    else
      low = mid;
    mid = (low + high) / 2;
  }
  return mid;
}

std::vector<double> bspline_basis(const std::vector<double>& knots, int degree, int span, double xi) {
  std::vector<double> n, dn;
  bspline_basis_d1(knots, degree, span, xi, n, dn);
  return n;
}

void bspline_basis_d1(const std::vector<double>& knots, int degree, int span, double xi, std::vector<double>& n,
                      std::vector<double>& dn) {
  const auto p = static_cast<std::size_t>(degree);
  const auto& U = knots;
  const auto i = static_cast<std::size_t>(span);
  if (xi < U[p] - 1e-12 || xi > U[U.size() - 1 - p] + 1e-12) throw GeometryError("bspline_basis: parameter outside knot range");
  // ndu holds the triangular table of The NURBS Book A2.3 (first derivatives only).
  std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1, 0.0));
  std::vector<double> left(p + 1), right(p + 1);
  ndu[0][0] = 1.0;
  for (std::size_t j = 1; j <= p; ++j) {
    left[j] = xi - U[i + 1 - j];
    right[j] = U[i + j] - xi;
    double saved = 0.0;
    for (std::size_t r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  n.assign(p + 1, 0.0);
  dn.assign(p + 1, 0.0);
  for (std::size_t j = 0; j <= p; ++j) n[j] = ndu[j][p];
  if (p == 0) return;
  for (std::size_t r = 0; r <= p; ++r) {
    double d = 0.0;
    if (r >= 1) d += ndu[r - 1][p - 1] / ndu[p][r - 1];
    if (r <= p - 1) d -= ndu[r][p - 1] / ndu[p][r];
    dn[r] = static_cast<double>(p) * d;
  }
}

void NurbsCurve::validate() const {
  if (degree < 0) throw GeometryError("nurbs curve: negative degree");
  if (ctrl.size() != weights.size()) throw GeometryError("nurbs curve: control point and weight counts differ");
  if (knots.size() != ctrl.size() + static_cast<std::size_t>(degree) + 1)
    throw GeometryError("nurbs curve: knot count must equal n + p + 1");
  for (std::size_t k = 1; k < knots.size(); ++k) {
    if (knots[k] < knots[k - 1]) throw GeometryError("nurbs curve: knots must be nondecreasing");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw GeometryError("nurbs curve: weights must be positive");
  }
}

std::vector<double> NurbsCurve::rational_basis(double xi) const {
  const int span = find_span(knots, degree, xi);
  const auto nb = bspline_basis(knots, degree, span, xi);
  std::vector<double> r(ctrl.size(), 0.0);
  double wsum = 0.0;
  for (int a = 0; a <= degree; ++a) {
    const auto k = static_cast<std::size_t>(span - degree + a);
    r[k] = weights[k] * nb[static_cast<std::size_t>(a)];
    wsum += r[k];
  }
  for (double& v : r) v /= wsum;
  return r;
}

Vec2 NurbsCurve::eval(double xi) const {
  const int span = find_span(knots, degree, xi);
  const auto nb = bspline_basis(knots, degree, span, xi);
  Vec2 a{0.0, 0.0};
  double w = 0.0;
  for (int j = 0; j <= degree; ++j) {
    const auto k = static_cast<std::size_t>(span - degree + j);
    const double c = weights[k] * nb[static_cast<std::size_t>(j)];
    a = a + c * ctrl[k];
    w += c;
  }
  return (1.0 / w) * a;
}

Vec2 NurbsCurve::derivative(double xi) const {
  const int span = find_span(knots, degree, xi);
  std::vector<double> nb, db;
  bspline_basis_d1(knots, degree, span, xi, nb, db);
  Vec2 a{0.0, 0.0}, da{0.0, 0.0};
  double w = 0.0, dw = 0.0;
  for (int j = 0; j <= degree; ++j) {
    const auto k = static_cast<std::size_t>(span - degree + j);
    a = a + (weights[k] * nb[static_cast<std::size_t>(j)]) * ctrl[k];
    da = da + (weights[k] * db[static_cast<std::size_t>(j)]) * ctrl[k];
    w += weights[k] * nb[static_cast<std::size_t>(j)];
    dw += weights[k] * db[static_cast<std::size_t>(j)];
  }
  const Vec2 c = (1.0 / w) * a;
  return (1.0 / w) * (da - dw * c);
}

NurbsCurve knot_insert(const NurbsCurve& curve, double xi_new) {
  curve.validate();
  const int p = curve.degree;
  const int k = find_span(curve.knots, p, xi_new);
  int mult = 0;
  for (double u : curve.knots) {
    if (u == xi_new) ++mult;
  }
  if (mult >= p) throw GeometryError("knot_insert: multiplicity would exceed the degree");
  if (xi_new <= curve.xi_min() || xi_new >= curve.xi_max())
    throw GeometryError("knot_insert: new knot must lie strictly inside the parameter range");
  const std::size_t n = curve.ctrl.size();
  // Homogeneous control points (w x, w y, w).
  std::vector<std::array<double, 3>> pw(n);
  for (std::size_t i = 0; i < n; ++i)
    pw[i] = {curve.weights[i] * curve.ctrl[i][0], curve.weights[i] * curve.ctrl[i][1], curve.weights[i]};
  std::vector<std::array<double, 3>> q(n + 1);
  for (int i = 0; i <= k - p; ++i) q[static_cast<std::size_t>(i)] = pw[static_cast<std::size_t>(i)];
  for (int i = k - p + 1; i <= k - mult; ++i) {
    const double a = (xi_new - curve.knots[static_cast<std::size_t>(i)]) /
                     (curve.knots[static_cast<std::size_t>(i + p)] - curve.knots[static_cast<std::size_t>(i)]);
    for (int c = 0; c < 3; ++c)
      q[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
          a * pw[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] +
          (1.0 - a) * pw[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(c)];
  }
  for (int i = k - mult + 1; i <= static_cast<int>(n); ++i) q[static_cast<std::size_t>(i)] = pw[static_cast<std::size_t>(i - 1)];
  NurbsCurve out;
  out.degree = p;
  out.knots = curve.knots;
  out.knots.insert(out.knots.begin() + k + 1, xi_new);
  out.ctrl.resize(n + 1);
  out.weights.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    out.weights[i] = q[i][2];
    out.ctrl[i] = {q[i][0] / q[i][2], q[i][1] / q[i][2]};
  }
  return out;
}

void NurbsSurface::validate() const {
  if (n_u <= degree_u || n_v <= degree_v) throw GeometryError("nurbs surface: too few control points for the degree");
  if (ctrl.size() != static_cast<std::size_t>(n_u * n_v) || weights.size() != ctrl.size())
    throw GeometryError("nurbs surface: control net size mismatch");
  if (knots_u.size() != static_cast<std::size_t>(n_u + degree_u + 1) ||
      knots_v.size() != static_cast<std::size_t>(n_v + degree_v + 1))
    throw GeometryError("nurbs surface: knot count must equal n + p + 1 in each direction");
  for (const auto* kv : {&knots_u, &knots_v}) {
    for (std::size_t k = 1; k < kv->size(); ++k) {
      if ((*kv)[k] < (*kv)[k - 1]) throw GeometryError("nurbs surface: knots must be nondecreasing");
    }
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw GeometryError("nurbs surface: weights must be positive");
  }
}

namespace {

struct SurfaceSums {
  Vec2 a{0.0, 0.0}, au{0.0, 0.0}, av{0.0, 0.0};
  double w = 0.0, wu = 0.0, wv = 0.0;
};

SurfaceSums surface_sums(const NurbsSurface& s, double u, double v) {
  const int su = find_span(s.knots_u, s.degree_u, u);
  const int sv = find_span(s.knots_v, s.degree_v, v);
  std::vector<double> nu, dnu, nv, dnv;
  bspline_basis_d1(s.knots_u, s.degree_u, su, u, nu, dnu);
  bspline_basis_d1(s.knots_v, s.degree_v, sv, v, nv, dnv);
  SurfaceSums r;
  for (int a = 0; a <= s.degree_u; ++a) {
    for (int b = 0; b <= s.degree_v; ++b) {
      const auto k = static_cast<std::size_t>((su - s.degree_u + a) * s.n_v + (sv - s.degree_v + b));
      const double w = s.weights[k];
      const double f = nu[static_cast<std::size_t>(a)] * nv[static_cast<std::size_t>(b)];
      const double fu = dnu[static_cast<std::size_t>(a)] * nv[static_cast<std::size_t>(b)];
      const double fv = nu[static_cast<std::size_t>(a)] * dnv[static_cast<std::size_t>(b)];
      r.a = r.a + (w * f) * s.ctrl[k];
      r.au = r.au + (w * fu) * s.ctrl[k];
      r.av = r.av + (w * fv) * s.ctrl[k];
      r.w += w * f;
      r.wu += w * fu;
      r.wv += w * fv;
    }
  }
  return r;
}

}  // namespace

Vec2 NurbsSurface::eval(double u, double v) const {
  const auto s = surface_sums(*this, u, v);
  return (1.0 / s.w) * s.a;
}

std::array<double, 4> NurbsSurface::jacobian(double u, double v) const {
  const auto s = surface_sums(*this, u, v);
  const Vec2 c = (1.0 / s.w) * s.a;
  const Vec2 cu = (1.0 / s.w) * (s.au - s.wu * c);
  const Vec2 cv = (1.0 / s.w) * (s.av - s.wv * c);
  return {cu[0], cv[0], cu[1], cv[1]};
}

NurbsCurve NurbsSurface::side(int s) const {
  NurbsCurve c;
  const bool along_u = (s == 0 || s == 2);
  c.degree = along_u ? degree_u : degree_v;
  c.knots = along_u ? knots_u : knots_v;
  const int n = along_u ? n_u : n_v;
  for (int t = 0; t < n; ++t) {
    int i = 0, j = 0;
    switch (s) {
      case 0: i = t; j = 0; break;
      case 1: i = n_u - 1; j = t; break;
      case 2: i = t; j = n_v - 1; break;
      default: i = 0; j = t; break;
    }
    const auto k = static_cast<std::size_t>(i * n_v + j);
    c.ctrl.push_back(ctrl[k]);
    c.weights.push_back(weights[k]);
  }
  return c;
}

NurbsCurve unit_circle_curve() {
  const double h = std::sqrt(0.5);
  NurbsCurve c;
  c.degree = 2;
  c.knots = {0, 0, 0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75, 1, 1, 1};
  c.ctrl = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}};
  c.weights = {1, h, 1, h, 1, h, 1, h, 1};
  return c;
}

NurbsSurface unit_disc_surface() {
  const double h = std::sqrt(0.5);
  const double r2 = std::sqrt(2.0);
  NurbsSurface s;
  s.degree_u = s.degree_v = 2;
  s.knots_u = s.knots_v = {0, 0, 0, 1, 1, 1};
  s.n_u = s.n_v = 3;
  s.ctrl = {{-h, -h}, {-r2, 0}, {-h, h}, {0, -r2}, {0, 0}, {0, r2}, {h, -h}, {r2, 0}, {h, h}};
  s.weights = {1, h, 1, h, 1, h, 1, h, 1};
  return s;
}

namespace {

std::vector<Vec2> points_from(const nlohmann::json& j) {
  std::vector<Vec2> out;
  for (const auto& p : j) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return out;
}

template <class F>
auto parse_guarded(const std::string& text, F&& f) {
  try {
    return f(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw GeometryError(std::string("nurbs json: ") + e.what());
  }
}

}  // namespace

NurbsCurve curve_from_json(const std::string& text) {
  return parse_guarded(text, [](const nlohmann::json& j) {
    NurbsCurve c;
    c.degree = j.at("degree").get<int>();
    c.knots = j.at("knots").get<std::vector<double>>();
    c.ctrl = points_from(j.at("ctrl"));
    c.weights = j.contains("weights") ? j.at("weights").get<std::vector<double>>() : std::vector<double>(c.ctrl.size(), 1.0);
    c.validate();
    return c;
  });
}

NurbsSurface surface_from_json(const std::string& text) {
  return parse_guarded(text, [](const nlohmann::json& j) {
    NurbsSurface s;
    s.degree_u = j.at("degree_u").get<int>();
    s.degree_v = j.at("degree_v").get<int>();
    s.knots_u = j.at("knots_u").get<std::vector<double>>();
    s.knots_v = j.at("knots_v").get<std::vector<double>>();
    s.n_u = j.at("n_u").get<int>();
    s.n_v = j.at("n_v").get<int>();
    s.ctrl = points_from(j.at("ctrl"));
    s.weights = j.contains("weights") ? j.at("weights").get<std::vector<double>>() : std::vector<double>(s.ctrl.size(), 1.0);
    s.validate();
    return s;
  });
}

std::string to_json(const NurbsSurface& s) {
  nlohmann::json j;
  j["degree_u"] = s.degree_u;
  j["degree_v"] = s.degree_v;
  j["knots_u"] = s.knots_u;
  j["knots_v"] = s.knots_v;
  j["n_u"] = s.n_u;
  j["n_v"] = s.n_v;
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : s.ctrl) pts.push_back({p[0], p[1]});
  j["ctrl"] = pts;
  j["weights"] = s.weights;
  return j.dump();
}

}  // namespace dwrnet::geo
