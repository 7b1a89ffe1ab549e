#include <doctest.h>

#include <numbers>
#include <random>

#include "dwrnet/geometry/collocation.hpp"
#include "dwrnet/geometry/gauss.hpp"
#include "dwrnet/geometry/nurbs.hpp"
#include "dwrnet/geometry/quadrature.hpp"

using namespace dwrnet;
using namespace dwrnet::geo;
using std::numbers::pi;

namespace {

double integrate(const QuadratureRule& q, const std::function<double(const Vec2&)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * f(q.nodes[i]);
  return s;
}

}  // namespace

TEST_CASE("B-spline basis examples") {
  const std::vector<double> k0{0.0, 1.0, 2.0};
  CHECK(bspline_basis(k0, 0, find_span(k0, 0, 0.5), 0.5) == std::vector<double>{1.0});
  const std::vector<double> k1{0.0, 0.0, 1.0, 2.0, 2.0};
  const int s1 = find_span(k1, 1, 1.0);
  const auto b1 = bspline_basis(k1, 1, s1, 1.0);
  CHECK(b1[0] == doctest::Approx(1.0));
  CHECK(b1[1] == doctest::Approx(0.0));
  const std::vector<double> k2{0, 0, 0, 1, 1, 1};
  const auto b2 = bspline_basis(k2, 2, find_span(k2, 2, 0.5), 0.5);
  CHECK(b2[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(b2[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(b2[2] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(find_span(k2, 2, 1.5), GeometryError);
}

TEST_CASE("NURBS circle is exact and its basis is a partition of unity") {
  const auto c = unit_circle_curve();
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double xi = c.xi_min() + (c.xi_max() - c.xi_min()) * i / 99.0;
    worst = std::max(worst, std::abs(norm(c.eval(xi)) - 1.0));
  }
  CHECK(worst < 1e-12);
  const auto p0 = c.eval(c.xi_min());
  CHECK(p0[0] == doctest::Approx(c.ctrl[0][0]).epsilon(1e-15));
  CHECK(p0[1] == doctest::Approx(c.ctrl[0][1]).epsilon(1e-15));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(c.xi_min(), c.xi_max());
  double pu = 0.0;
  for (int i = 0; i < 1000; ++i) {
    double s = 0.0;
    for (double r : c.rational_basis(u(rng))) s += r;
    pu = std::max(pu, std::abs(s - 1.0));
  }
  CHECK(pu < 1e-12);
}

TEST_CASE("equal weights reduce NURBS to the B-spline") {
  NurbsCurve c;
  c.degree = 2;
  c.knots = {0, 0, 0, 0.5, 1, 1, 1};
  c.ctrl = {{0, 0}, {1, 2}, {2, -1}, {3, 0}};
  c.weights = {2.5, 2.5, 2.5, 2.5};
  for (double xi : {0.1, 0.4, 0.77}) {
    const int span = find_span(c.knots, 2, xi);
    const auto n = bspline_basis(c.knots, 2, span, xi);
    Vec2 p{0, 0};
    for (int k = 0; k <= 2; ++k) p = p + n[static_cast<std::size_t>(k)] * c.ctrl[static_cast<std::size_t>(span - 2 + k)];
    CHECK(c.eval(xi)[0] == doctest::Approx(p[0]).epsilon(1e-14));
    CHECK(c.eval(xi)[1] == doctest::Approx(p[1]).epsilon(1e-14));
  }
}

TEST_CASE("knot insertion preserves the curve") {
  const auto c = unit_circle_curve();
  const double xi_new = c.xi_min() + 0.37 * (c.xi_max() - c.xi_min());
  const auto d = knot_insert(c, xi_new);
  CHECK(d.ctrl.size() == c.ctrl.size() + 1);
  double worst = 0.0, radius = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double xi = c.xi_min() + (c.xi_max() - c.xi_min()) * i / 199.0;
    const auto a = c.eval(xi), b = d.eval(xi);
    worst = std::max(worst, norm(a - b));
    radius = std::max(radius, std::abs(norm(b) - 1.0));
  }
  CHECK(worst < 1e-10);
  CHECK(radius < 1e-10);
  CHECK(norm(d.eval(xi_new) - c.eval(xi_new)) < 1e-14);

  NurbsCurve line;
  line.degree = 1;
  line.knots = {0, 0, 1, 1};
  line.ctrl = {{0, 0}, {2, 4}};
  line.weights = {1, 1};
  const auto l2 = knot_insert(line, 0.25);
  REQUIRE(l2.ctrl.size() == 3);
  CHECK(l2.ctrl[1][0] == doctest::Approx(0.5));
  CHECK(l2.ctrl[1][1] == doctest::Approx(1.0));
}

TEST_CASE("invalid NURBS data is a geometry error") {
  auto c = unit_circle_curve();
  c.weights[2] = -1.0;
  CHECK_THROWS_AS(c.validate(), GeometryError);
  auto d = unit_circle_curve();
  d.knots[3] = 0.9 * d.knots[2] - 1.0;
  CHECK_THROWS_AS(d.validate(), GeometryError);
}

TEST_CASE("NURBS JSON round trip") {
  const auto s = unit_disc_surface();
  const auto back = surface_from_json(to_json(s));
  CHECK(back.knots_u == s.knots_u);
  CHECK(back.weights == s.weights);
  for (double u : {0.1, 0.5, 0.9}) {
    CHECK(norm(back.eval(u, 0.3) - s.eval(u, 0.3)) == 0.0);
  }
}

TEST_CASE("Gauss-Legendre exactness") {
  for (int n = 1; n <= 10; ++n) {
    const auto g = gauss_legendre(n, 0.0, 2.0);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
      CHECK(s == doctest::Approx(std::pow(2.0, p + 1) / (p + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("quadrature on the two-quarter-disc domain") {
  const auto d = Domain::quarter_disc_pair();
  const auto q = gauss_quadrature(d, 8, 2);
  CHECK(std::abs(q.total_weight() - pi / 2) < 1e-10);
  for (double w : q.weights) CHECK(w > 0.0);
  CHECK(std::abs(integrate(q, [](const Vec2& x) { return 1 - x[0] * x[0] - x[1] * x[1]; }) - pi / 4) < 1e-8);
  CHECK(std::abs(integrate(q, [](const Vec2& x) { return x[0] * x[1] * (1 - x[0] * x[0] - x[1] * x[1]); }) + 1.0 / 12) <
        1e-8);
}

TEST_CASE("quadrature on the frame and the NURBS disc") {
  const auto frame = Domain::ns_frame();
  CHECK(std::abs(gauss_quadrature(frame, 4).total_weight() - 3.0) < 1e-12);
  const auto disc = Domain::unit_disc();
  const auto q = gauss_quadrature(disc, 10, 4);
  CHECK(std::abs(q.total_weight() - pi) < 1e-8);
  CHECK(std::abs(integrate(q, [](const Vec2& x) { return x[0] * x[0]; }) - pi / 4) < 1e-8);
}

TEST_CASE("boundary quadrature") {
  const auto d = Domain::quarter_disc_pair();
  CHECK(std::abs(boundary_quadrature(d, std::vector<std::string>{"arc"}, 8).total_weight() - pi) < 1e-10);
  const auto r = Domain::rectangle(0.0, 1.0, 0.0, 1.0);
  const auto bottom = boundary_quadrature(r, std::size_t{0}, 4);
  CHECK(std::abs(integrate(bottom, [](const Vec2& x) { return x[0]; }) - 0.5) < 1e-12);
  for (std::size_t s = 0; s < d.segments().size(); ++s) {
    CHECK(std::abs(boundary_quadrature(d, s, 6).total_weight() - d.segments()[s].length) < 1e-10);
  }
}

TEST_CASE("flux of the Case I solution through the boundary") {
  // U = xy(1 - x^2 - y^2), grad U = (y - 3x^2 y - y^3, x - x^3 - 3x y^2).
  // Divergence theorem: int_Omega Lap U = int -12xy = -12 * (-1/4) = 3.
  const auto d = Domain::quarter_disc_pair();
  const auto q = boundary_quadrature(d, std::vector<std::string>{}, 10);
  double flux = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double x = q.nodes[i][0], y = q.nodes[i][1];
    const Vec2 g{y - 3 * x * x * y - y * y * y, x - x * x * x - 3 * x * y * y};
    flux += q.weights[i] * dot(g, q.normals[i]);
  }
  CHECK(std::abs(flux - 3.0) < 1e-6);
}

TEST_CASE("subdomain restriction") {
  const auto disc = Domain::unit_disc();
  const auto right = subdomain_restrict(disc, 1.0, 0.0);
  CHECK(right.inside({0.5, 0.1}));
  CHECK_FALSE(right.inside({-0.5, 0.1}));
  CHECK(std::abs(gauss_quadrature(right, 10, 4).total_weight() - pi / 2) < 1e-8);

  const auto frame = Domain::ns_frame();
  const double a = 0.75, b = 0.5;
  const double area_pos = gauss_quadrature(subdomain_restrict(frame, a, b), 8, 2).total_weight();
  const double area_neg = gauss_quadrature(subdomain_restrict(frame, -a, -b), 8, 2).total_weight();
  CHECK(std::abs(area_pos + area_neg - 3.0) < 1e-10);

  // Monte Carlo oracle on the bounding square.
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 2000000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const Vec2 x{u(rng), u(rng)};
    const double m = std::max(std::abs(x[0]), std::abs(x[1]));
    if (m < 1.0 && m > 0.5 && a * x[0] > b * x[1]) ++hits;
  }
  const double p = static_cast<double>(hits) / n;
  const double sigma = 4.0 * std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(area_pos - 4.0 * p) < 3.0 * sigma);
  CHECK_THROWS_AS(subdomain_restrict(frame, 0.0, 0.0), GeometryError);
}

TEST_CASE("collocation sampling") {
  const auto sq = Domain::rectangle(0.0, 1.0, 0.0, 1.0);
  CHECK(grid_points(sq, 3, 3).size() == 1);

  const auto d = Domain::quarter_disc_pair();
  const auto c = sample_collocation(d, 35, 30);
  int brute = 0;
  for (int j = 0; j < 30; ++j) {
    for (int i = 0; i < 35; ++i) {
      const double x = -1.0 + 2.0 * i / 34.0, y = -1.0 + 2.0 * j / 29.0;
      if (x * x + y * y < 1.0 && x * y < 0.0) ++brute;
    }
  }
  CHECK(static_cast<int>(c.n_int()) == brute);
  for (const auto& p : c.interior) CHECK(d.inside(p));
  for (const auto& b : c.boundary) {
    CHECK(d.boundary_residual(b.x) < 1e-10);
    CHECK(std::abs(norm(b.normal) - 1.0) < 1e-12);
    if (d.segments()[static_cast<std::size_t>(b.segment)].group == "arc") {
      CHECK(norm(b.normal - b.x) < 1e-10);
    }
  }
  const auto again = sample_collocation(d, 35, 30);
  CHECK(again.interior == c.interior);
  CHECK_THROWS(sample_collocation(d, 1, 30));
}

TEST_CASE("corner points take the Dirichlet tag") {
  auto d = Domain::quarter_disc_pair();
  d.set_bc("x_axis", BcTag::neumann_x);
  d.set_bc("y_axis", BcTag::neumann_y);
  const auto c = sample_collocation(d, 20, 20);
  bool found = false;
  for (const auto& b : c.boundary) {
    if (std::abs(b.x[0] + 1.0) < 1e-12 && std::abs(b.x[1]) < 1e-12) {
      found = true;
      CHECK(b.tag == BcTag::dirichlet);
    }
  }
  CHECK(found);
  CHECK_THROWS_AS(d.set_bc("nowhere", BcTag::dirichlet), ConfigError);
}
