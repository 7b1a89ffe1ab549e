#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "dwrnet/geometry/collocation.hpp"
#include "dwrnet/geometry/quadrature.hpp"
#include "dwrnet/problems/catalog.hpp"
#include "dwrnet/problems/metrics.hpp"
#include "dwrnet/problems/navier_stokes.hpp"
#include "dwrnet/problems/plaplace.hpp"
#include "dwrnet/problems/residual_loss.hpp"
#include "test_util.hpp"

using namespace dwrnet;
using namespace dwrnet::pde;
using dwrnet::testing::random_net;
using dwrnet::testing::random_points;

namespace {

// Largest pointwise interior and boundary residual of the exact solution.
double max_exact_residual(const Problem& pb, int nx, int ny) {
  const auto c = geo::sample_collocation(pb.domain, nx, ny);
  auto sites = interior_sites(c.interior);
  auto bnd = boundary_sites(c);
  sites.insert(sites.end(), bnd.begin(), bnd.end());
  pb.system->annotate(sites);
  double worst = 0.0;
  for (const auto& s : sites) {
    const auto u = pb.exact->jets_at(s.x);
    for (double r : pb.system->residual(s, u)) worst = std::max(worst, std::abs(r));
  }
  return worst;
}

double integrate(const geo::QuadratureRule& q, const std::function<double(const Vec2&)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * f(q.nodes[i]);
  return s;
}

}  // namespace

TEST_CASE("exact solutions have vanishing residuals") {
  CHECK(max_exact_residual(make_problem("poisson_case1"), 35, 30) < 1e-10);
  CHECK(max_exact_residual(make_problem("poisson_disc"), 20, 20) < 1e-10);
  CHECK(max_exact_residual(make_problem("plaplace_case2", {2.5, 0.05}), 35, 30) < 1e-10);
  for (double p : {2.5, 3.0, 4.0, 5.0}) {
    for (double delta : {0.0, 0.05, 0.5}) {
      CHECK(max_exact_residual(make_problem("plaplace_case3", {p, delta}), 25, 25) < 1e-10);
    }
  }
  CHECK(max_exact_residual(make_problem("ns_kovasznay_like"), 30, 30) < 1e-10);
}

TEST_CASE("Case II source formula") {
  const PLaplaceParams prm{2.5, 0.05};
  const auto exact = paraboloid_exact();
  for (const auto& x : random_points(20, 3, -0.7, 0.7)) {
    const auto u = exact->jets_at(x)[0];
    const double r2 = x[0] * x[0] + x[1] * x[1];
    const double d2 = prm.delta * prm.delta;
    const double f = (4 * d2 + 20 * r2) / std::pow(d2 + 4 * r2, 0.75);
    CHECK(plaplace_neg_div(u, prm) == doctest::Approx(f).epsilon(1e-13));
  }
}

TEST_CASE("constant field gives residual -f") {
  for (const PLaplaceParams prm : {PLaplaceParams{2.0, 0.0}, PLaplaceParams{3.0, 0.0}, PLaplaceParams{2.5, 0.1}}) {
    PLaplace sys(prm, [](const Vec2&) { return 1.75; }, [](const Vec2&, geo::BcTag) { return 0.0; });
    std::vector<Site> sites = interior_sites(std::vector<Vec2>{{0.2, 0.3}});
    sys.annotate(sites);
    const auto c = SpatialJet2::constant(4.0);
    CHECK(sys.residual(sites[0], std::span<const SpatialJet2>(&c, 1))[0] == -1.75);
  }
}

TEST_CASE("p-Laplace Frechet derivative matches the Gateaux difference") {
  auto un = random_net({2, 8, 8, 1}, ad::Activation::tanh, 5);
  auto zn = random_net({2, 6, 1}, ad::Activation::swish, 6);
  for (const PLaplaceParams prm : {PLaplaceParams{2.0, 0.0}, PLaplaceParams{2.5, 0.05}, PLaplaceParams{4.0, 0.0}}) {
    for (const auto& x : random_points(10, 7)) {
      const auto u = un.jet_eval(x)[0], z = zn.jet_eval(x)[0];
      const double eps = 1e-5;
      const double fd = -(plaplace_neg_div(u + eps * z, prm) - plaplace_neg_div(u - eps * z, prm)) / (2 * eps);
      const double an = plaplace_frechet(u, z, prm);
      CHECK(std::abs(an - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
      const double fd_u = -(plaplace_neg_div((1 + eps) * u, prm) - plaplace_neg_div((1 - eps) * u, prm)) / (2 * eps);
      CHECK(std::abs(plaplace_frechet(u, u, prm) - fd_u) <= 1e-6 * std::max(1.0, std::abs(fd_u)));
    }
  }
  // Linear case: A'(u) z = lap z for any u.
  const auto u = un.jet_eval({0.1, 0.2})[0], z = zn.jet_eval({0.1, 0.2})[0];
  CHECK(plaplace_frechet(u, z, PLaplaceParams{2.0, 0.0}) == z.laplacian());
}

TEST_CASE("Navier-Stokes exact pair is divergence free and rest state is a solution") {
  const auto exact = ns_exact();
  for (const auto& x : random_points(50, 9)) {
    const auto w = exact->jets_at(x);
    CHECK(std::abs(w[0].grad[0] + w[1].grad[1]) < 1e-13);
  }
  const NSParams prm;
  SpatialJet2 rest[3];
  rest[2] = SpatialJet2::constant(2.0);
  const double f[2] = {0.0, 0.0};
  double r[3];
  ns_residual<double>(rest, prm, f, r);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == 0.0);
  CHECK(r[2] == 0.0);
  // Continuity does not see the pressure.
  auto w = exact->jets_at({0.3, 0.8});
  ns_residual<double>(w, prm, f, r);
  const double div = r[2];
  w[2] = 7.0 * w[2];
  ns_residual<double>(w, prm, f, r);
  CHECK(r[2] == div);
  CHECK(prm.c_re() * prm.nu * prm.re == doctest::Approx(1.0));
}

TEST_CASE("Navier-Stokes adjoint operator is the transpose of the linearization") {
  // Perturbations and adjoint fields vanish on the boundary of the unit square.
  auto bubble = [](const SpatialJet2& X, const SpatialJet2& Y) { return X * (1.0 - X) * Y * (1.0 - Y); };
  AnalyticField base(3, [](const SpatialJet2& X, const SpatialJet2& Y, std::span<SpatialJet2> o) {
    o[0] = sin(2.0 * X) * cos(Y);
    o[1] = X * Y * Y + 0.3;
    o[2] = cos(X * Y);
  });
  AnalyticField dw(3, [&](const SpatialJet2& X, const SpatialJet2& Y, std::span<SpatialJet2> o) {
    o[0] = bubble(X, Y) * sin(X + 2.0 * Y);
    o[1] = bubble(X, Y) * cos(3.0 * X - Y);
    o[2] = X * X - 0.5 * Y;
  });
  AnalyticField adj(3, [&](const SpatialJet2& X, const SpatialJet2& Y, std::span<SpatialJet2> o) {
    o[0] = bubble(X, Y) * (1.0 + X * X);
    o[1] = bubble(X, Y) * exp(Y - X);
    o[2] = sin(X) + Y * Y;
  });
  const NSParams prm{0.05, 40.0};
  const auto q = geo::gauss_quadrature(geo::Domain::rectangle(0.0, 1.0, 0.0, 1.0), 10, 4);
  const double zero[3] = {0.0, 0.0, 0.0};
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto w = base.jets_at(q.nodes[i]), d = dw.jets_at(q.nodes[i]), z = adj.jets_at(q.nodes[i]);
    // The residual is quadratic in w, so the central difference is exact.
    const double eps = 1e-3;
    std::vector<SpatialJet2> wp(3), wm(3);
    for (int k = 0; k < 3; ++k) {
      wp[k] = w[k] + eps * d[k];
      wm[k] = w[k] - eps * d[k];
    }
    double rp[3], rm[3];
    ns_residual<double>(wp, prm, zero, rp);
    ns_residual<double>(wm, prm, zero, rm);
    double lin[3];
    for (int k = 0; k < 3; ++k) lin[k] = (rp[k] - rm[k]) / (2 * eps);
    lhs += q.weights[i] * (z[0].value * lin[0] + z[1].value * lin[1] + z[2].value * lin[2]);
    // Printed adjoint with the multiplier sign flipped: +grad(-pi) = -grad pi.
    std::vector<SpatialJet2> zz{z[0], z[1], -z[2]};
    double a[3];
    ns_adjoint_residual<double>(w, zz, prm, zero, a);
    rhs += q.weights[i] * (d[0].value * a[0] + d[1].value * a[1] - d[2].value * a[2]);
  }
  CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  CHECK(std::abs(lhs) > 1e-3);
}

TEST_CASE("Stokes limit of the adjoint residual") {
  SpatialJet2 u[3];
  const auto zn = random_net({2, 5, 3}, ad::Activation::tanh, 8);
  const auto z = zn.jet_eval({0.2, -0.4});
  const NSParams prm;
  const double j[3] = {0.5, -0.25, 0.0};
  double r[3];
  ns_adjoint_residual<double>(std::span<const SpatialJet2>(u, 3), z, prm, j, r);
  CHECK(r[0] == doctest::Approx(-prm.nu * z[0].laplacian() + z[2].grad[0] - 0.5).epsilon(1e-14));
  CHECK(r[1] == doctest::Approx(-prm.nu * z[1].laplacian() + z[2].grad[1] + 0.25).epsilon(1e-14));
}

TEST_CASE("residual loss definition") {
  auto sys = std::make_shared<PLaplace>(PLaplaceParams{2.0, 0.0}, [](const Vec2&) { return -3.0; },
                                        [](const Vec2&, geo::BcTag) { return 0.0; });
  nn::Mlp zero({2, 4, 1}, {ad::Activation::tanh}, {-1.0, -1.0}, {1.0, 1.0});
  geo::CollocationSet c;
  c.interior = {{0.1, 0.2}};
  geo::BoundaryPoint b;
  b.x = {1.0, 0.0};
  b.normal = {1.0, 0.0};
  b.segment = 0;
  c.boundary = {b};
  CollocationLoss loss(zero, sys, c);
  CHECK(loss.value(zero.theta()) == 9.0);

  // A linear network reproducing a harmonic solution has zero loss.
  auto lin = std::make_shared<PLaplace>(PLaplaceParams{2.0, 0.0}, [](const Vec2&) { return 0.0; },
                                        [](const Vec2& x, geo::BcTag) { return x[0]; });
  nn::Mlp id({2, 1}, {}, {-1.0, -1.0}, {1.0, 1.0});
  id.set_theta({1.0, 0.0, 0.0});
  CollocationLoss l2(id, lin, geo::sample_collocation(geo::Domain::unit_disc(), 10, 10));
  CHECK(l2.value(id.theta()) < 1e-30);
}

TEST_CASE("residual loss is invariant under point permutation") {
  const auto pb = make_problem("poisson_case1");
  auto net = random_net({2, 10, 10, 1}, ad::Activation::swish, 11);
  auto c = geo::sample_collocation(pb.domain, 20, 20);
  CollocationLoss a(net, pb.system, c);
  std::mt19937_64 rng(12);
  std::shuffle(c.interior.begin(), c.interior.end(), rng);
  std::shuffle(c.boundary.begin(), c.boundary.end(), rng);
  CollocationLoss b(net, pb.system, c);
  CHECK(std::abs(a.value(net.theta()) - b.value(net.theta())) <= 1e-12);
}

TEST_CASE("relative L2 definition") {
  const auto exact = case1_exact();
  const auto pts = geo::grid_points(geo::Domain::quarter_disc_pair(), 40, 40);
  CHECK(relative_l2(*exact, *exact, pts) == 0.0);
  AnalyticField zero(1, [](const SpatialJet2&, const SpatialJet2&, std::span<SpatialJet2> o) { o[0] = SpatialJet2{}; });
  CHECK(relative_l2(zero, *exact, pts) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(relative_l2(*exact, zero, pts), NumericalError);
}

TEST_CASE("residual error metric of the manufactured Poisson adjoint") {
  // -lap z = 1 on the unit disc with z = 0 on the circle: z = (1 - r^2) / 4.
  const auto pb = make_problem("poisson_disc");
  AdjointRhs rhs = AdjointRhs::zero(1);
  rhs.interior = [](const Vec2&, std::span<double> j) { j[0] = 1.0; };
  auto adj = pb.system->adjoint(pb.exact, rhs);
  AnalyticField z(1, [](const SpatialJet2& X, const SpatialJet2& Y, std::span<SpatialJet2> o) {
    o[0] = 0.25 * (1.0 - X * X - Y * Y);
  });
  const auto pts = geo::grid_points(pb.domain, 30, 30);
  CHECK(residual_error_metric(*adj, z, pts) < 1e-10);
  AnalyticField zero(1, [](const SpatialJet2&, const SpatialJet2&, std::span<SpatialJet2> o) { o[0] = SpatialJet2{}; });
  CHECK(residual_error_metric(*adj, zero, pts) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("unknown problems and invalid parameters are configuration errors") {
  CHECK_THROWS_AS(make_problem("heat"), ConfigError);
  CHECK_THROWS_AS(make_problem("plaplace_case2", {1.5, 0.0}), ConfigError);
  CHECK_THROWS_AS(make_problem("plaplace_case2", {2.5, -0.1}), ConfigError);
  CHECK_THROWS_AS(make_problem("ns_kovasznay_like", {2.0, 0.0, -1.0, 100.0}), ConfigError);
  const auto names = problem_names();
  CHECK(std::find(names.begin(), names.end(), "subdomain_functionals") != names.end());
}

TEST_CASE("quadrature of the manufactured NS source is finite") {
  const auto pb = make_problem("ns_kovasznay_like");
  const auto q = geo::gauss_quadrature(pb.domain, 6, 2);
  const double area = integrate(q, [](const Vec2&) { return 1.0; });
  CHECK(area == doctest::Approx(3.0));
}
