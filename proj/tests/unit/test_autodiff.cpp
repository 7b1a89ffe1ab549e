#include <doctest.h>

#include "dwrnet/autodiff/activation.hpp"
#include "dwrnet/autodiff/jet.hpp"
#include "dwrnet/autodiff/tape.hpp"
#include "dwrnet/geometry/collocation.hpp"
#include "dwrnet/problems/catalog.hpp"
#include "dwrnet/problems/residual_loss.hpp"
#include "test_util.hpp"

using namespace dwrnet;
using dwrnet::testing::central_diff;
using dwrnet::testing::random_net;
using dwrnet::testing::random_points;
using dwrnet::testing::rel_err;

namespace {

double frob_rel(const ad::SpatialJet2& a, const std::array<std::array<double, 2>, 2>& h) {
  double num = 0.0, den = 0.0;
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      num += std::pow(a.hess[k][l] - h[k][l], 2);
      den += h[k][l] * h[k][l];
    }
  }
  return std::sqrt(num / std::max(den, 1e-20));
}

// Ten interior points of the unit disc plus three on its circle.
geo::CollocationSet small_disc_set() {
  geo::CollocationSet c;
  for (const auto& p : random_points(7, 5, -0.6, 0.6)) c.interior.push_back(p);
  for (double t : {0.3, 2.1, 4.4}) {
    geo::BoundaryPoint b;
    b.x = {std::cos(t), std::sin(t)};
    b.normal = b.x;
    b.segment = 0;
    c.boundary.push_back(b);
  }
  c.nx = c.ny = 3;
  c.spacing = 0.5;
  return c;
}

}  // namespace

TEST_CASE("loss_grad of sum of squares") {
  std::vector<double> theta{1.0, 2.0};
  auto vg = ad::loss_grad(
      [](std::span<const ad::Var> t) {
        ad::Var s = 0.0;
        for (const auto& v : t) s += ad::square(v);
        return s;
      },
      theta);
  CHECK(vg.value == 5.0);
  CHECK(vg.grad[0] == 2.0);
  CHECK(vg.grad[1] == 4.0);
}

TEST_CASE("gradient of an unused parameter is zero") {
  std::vector<double> theta{0.7, -1.3, 2.5};
  auto vg = ad::loss_grad([](std::span<const ad::Var> t) { return t[0] * t[0] + ad::tanh(t[1]); }, theta);
  CHECK(vg.grad[2] == 0.0);
  CHECK(vg.grad[0] == doctest::Approx(1.4));
}

TEST_CASE("tape replay and single-visit reverse sweep") {
  ad::Tape tape;
  ad::Var a = tape.leaf(0.4), b = tape.leaf(-1.1);
  ad::Var y = ad::swish(a * b) + ad::exp(a) / (1.0 + ad::square(b)) - ad::smooth_abs(b, 1e-3);
  const auto recorded = tape.values();
  const double leaves[2] = {0.4, -1.1};
  const auto replayed = tape.replay(leaves);
  REQUIRE(replayed.size() == recorded.size());
  for (std::size_t i = 0; i < recorded.size(); ++i) CHECK(replayed[i] == recorded[i]);
  CHECK(tape.backward(y) == tape.size());
  const double h = 1e-6;
  auto f = [](double x0, double x1) {
    const double s = x0 * x1;
    return s / (1.0 + std::exp(-s)) + std::exp(x0) / (1.0 + x1 * x1) - std::sqrt(x1 * x1 + 1e-6);
  };
  CHECK(tape.adjoint(a) == doctest::Approx((f(0.4 + h, -1.1) - f(0.4 - h, -1.1)) / (2 * h)).epsilon(1e-8));
  CHECK(tape.adjoint(b) == doctest::Approx((f(0.4, -1.1 + h) - f(0.4, -1.1 - h)) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("jet of a constant seed has zero derivatives") {
  auto c = ad::SpatialJet2::constant(3.0);
  auto t = tanh(c);
  CHECK(t.grad[0] == 0.0);
  CHECK(t.grad[1] == 0.0);
  CHECK(t.hess[0][1] == 0.0);
  CHECK(t.hess[0][1] == t.hess[1][0]);
}

TEST_CASE("jet linearity and product rule") {
  auto u = random_net({2, 6, 6, 1}, ad::Activation::tanh, 1);
  auto v = random_net({2, 5, 1}, ad::Activation::swish, 2);
  for (const auto& x : random_points(10, 3)) {
    const auto ju = u.jet_eval(x)[0], jv = v.jet_eval(x)[0];
    const auto lin = 2.0 * ju + (-3.0) * jv;
    const auto prod = ju * jv;
    for (int k = 0; k < 2; ++k) {
      CHECK(lin.grad[k] == doctest::Approx(2.0 * ju.grad[k] - 3.0 * jv.grad[k]).epsilon(1e-15));
      CHECK(std::abs(prod.grad[k] - (ju.value * jv.grad[k] + jv.value * ju.grad[k])) < 1e-15);
      CHECK(prod.hess[k][1 - k] == doctest::Approx(prod.hess[1 - k][k]).epsilon(1e-15));
    }
  }
}

TEST_CASE("activation derivatives match finite differences") {
  for (auto act : {ad::Activation::tanh, ad::Activation::sigmoid, ad::Activation::swish}) {
    for (double t : {-2.3, -0.4, 0.0, 0.7, 3.1}) {
      const double h = 1e-5;
      const auto d = ad::activate(act, t), dp = ad::activate(act, t + h), dm = ad::activate(act, t - h);
      CHECK(d.d1 == doctest::Approx((dp.f - dm.f) / (2 * h)).epsilon(1e-8));
      CHECK(d.d2 == doctest::Approx((dp.d1 - dm.d1) / (2 * h)).epsilon(1e-8));
      CHECK(d.d3 == doctest::Approx((dp.d2 - dm.d2) / (2 * h)).epsilon(1e-7));
    }
  }
}

TEST_CASE("sigmoid and swish stay finite for extreme arguments") {
  for (double t : {-800.0, 800.0}) {
    for (auto act : {ad::Activation::sigmoid, ad::Activation::swish}) {
      const auto d = ad::activate(act, t);
      CHECK(std::isfinite(d.f));
      CHECK(std::isfinite(d.d1));
      CHECK(std::isfinite(d.d2));
    }
  }
}

TEST_CASE("identity and single-neuron networks") {
  nn::Mlp id({2, 1}, {}, {-1.0, -1.0}, {1.0, 1.0});
  id.set_theta({1.0, 0.0, 0.0});
  const auto j = id.jet_eval({3.0, 4.0})[0];
  CHECK(j.value == 3.0);
  CHECK(j.grad[0] == 1.0);
  CHECK(j.grad[1] == 0.0);
  CHECK(j.hess[0][0] == 0.0);

  nn::Mlp one({2, 1, 1}, {ad::Activation::tanh}, {-1.0, -1.0}, {1.0, 1.0});
  one.set_theta({1.0, 0.0, 0.0, 1.0, 0.0});
  const auto t = one.jet_eval({0.0, 0.0})[0];
  CHECK(t.value == 0.0);
  CHECK(t.grad[0] == 1.0);
  CHECK(t.grad[1] == 0.0);
  CHECK(t.hess[0][0] == 0.0);
}

TEST_CASE("network Hessian matches finite differences of the gradient") {
  auto net = random_net({2, 30, 1}, ad::Activation::tanh, 7);
  const double h = 1e-4;
  for (const auto& x : random_points(10, 8)) {
    const auto j = net.jet_eval(x)[0];
    std::array<std::array<double, 2>, 2> fd{};
    for (int l = 0; l < 2; ++l) {
      Vec2 xp = x, xm = x;
      xp[l] += h;
      xm[l] -= h;
      const auto gp = net.jet_eval(xp)[0].grad, gm = net.jet_eval(xm)[0].grad;
      for (int k = 0; k < 2; ++k) fd[k][l] = (gp[k] - gm[k]) / (2 * h);
    }
    CHECK(frob_rel(j, fd) < 1e-5);
  }
}

TEST_CASE("Poisson collocation loss gradient matches central differences") {
  auto problem = pde::make_problem("poisson_disc");
  auto net = random_net({2, 8, 8, 1}, ad::Activation::tanh, 21);
  auto colloc = small_disc_set();
  for (auto kind : {kernels::KernelKind::serial, kernels::KernelKind::omp}) {
    pde::CollocationLoss loss(net, problem.system, colloc, kind);
    REQUIRE(loss.n_int() + loss.n_bnd() == 10);
    const auto vg = loss.value_grad(net.theta());
    auto f = [&](std::span<const double> t) { return loss.value(t); };
    double worst = 0.0;
    for (std::size_t k = 0; k < net.num_params(); ++k) {
      const double fd = central_diff(f, net.theta(), k, 1e-5);
      worst = std::max(worst, std::abs(vg.grad[k] - fd) / (std::abs(fd) + 1e-9));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("non-finite residual names the collocation point") {
  auto problem = pde::make_problem("poisson_disc");
  auto net = random_net({2, 4, 1}, ad::Activation::tanh, 3);
  ParamVector theta = net.theta();
  theta[0] = std::numeric_limits<double>::quiet_NaN();
  auto colloc = small_disc_set();
  pde::CollocationLoss loss(net, problem.system, colloc);
  try {
    loss.value_grad(theta);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.point_index() == 0);
    CHECK(std::string(e.what()).find("collocation point 0") != std::string::npos);
  }
}

TEST_CASE("evaluation is deterministic") {
  auto problem = pde::make_problem("poisson_disc");
  auto net = random_net({2, 8, 8, 1}, ad::Activation::swish, 4);
  auto colloc = small_disc_set();
  pde::CollocationLoss loss(net, problem.system, colloc);
  const auto a = loss.value_grad(net.theta());
  const auto b = loss.value_grad(net.theta());
  CHECK(a.value == b.value);
  CHECK(a.grad == b.grad);
  CHECK(rel_err(a.value, b.value) == 0.0);
}
