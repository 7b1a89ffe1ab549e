#include <doctest.h>

#include <numbers>

#include "dwrnet/goals/combined.hpp"
#include "dwrnet/problems/catalog.hpp"
#include "test_util.hpp"

using namespace dwrnet;
using namespace dwrnet::goals;
using dwrnet::testing::random_net;

namespace {

// a + c * b
class SumField final : public pde::Field {
 public:
  SumField(const pde::Field& a, const pde::Field& b, double c) : a_(a), b_(b), c_(c) {}
  int n_components() const override { return a_.n_components(); }
  void jets(std::span<const Vec2> points, std::span<SpatialJet2> out) const override {
    const auto ja = a_.jets(points);
    const auto jb = b_.jets(points);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = ja[i] + c_ * jb[i];
  }
  using Field::jets;

 private:
  const pde::Field& a_;
  const pde::Field& b_;
  double c_;
};

GoalEvaluator case1_evaluator() { return GoalEvaluator(geo::Domain::quarter_disc_pair(), 10, 4, 0.05); }

}  // namespace

TEST_CASE("Case I functionals of the exact solution") {
  auto ev = case1_evaluator();
  const auto u = pde::case1_exact();
  CHECK(ev.evaluate(domain_integral("J_mean"), *u) == doctest::Approx(-1.0 / 12.0).epsilon(1e-8));
  CHECK(std::abs(ev.evaluate(boundary_flux("J_flux"), *u) - 3.0) < 1e-6);
  CHECK(ev.evaluate(domain_integral("J_chi", 0, Weight::upper_ramp), *u) == doctest::Approx(-4.0 / 105.0).epsilon(1e-10));
  // Divergence theorem on the same rules: int_Gamma du/dn = int_Omega lap u = -12 int xy.
  pde::AnalyticField xy(1, [](const SpatialJet2& X, const SpatialJet2& Y, std::span<SpatialJet2> o) { o[0] = X * Y; });
  CHECK(ev.evaluate(domain_integral("xy"), xy) == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("Case II functionals of the exact solution") {
  auto ev = case1_evaluator();
  const auto u = pde::paraboloid_exact();
  CHECK(ev.evaluate(point_value("J1", {{0.5, -0.5}}), *u) == 0.5);
  CHECK(std::abs(ev.evaluate(domain_integral("J2"), *u) - std::numbers::pi / 4.0) < 1e-8);
  CHECK(std::abs(ev.evaluate(boundary_flux("J3"), *u) + 2.0 * std::numbers::pi) < 1e-6);
}

TEST_CASE("point values outside the domain are rejected") {
  const auto J = point_value("bad", {{0.5, 0.5}});
  CHECK_THROWS_AS(J.validate(geo::Domain::quarter_disc_pair(), 1), FunctionalError);
  CHECK_NOTHROW(point_value("ok", {{0.5, -0.5}}).validate(geo::Domain::quarter_disc_pair(), 1));
  const auto deep = product("p3", product("p2", domain_integral("a"), product("p1", domain_integral("b"), domain_integral("c"))),
                            domain_integral("d"));
  CHECK_THROWS_AS(deep.validate(geo::Domain::quarter_disc_pair(), 1), FunctionalError);
}

TEST_CASE("linear functionals are additive") {
  auto ev = case1_evaluator();
  auto a = random_net({2, 6, 1}, ad::Activation::tanh, 81);
  auto b = random_net({2, 6, 1}, ad::Activation::swish, 82);
  pde::NetworkField fa(a), fb(b);
  SumField sum(fa, fb, 1.0);
  for (const auto& J : {domain_integral("m"), boundary_flux("f"), point_value("p", {{-0.3, 0.4}}),
                        domain_integral("c", 0, Weight::upper_ramp)}) {
    const double lhs = ev.evaluate(J, sum);
    const double rhs = ev.evaluate(J, fa) + ev.evaluate(J, fb);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("product derivatives match central differences") {
  auto ev = case1_evaluator();
  const auto u = pde::case1_exact();
  const auto flux = boundary_flux("J_flux");
  const auto mean = domain_integral("J_mean");
  const auto chi = domain_integral("J_chi", 0, Weight::upper_ramp);
  for (std::uint64_t seed : {91, 92, 93}) {
    pde::NetworkField phi(random_net({2, 8, 1}, ad::Activation::tanh, seed));
    for (const auto& J : {product("J1", flux, chi), product("J2", mean, chi), product("J3", mean, flux)}) {
      const double eps = 1e-5;
      const double fd = (ev.evaluate(J, SumField(*u, phi, eps)) - ev.evaluate(J, SumField(*u, phi, -eps))) / (2 * eps);
      const double an = ev.directional(J, *u, phi);
      CHECK(std::abs(an - fd) < 1e-5 * std::abs(fd));
    }
  }
}

TEST_CASE("adjoint densities") {
  auto ev = case1_evaluator();
  const auto pb = pde::make_problem("poisson_case1");
  auto net = std::make_shared<pde::NetworkField>(random_net({2, 5, 1}, ad::Activation::tanh, 95));
  double j[1];
  const auto mean = ev.derivative(domain_integral("J_mean"), net, *pb.system);
  for (const auto& x : dwrnet::testing::random_points(10, 96, -0.5, 0.5)) {
    j[0] = 0.0;
    mean.interior(x, j);
    CHECK(j[0] == 1.0);
  }
  // Strictly positive integrand: the smoothed sign is inert.
  pde::AnalyticField pos(1, [](const SpatialJet2& X, const SpatialJet2&, std::span<SpatialJet2> o) { o[0] = 2.0 + X; });
  auto posp = std::make_shared<pde::AnalyticField>(pos);
  const auto ab = ev.derivative(abs_domain_integral("J_abs", 0, 0.7), posp, *pb.system);
  j[0] = 0.0;
  ab.interior({-0.3, 0.4}, j);
  CHECK(j[0] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(ev.evaluate(abs_domain_integral("J_abs", 0, 0.7), pos) ==
        doctest::Approx(0.7 * ev.evaluate(domain_integral("m"), pos)).epsilon(1e-12));
}

TEST_CASE("mollified point value has unit mass") {
  auto ev = case1_evaluator();
  const auto m = ev.mollifier({0.5, -0.5});
  const auto& q = ev.volume_rule();
  double mass = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) mass += q.weights[i] * m(q.nodes[i]);
  CHECK(std::abs(mass - 1.0) < 1e-6);
}

TEST_CASE("combination weights") {
  CombinedFunctional jc;
  jc.parts = {domain_integral("J")};
  jc.w = {1.0};
  jc.sign_source = SignSource::reference_values;
  jc.reference = {3.0};
  CHECK(combine_weights(jc, std::vector<double>{2.0})[0] == 0.5);
  jc.reference = {-3.0};
  CHECK(combine_weights(jc, std::vector<double>{-2.0})[0] == -0.5);
  // Equal values count as a positive sign.
  jc.reference = {-2.0};
  CHECK(combine_weights(jc, std::vector<double>{-2.0})[0] == 0.5);
  CHECK_THROWS_AS(combine_weights(jc, std::vector<double>{1e-15}), FunctionalError);
  try {
    combine_weights(jc, std::vector<double>{0.0});
  } catch (const FunctionalError& e) {
    CHECK(std::string(e.what()).find("'J'") != std::string::npos);
  }

  jc.w = {-1.0};
  try {
    jc.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("weights must be positive") != std::string::npos);
  }
}

TEST_CASE("combination weights are homogeneous and the combined value is a dot product") {
  CombinedFunctional jc;
  jc.parts = {domain_integral("a"), domain_integral("b"), domain_integral("c")};
  jc.w = {0.5, 0.25, 1.0};
  jc.sign_source = SignSource::reference_values;
  jc.reference = {0.5, std::numbers::pi / 4.0, -2.0 * std::numbers::pi};
  const std::vector<double> jt{0.4999, 0.7855, -6.2830};
  const auto om = combine_weights(jc, jt);
  CHECK(om[0] == 0.5 / 0.4999);
  CHECK(om[1] == -0.25 / 0.7855);
  CHECK(om[2] == -1.0 / 6.2830);
  double dot = 0.0;
  for (int n = 0; n < 3; ++n) dot += om[static_cast<std::size_t>(n)] * jt[static_cast<std::size_t>(n)];
  CHECK(combined_value(om, jt) == dot);
  for (std::size_t n = 0; n < 3; ++n) CHECK(om[n] * (jc.reference[n] - jt[n]) >= 0.0);

  auto scaled = jc;
  for (auto& w : scaled.w) w *= 4.0;
  const auto om4 = combine_weights(scaled, jt);
  for (std::size_t n = 0; n < 3; ++n) CHECK(om4[n] == 4.0 * om[n]);
  jc.parts.resize(1);
  jc.w = {1.0};
  jc.reference = {1.0};
  jc.sign_source = SignSource::fixed_positive;
  CHECK(combined_value(combine_weights(jc, std::vector<double>{1.0}), std::vector<double>{1.0}) == 1.0);
}
