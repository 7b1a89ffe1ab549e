#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "dwrnet/optimize/optimizer.hpp"

using namespace dwrnet;
using namespace dwrnet::opt;

namespace {

ad::ValueGrad rosenbrock(std::span<const double> t) {
  const double x = t[0], y = t[1];
  ad::ValueGrad r;
  r.value = (1 - x) * (1 - x) + 100 * (y - x * x) * (y - x * x);
  r.grad = {-2 * (1 - x) - 400 * x * (y - x * x), 200 * (y - x * x)};
  return r;
}

Eigen::MatrixXd spd(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = u(rng);
  }
  return m * m.transpose() + Eigen::MatrixXd::Identity(n, n);
}

LossGrad quadratic(const Eigen::MatrixXd& A) {
  return [A](std::span<const double> t) {
    Eigen::Map<const Eigen::VectorXd> x(t.data(), static_cast<Eigen::Index>(t.size()));
    const Eigen::VectorXd g = A * x;
    ad::ValueGrad r;
    r.value = 0.5 * x.dot(g);
    r.grad.assign(g.data(), g.data() + g.size());
    return r;
  };
}

OptimizerConfig qn_only(QnKind kind) {
  OptimizerConfig c;
  c.adam_steps = 0;
  c.qn = kind;
  return c;
}

void check_wolfe_and_best(const TrainTrace& trace) {
  double best = std::numeric_limits<double>::infinity();
  int last_iter = -1;
  for (const auto& row : trace.rows) {
    CHECK(std::isfinite(row.loss));
    CHECK(row.iter > last_iter);
    last_iter = row.iter;
    if (row.phase == "qn" && row.step > 0.0) CHECK(row.wolfe_ok);
    const double next = std::min(best, row.loss);
    CHECK(next <= best);
    best = next;
  }
}

}  // namespace

TEST_CASE("config validation collects violations") {
  OptimizerConfig c;
  c.adam_lr = -1.0;
  c.tol = 0.0;
  c.line_search.c1 = 0.95;
  try {
    c.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.violations().size() >= 3);
  }
  CHECK(parse_qn_kind("lbfgs") == QnKind::lbfgs);
}

TEST_CASE("Adam on a scalar quadratic") {
  OptimizerConfig c;
  c.adam_steps = 500;
  c.adam_lr = 0.01;
  c.tol = 1e-300;
  auto loss = [](std::span<const double> t) {
    return ad::ValueGrad{(t[0] - 3.0) * (t[0] - 3.0), {2.0 * (t[0] - 3.0)}};
  };
  const auto r = adam_run(loss, {2.0}, c, 0);
  CHECK(std::abs(r.theta[0] - 3.0) < 1e-2);
  CHECK(r.trace.rows.size() == 500);
  // From 0 the step size caps the travel; the reference trajectory ends at 2.80701887...
  const auto far = adam_run(loss, {0.0}, c, 0);
  CHECK(far.theta[0] == doctest::Approx(2.807018874115634).epsilon(1e-12));
  const auto again = adam_run(loss, {2.0}, c, 0);
  CHECK(again.theta == r.theta);
  for (std::size_t i = 0; i < r.trace.rows.size(); ++i) CHECK(again.trace.rows[i].loss == r.trace.rows[i].loss);
}

TEST_CASE("Adam leaves theta unchanged under a zero gradient") {
  OptimizerConfig c;
  c.adam_steps = 50;
  c.tol = 1e-300;
  auto loss = [](std::span<const double>) { return ad::ValueGrad{1.0, {0.0, 0.0}}; };
  const auto r = adam_run(loss, {0.25, -4.0}, c, 0);
  CHECK(r.theta == std::vector<double>{0.25, -4.0});
}

TEST_CASE("Adam stops at a non-finite loss and keeps the last finite state") {
  OptimizerConfig c;
  c.adam_steps = 100;
  c.adam_lr = 0.1;
  c.tol = 1e-300;
  auto loss = [](std::span<const double> t) {
    if (t[0] > 0.35) return ad::ValueGrad{std::numeric_limits<double>::quiet_NaN(), {0.0}};
    return ad::ValueGrad{1.0 - t[0], {-1.0}};
  };
  const auto r = adam_run(loss, {0.0}, c, 0);
  CHECK(r.trace.stop_reason == "non-finite loss");
  CHECK(r.theta[0] <= 0.35);
  CHECK(std::isfinite(r.loss));
}

TEST_CASE("BFGS minimizes Rosenbrock") {
  auto c = qn_only(QnKind::bfgs);
  c.tol = 1e-20;
  c.grad_tol = 1e-12;
  const auto r = quasinewton_run(rosenbrock, {-1.2, 1.0}, c, 0);
  CHECK(std::abs(r.theta[0] - 1.0) < 1e-8);
  CHECK(std::abs(r.theta[1] - 1.0) < 1e-8);
  CHECK(r.iterations < 200);
  CHECK_FALSE(r.trace.line_search_failed);
  check_wolfe_and_best(r.trace);
}

TEST_CASE("L-BFGS minimizes Rosenbrock") {
  auto c = qn_only(QnKind::lbfgs);
  c.tol = 1e-20;
  c.grad_tol = 1e-12;
  const auto r = quasinewton_run(rosenbrock, {-1.2, 1.0}, c, 0);
  CHECK(std::abs(r.theta[0] - 1.0) < 1e-8);
  CHECK(std::abs(r.theta[1] - 1.0) < 1e-8);
  CHECK(r.iterations < 200);
  check_wolfe_and_best(r.trace);
}

TEST_CASE("BFGS solves an SPD quadratic in at most dim + 5 iterations") {
  // Finite termination needs near-exact line minimization.
  const auto A = spd(10, 3);
  auto c = qn_only(QnKind::bfgs);
  c.tol = 1e-12;
  c.line_search.c2 = 0.01;
  std::vector<double> x0(10);
  for (int i = 0; i < 10; ++i) x0[static_cast<std::size_t>(i)] = 1.0 - 0.15 * i;
  const auto r = quasinewton_run(quadratic(A), x0, c, 0);
  CHECK(r.loss < 1e-12);
  CHECK(r.iterations <= 15);
  check_wolfe_and_best(r.trace);
}

TEST_CASE("quasi-Newton returns immediately at a minimum") {
  const auto A = spd(4, 5);
  const auto r = quasinewton_run(quadratic(A), std::vector<double>(4, 0.0), qn_only(QnKind::bfgs), 0);
  CHECK(r.iterations == 0);
  CHECK(r.trace.rows.size() == 1);
}

TEST_CASE("L-BFGS with full memory equals the dense BFGS direction") {
  const int n = 6;
  const auto A = spd(n, 9);
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Eigen::VectorXd> S, Y;
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s(i) = u(rng);
    S.push_back(s);
    Y.push_back(A * s);
  }
  const double gamma = S.back().dot(Y.back()) / Y.back().squaredNorm();
  Eigen::MatrixXd H = gamma * Eigen::MatrixXd::Identity(n, n);
  for (int k = 0; k < n; ++k) bfgs_update(H, S[static_cast<std::size_t>(k)], Y[static_cast<std::size_t>(k)]);
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) g(i) = u(rng);
  const Eigen::VectorXd dense = H * g;
  const Eigen::VectorXd limited = lbfgs_two_loop(S, Y, g, gamma);
  CHECK((dense - limited).norm() <= 1e-10 * dense.norm());
  // Secant condition of the last pair.
  CHECK((H * Y.back() - S.back()).norm() <= 1e-10 * S.back().norm());
}

TEST_CASE("strong Wolfe search on a quadratic line") {
  const auto A = spd(3, 11);
  auto loss = quadratic(A);
  const std::vector<double> x{1.0, -2.0, 0.5};
  const auto f0 = loss(x);
  std::vector<double> d(3);
  for (int i = 0; i < 3; ++i) d[static_cast<std::size_t>(i)] = -f0.grad[static_cast<std::size_t>(i)];
  StrongWolfe p;
  const auto ls = strong_wolfe_search(loss, x, f0.value, f0.grad, d, 1.0, p);
  REQUIRE(ls.ok);
  double dphi0 = 0.0, dphi = 0.0;
  for (int i = 0; i < 3; ++i) {
    dphi0 += f0.grad[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(i)];
    dphi += ls.g[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(i)];
  }
  CHECK(ls.f <= f0.value + p.c1 * ls.alpha * dphi0);
  CHECK(std::abs(dphi) <= p.c2 * std::abs(dphi0));
}

TEST_CASE("line-search failure is flagged with the best state kept") {
  // Gradient inconsistent with the values: no step satisfies sufficient decrease.
  auto bad = [](std::span<const double> t) { return ad::ValueGrad{1.0 + t[0] * t[0], {-1.0}}; };
  const auto r = quasinewton_run(bad, {0.5}, qn_only(QnKind::bfgs), 0);
  CHECK(r.trace.line_search_failed);
  CHECK(r.trace.stop_reason == "line search failure");
  CHECK(r.theta[0] == 0.5);
}

TEST_CASE("train concatenates phases and matches quasi-Newton without Adam") {
  const auto A = spd(5, 13);
  auto c = qn_only(QnKind::bfgs);
  const std::vector<double> x0{1, 2, 3, 4, 5};
  const auto a = train(quadratic(A), x0, c);
  const auto b = quasinewton_run(quadratic(A), x0, c, 0);
  CHECK(a.theta == b.theta);
  CHECK(a.iterations == b.iterations);

  c.adam_steps = 30;
  c.adam_lr = 0.05;
  const auto t = train(quadratic(A), x0, c);
  CHECK(t.trace.rows.front().phase == "adam");
  CHECK(t.trace.rows.back().phase == "qn");
  CHECK(t.loss < 1e-12);
  check_wolfe_and_best(t.trace);
  for (std::size_t i = 1; i < t.trace.rows.size(); ++i) CHECK(t.trace.rows[i].seconds >= t.trace.rows[i - 1].seconds);
  CHECK(t.trace.csv().rfind("iter,phase,loss,grad_norm,seconds\n", 0) == 0);
}
