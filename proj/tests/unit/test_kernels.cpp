#include <doctest.h>

#include "dwrnet/kernels/jet_kernel.hpp"
#include "test_util.hpp"

using namespace dwrnet;
using dwrnet::testing::random_net;
using dwrnet::testing::random_points;

namespace {

std::vector<ad::SpatialJet2> random_bars(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ad::SpatialJet2> bars(n);
  for (auto& b : bars) {
    b.value = u(rng);
    b.grad = {u(rng), u(rng)};
    b.hess = {{{u(rng), u(rng)}, {u(rng), u(rng)}}};
  }
  return bars;
}

double jet_diff(const ad::SpatialJet2& a, const ad::SpatialJet2& b) {
  double d = std::abs(a.value - b.value);
  for (int k = 0; k < 2; ++k) {
    d = std::max(d, std::abs(a.grad[k] - b.grad[k]));
    for (int l = 0; l < 2; ++l) d = std::max(d, std::abs(a.hess[k][l] - b.hess[k][l]));
  }
  return d;
}

}  // namespace

TEST_CASE("serial and omp kernels agree with per-point jets") {
  for (auto act : {ad::Activation::tanh, ad::Activation::swish, ad::Activation::sigmoid}) {
    auto net = random_net({2, 9, 7, 3}, act, 41);
    const auto pts = random_points(301, 42);  // not a multiple of the chunk size
    auto serial = kernels::make_serial_kernel(net);
    auto omp = kernels::make_omp_kernel(net, 64);
    std::vector<ad::SpatialJet2> a(pts.size() * 3), b(pts.size() * 3);
    serial->forward(net.theta(), pts, a);
    omp->forward(net.theta(), pts, b);
    double worst = 0.0;
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const auto ref = net.jet_eval(pts[p]);
      for (std::size_t k = 0; k < 3; ++k) {
        worst = std::max(worst, jet_diff(a[p * 3 + k], ref[k]));
        worst = std::max(worst, jet_diff(b[p * 3 + k], ref[k]));
      }
    }
    CHECK(worst < 1e-12);

    const auto bars = random_bars(pts.size() * 3, 43);
    std::vector<double> ga(net.num_params()), gb(net.num_params());
    serial->backward(bars, ga);
    omp->backward(bars, gb);
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < ga.size(); ++i) {
      scale = std::max(scale, std::abs(ga[i]));
      diff = std::max(diff, std::abs(ga[i] - gb[i]));
    }
    CHECK(diff <= 1e-12 * scale);
  }
}

TEST_CASE("kernel backward matches finite differences of the pairing") {
  auto net = random_net({2, 5, 4, 1}, ad::Activation::swish, 51);
  const auto pts = random_points(20, 52);
  const auto bars = random_bars(pts.size(), 53);
  auto k = kernels::make_omp_kernel(net, 8);
  std::vector<ad::SpatialJet2> out(pts.size());
  auto pairing = [&](std::span<const double> theta) {
    k->forward(theta, pts, out);
    double s = 0.0;
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const auto& o = out[p];
      const auto& b = bars[p];
      s += b.value * o.value + b.grad[0] * o.grad[0] + b.grad[1] * o.grad[1];
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) s += b.hess[i][j] * o.hess[i][j];
      }
    }
    return s;
  };
  pairing(net.theta());
  std::vector<double> g(net.num_params());
  k->backward(bars, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double fd = dwrnet::testing::central_diff(pairing, net.theta(), i, 1e-6);
    CHECK(std::abs(g[i] - fd) <= 1e-7 * (1.0 + std::abs(fd)));
  }
}

TEST_CASE("omp kernel result does not depend on the thread count") {
  auto net = random_net({2, 16, 16, 1}, ad::Activation::tanh, 61);
  const auto pts = random_points(1000, 62);
  const auto bars = random_bars(pts.size(), 63);
  std::vector<ad::SpatialJet2> out(pts.size());
  std::vector<double> g1(net.num_params()), g4(net.num_params());
  auto k = kernels::make_omp_kernel(net, 32);
  kernels::set_num_threads(1);
  k->forward(net.theta(), pts, out);
  k->backward(bars, g1);
  kernels::set_num_threads(4);
  k->forward(net.theta(), pts, out);
  k->backward(bars, g4);
  kernels::set_num_threads(1);
  CHECK(g1 == g4);
}

TEST_CASE("kernel rejects wrongly sized spans") {
  auto net = random_net({2, 4, 2}, ad::Activation::tanh, 71);
  const auto pts = random_points(5, 72);
  for (auto kind : {kernels::KernelKind::serial, kernels::KernelKind::omp}) {
    auto k = kernels::make_kernel(net, kind);
    std::vector<ad::SpatialJet2> out(5);
    CHECK_THROWS_AS(k->forward(net.theta(), pts, out), StructuralError);
  }
  CHECK(kernels::parse_kernel_kind("omp") == kernels::KernelKind::omp);
  CHECK_THROWS_AS(kernels::parse_kernel_kind("gpu"), ConfigError);
}
