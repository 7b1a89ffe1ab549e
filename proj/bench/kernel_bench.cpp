// Serial reference vs OpenMP/GEMM jet kernel: forward and forward+backward.
#include <benchmark/benchmark.h>

#include <random>

#include "dwrnet/kernels/jet_kernel.hpp"

namespace {

using namespace dwrnet;

struct Fixture {
  nn::Mlp net;
  ParamVector theta;
  std::vector<Vec2> pts;
  std::vector<ad::SpatialJet2> out, bar;
  std::vector<double> grad;

  Fixture(int width, int n_points)
      : net({2, width, width, width, 1}, {ad::Activation::tanh, ad::Activation::tanh, ad::Activation::tanh}, {-1, -1},
            {1, 1}) {
    theta = nn::xavier_init(net.layer_sizes(), 7);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < n_points; ++i) pts.push_back({u(rng), u(rng)});
    out.resize(pts.size());
    bar.resize(pts.size());
    for (auto& b : bar) {
      b.value = 1.0;
      b.hess[0][0] = b.hess[1][1] = 0.5;
    }
    grad.resize(net.num_params());
  }
};

void run(benchmark::State& state, kernels::KernelKind kind, bool with_backward) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  auto k = kernels::make_kernel(f.net, kind);
  for (auto _ : state) {
    k->forward(f.theta, f.pts, f.out);
    if (with_backward) k->backward(f.bar, f.grad);
    benchmark::DoNotOptimize(f.out.data());
    benchmark::DoNotOptimize(f.grad.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_SerialForward(benchmark::State& s) { run(s, kernels::KernelKind::serial, false); }
void BM_OmpForward(benchmark::State& s) { run(s, kernels::KernelKind::omp, false); }
void BM_SerialForwardBackward(benchmark::State& s) { run(s, kernels::KernelKind::serial, true); }
void BM_OmpForwardBackward(benchmark::State& s) { run(s, kernels::KernelKind::omp, true); }

}  // namespace

BENCHMARK(BM_SerialForward)->Args({30, 1024})->Args({80, 4096});
BENCHMARK(BM_OmpForward)->Args({30, 1024})->Args({80, 4096});
BENCHMARK(BM_SerialForwardBackward)->Args({30, 1024})->Args({80, 4096});
BENCHMARK(BM_OmpForwardBackward)->Args({30, 1024})->Args({80, 4096});

BENCHMARK_MAIN();
