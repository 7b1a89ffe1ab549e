#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dwrnet/common.hpp"
#include "dwrnet/network/mlp.hpp"

namespace dwrnet::kernels {

using ad::SpatialJet2;

enum class KernelKind { serial, omp };

KernelKind parse_kernel_kind(const std::string& name);

/// Batched evaluation of network output jets over a point set, plus the
/// reverse sweep from output-jet adjoints to the parameter gradient.
///
/// Output jets are laid out point-major: out[p * n_out + k]. Adjoints use the
/// same layout; an adjoint jet's hess[0][1] and hess[1][0] are summed since
/// the network Hessian is symmetric.
class JetKernel {
 public:
  virtual ~JetKernel() = default;

  /// Evaluates and caches intermediates for a following backward().
  virtual void forward(std::span<const double> theta, std::span<const Vec2> points,
                       std::span<SpatialJet2> out) = 0;

  /// Writes d(sum_p,k <out_bar, out>)/d theta into grad (overwritten).
  virtual void backward(std::span<const SpatialJet2> out_bar, std::span<double> grad) = 0;

  const nn::Mlp& net() const { return net_; }

 protected:
  explicit JetKernel(const nn::Mlp& net) : net_(net) {}
  const nn::Mlp& net_;
};

/// Naive per-point loops. Reference for testing the batched kernel.
std::unique_ptr<JetKernel> make_serial_kernel(const nn::Mlp& net);

/// Eigen GEMM over fixed-size point chunks, chunks spread over OpenMP
/// threads. Chunk gradients are summed in chunk order, so results do not
/// depend on the thread count.
std::unique_ptr<JetKernel> make_omp_kernel(const nn::Mlp& net, int chunk = 128);

std::unique_ptr<JetKernel> make_kernel(const nn::Mlp& net, KernelKind kind);

/// Sets the OpenMP thread count for subsequent kernel calls (0 leaves the default).
void set_num_threads(int n);

}  // namespace dwrnet::kernels
