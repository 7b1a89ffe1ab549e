#pragma once

#include <memory>
#include <vector>

#include "dwrnet/autodiff/tape.hpp"
#include "dwrnet/kernels/jet_kernel.hpp"
#include "dwrnet/problems/system.hpp"

namespace dwrnet::pde {

/// Mean-squared collocation loss
///   (1/N_int) sum_i |r_int(x_i)|^2 + (1/N_bnd) sum_s |r_bnd(s_s)|^2
/// with the exact parameter gradient.
class CollocationLoss {
 public:
  CollocationLoss(const nn::Mlp& net, std::shared_ptr<const PdeSystem> system, const geo::CollocationSet& colloc,
                  kernels::KernelKind kind = kernels::KernelKind::omp);

  std::size_t n_params() const { return net_.num_params(); }
  std::size_t n_int() const { return n_int_; }
  std::size_t n_bnd() const { return sites_.size() - n_int_; }
  const std::vector<Site>& sites() const { return sites_; }
  const PdeSystem& system() const { return *system_; }

  double value(std::span<const double> theta);
  ad::ValueGrad value_grad(std::span<const double> theta);
  /// Loss restricted to the given site indices, each part averaged over its own count.
  ad::ValueGrad value_grad(std::span<const double> theta, const std::vector<std::size_t>& subset);

 private:
  ad::ValueGrad evaluate(std::span<const double> theta, const std::vector<std::size_t>& idx, bool want_grad);

  nn::Mlp net_;
  std::shared_ptr<const PdeSystem> system_;
  std::vector<Site> sites_;
  std::size_t n_int_ = 0;
  std::vector<std::size_t> all_;
  std::unique_ptr<kernels::JetKernel> kernel_;
  std::vector<Vec2> pts_;
  std::vector<SpatialJet2> jets_, bars_;
  std::vector<double> point_loss_;
};

}  // namespace dwrnet::pde
