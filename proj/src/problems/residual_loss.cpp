#include "dwrnet/problems/residual_loss.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace dwrnet::pde {

CollocationLoss::CollocationLoss(const nn::Mlp& net, std::shared_ptr<const PdeSystem> system,
                                 const geo::CollocationSet& colloc, kernels::KernelKind kind)
    : net_(net), system_(std::move(system)) {
  if (system_->n_fields() != net.output_dim()) {
    std::ostringstream msg;
    msg << "system " << system_->name() << " needs " << system_->n_fields() << " outputs, network has "
        << net.output_dim();
    throw StructuralError(msg.str());
  }
  if (system_->n_fields() > 3) throw StructuralError("collocation loss supports at most 3 field components");
  if (colloc.interior.empty()) throw GeometryError("collocation loss needs interior points");
  sites_ = interior_sites(colloc.interior);
  n_int_ = sites_.size();
  auto bnd = boundary_sites(colloc);
  sites_.insert(sites_.end(), bnd.begin(), bnd.end());
  system_->annotate(sites_);
  all_.resize(sites_.size());
  std::iota(all_.begin(), all_.end(), std::size_t{0});
  kernel_ = kernels::make_kernel(net_, kind);
}

double CollocationLoss::value(std::span<const double> theta) { return evaluate(theta, all_, false).value; }

ad::ValueGrad CollocationLoss::value_grad(std::span<const double> theta) { return evaluate(theta, all_, true); }

ad::ValueGrad CollocationLoss::value_grad(std::span<const double> theta, const std::vector<std::size_t>& subset) {
  return evaluate(theta, subset, true);
}

ad::ValueGrad CollocationLoss::evaluate(std::span<const double> theta, const std::vector<std::size_t>& idx,
                                        bool want_grad) {
  const auto nf = static_cast<std::size_t>(system_->n_fields());
  const std::size_t P = idx.size();
  pts_.resize(P);
  std::size_t n_i = 0, n_b = 0;
  for (std::size_t q = 0; q < P; ++q) {
    pts_[q] = sites_[idx[q]].x;
    (sites_[idx[q]].boundary ? n_b : n_i) += 1;
  }
  jets_.resize(P * nf);
  bars_.resize(P * nf);
  point_loss_.assign(P, 0.0);
  kernel_->forward(theta, pts_, jets_);
  const double si = n_i ? 1.0 / static_cast<double>(n_i) : 0.0;
  const double sb = n_b ? 1.0 / static_cast<double>(n_b) : 0.0;
#pragma omp parallel
  {
    ad::Tape tape;
#pragma omp for schedule(static)
    for (long q = 0; q < static_cast<long>(P); ++q) {
      const auto qq = static_cast<std::size_t>(q);
      const Site& s = sites_[idx[qq]];
      const double scale = s.boundary ? sb : si;
      std::span<const SpatialJet2> u(jets_.data() + qq * nf, nf);
      if (want_grad)
        point_loss_[qq] = system_->point_loss_grad(s, u, scale, std::span<SpatialJet2>(bars_.data() + qq * nf, nf), tape);
      else
        point_loss_[qq] = scale * system_->point_loss(s, u);
    }
  }
  ad::ValueGrad out;
  for (std::size_t q = 0; q < P; ++q) {
    if (!std::isfinite(point_loss_[q])) {
      std::ostringstream msg;
      msg << "non-finite residual at collocation point " << idx[q] << " (" << pts_[q][0] << ", " << pts_[q][1] << ")";
      throw NumericalError(msg.str(), static_cast<long>(idx[q]));
    }
    out.value += point_loss_[q];
  }
  if (!want_grad) return out;
  out.grad.assign(net_.num_params(), 0.0);
  kernel_->backward(bars_, out.grad);
  for (std::size_t i = 0; i < out.grad.size(); ++i) {
    if (!std::isfinite(out.grad[i])) throw NumericalError("non-finite loss gradient component");
  }
  return out;
}

}  // namespace dwrnet::pde
