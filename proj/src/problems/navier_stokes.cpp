#include "dwrnet/problems/navier_stokes.hpp"

namespace dwrnet::pde {

void NSParams::validate() const {
  if (!(nu > 0.0)) throw ConfigError("Navier-Stokes viscosity nu must be positive");
  if (!(re > 0.0)) throw ConfigError("Navier-Stokes Reynolds number must be positive");
}

NavierStokes::NavierStokes(NSParams prm, VectorData f, VectorData psi)
    : prm_(prm), f_(std::move(f)), psi_(std::move(psi)) {
  prm_.validate();
}

void NavierStokes::annotate(std::vector<Site>& sites) const {
  for (auto& s : sites) {
    s.aux.assign(2, 0.0);
    if (s.boundary)
      psi_(s.x, s.aux);
    else
      f_(s.x, s.aux);
  }
}

void NavierStokes::dual_weights(const Site& s, std::span<const SpatialJet2> u, std::span<const SpatialJet2> z,
                                std::span<double> w) const {
  if (!s.boundary) {
    w[0] = z[0].value;
    w[1] = z[1].value;
    w[2] = -z[2].value;  // printed adjoint pressure has the opposite sign
    return;
  }
  const Vec2& n = s.normal;
  const double un = u[0].value * n[0] + u[1].value * n[1];
  for (int k = 0; k < 2; ++k) {
    const double dzn = z[k].grad[0] * n[0] + z[k].grad[1] * n[1];
    w[k] = -(prm_.nu * dzn - z[2].value * n[k] + un * z[k].value);
  }
}

std::shared_ptr<PdeSystem> NavierStokes::adjoint(std::shared_ptr<const Field> primal, AdjointRhs rhs) const {
  return std::make_shared<NSAdjoint>(prm_, std::move(primal), std::move(rhs));
}

NSAdjoint::NSAdjoint(NSParams prm, std::shared_ptr<const Field> primal, AdjointRhs rhs)
    : prm_(prm), primal_(std::move(primal)), rhs_(std::move(rhs)) {
  if (rhs_.n_components != 3) throw FunctionalError("Navier-Stokes adjoint expects a 3-component right-hand side");
}

void NSAdjoint::annotate(std::vector<Site>& sites) const {
  std::vector<Vec2> pts(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) pts[i] = sites[i].x;
  const auto u = primal_->jets(pts);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    Site& s = sites[i];
    s.aux.assign(3 + 18, 0.0);
    std::span<double> head(s.aux.data(), 3);
    if (!s.boundary) {
      if (rhs_.interior) rhs_.interior(s.x, head);
    } else if (rhs_.boundary) {
      rhs_.boundary(s.x, s.normal, s.segment, head);
    }
    for (std::size_t k = 0; k < 3; ++k) pack_jet(u[3 * i + k], std::span<double>(s.aux).subspan(3 + 6 * k, 6));
  }
}

}  // namespace dwrnet::pde
