#include "dwrnet/problems/plaplace.hpp"

#include <sstream>

namespace dwrnet::pde {

void PLaplaceParams::validate() const {
  if (!(p >= 2.0)) {
    std::ostringstream msg;
    msg << "p-Laplace exponent must satisfy p >= 2 (got " << p << ")";
    throw ConfigError(msg.str());
  }
  if (!(delta >= 0.0)) throw ConfigError("p-Laplace regularization delta must be >= 0");
}

PLaplace::PLaplace(PLaplaceParams prm, Source f, BoundaryData g) : prm_(prm), f_(std::move(f)), g_(std::move(g)) {
  prm_.validate();
}

void PLaplace::annotate(std::vector<Site>& sites) const {
  for (auto& s : sites) s.aux = {s.boundary ? g_(s.x, s.tag) : f_(s.x)};
}

void PLaplace::dual_weights(const Site& s, std::span<const SpatialJet2> u, std::span<const SpatialJet2> z,
                            std::span<double> w) const {
  if (!s.boundary) {
    w[0] = z[0].value;
  } else if (s.tag == BcTag::dirichlet) {
    w[0] = -plaplace_conormal(u[0], z[0], s.normal, prm_);
  } else {
    w[0] = z[0].value;
  }
}

double PLaplace::flux_coefficient(const SpatialJet2& u, const Vec2& n) const {
  SpatialJet2 z;
  z.grad = n;
  return plaplace_conormal(u, z, n, prm_);
}

std::shared_ptr<PdeSystem> PLaplace::adjoint(std::shared_ptr<const Field> primal, AdjointRhs rhs) const {
  return std::make_shared<PLaplaceAdjoint>(prm_, std::move(primal), std::move(rhs));
}

PLaplaceAdjoint::PLaplaceAdjoint(PLaplaceParams prm, std::shared_ptr<const Field> primal, AdjointRhs rhs)
    : prm_(prm), primal_(std::move(primal)), rhs_(std::move(rhs)) {
  if (rhs_.n_components != 1) throw FunctionalError("p-Laplace adjoint expects a scalar right-hand side");
}

void PLaplaceAdjoint::annotate(std::vector<Site>& sites) const {
  std::vector<Vec2> pts(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) pts[i] = sites[i].x;
  const auto u = primal_->jets(pts);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    Site& s = sites[i];
    s.aux.assign(7, 0.0);
    double v = 0.0;
    if (!s.boundary) {
      if (rhs_.interior) rhs_.interior(s.x, std::span<double>(&v, 1));
    } else if (s.tag == BcTag::dirichlet && rhs_.boundary) {
      rhs_.boundary(s.x, s.normal, s.segment, std::span<double>(&v, 1));
    }
    s.aux[0] = v;
    pack_jet(u[i], std::span<double>(s.aux).subspan(1, 6));
  }
}

}  // namespace dwrnet::pde
