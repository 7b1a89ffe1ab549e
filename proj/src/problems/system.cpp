#include "dwrnet/problems/system.hpp"

#include <cmath>

namespace dwrnet::pde {

std::vector<Site> interior_sites(std::span<const Vec2> points, double weight_each) {
  std::vector<Site> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out[i].x = points[i];
    out[i].weight = weight_each;
  }
  return out;
}

std::vector<Site> boundary_sites(const geo::CollocationSet& colloc) {
  std::vector<Site> out(colloc.boundary.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& b = colloc.boundary[i];
    out[i].x = b.x;
    out[i].normal = b.normal;
    out[i].tag = b.tag;
    out[i].boundary = true;
    out[i].segment = b.segment;
    out[i].weight = b.weight;
  }
  return out;
}

AdjointRhs AdjointRhs::zero(int n) {
  AdjointRhs r;
  r.n_components = n;
  return r;
}

AdjointRhs AdjointRhs::combine(const std::vector<AdjointRhs>& parts, const std::vector<double>& coeffs) {
  if (parts.empty() || parts.size() != coeffs.size()) throw FunctionalError("AdjointRhs::combine: size mismatch");
  AdjointRhs out;
  out.n_components = parts.front().n_components;
  for (const auto& p : parts) {
    if (p.n_components != out.n_components) throw FunctionalError("AdjointRhs::combine: component count mismatch");
  }
  const int n = out.n_components;
  out.interior = [parts, coeffs, n](const Vec2& x, std::span<double> j) {
    std::fill(j.begin(), j.end(), 0.0);
    std::vector<double> tmp(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (!parts[k].interior) continue;
      std::fill(tmp.begin(), tmp.end(), 0.0);
      parts[k].interior(x, tmp);
      for (int c = 0; c < n; ++c) j[static_cast<std::size_t>(c)] += coeffs[k] * tmp[static_cast<std::size_t>(c)];
    }
  };
  out.boundary = [parts, coeffs, n](const Vec2& x, const Vec2& nrm, int seg, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
    std::vector<double> tmp(g.size());
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (!parts[k].boundary) continue;
      std::fill(tmp.begin(), tmp.end(), 0.0);
      parts[k].boundary(x, nrm, seg, tmp);
      for (std::size_t c = 0; c < g.size(); ++c) g[c] += coeffs[k] * tmp[c];
    }
  };
  return out;
}

void PdeSystem::dual_weights(const Site&, std::span<const SpatialJet2>, std::span<const SpatialJet2>,
                             std::span<double>) const {
  throw FunctionalError("system " + name() + " defines no estimator weights");
}

double PdeSystem::flux_coefficient(const SpatialJet2&, const Vec2&) const { return 1.0; }

std::shared_ptr<PdeSystem> PdeSystem::adjoint(std::shared_ptr<const Field>, AdjointRhs) const {
  throw FunctionalError("system " + name() + " has no adjoint");
}

double PdeSystem::point_loss_grad(const Site& s, std::span<const SpatialJet2> u, double scale,
                                  std::span<SpatialJet2> bar, ad::Tape& tape) const {
  tape.clear();
  const auto nf = static_cast<std::size_t>(n_fields());
  Jet<Var> uj[3];
  Var leaves[3][6];
  for (std::size_t k = 0; k < nf; ++k) {
    leaves[k][0] = tape.leaf(u[k].value);
    leaves[k][1] = tape.leaf(u[k].grad[0]);
    leaves[k][2] = tape.leaf(u[k].grad[1]);
    leaves[k][3] = tape.leaf(u[k].hess[0][0]);
    leaves[k][4] = tape.leaf(u[k].hess[0][1]);
    leaves[k][5] = tape.leaf(u[k].hess[1][1]);
    uj[k].value = leaves[k][0];
    uj[k].grad = {leaves[k][1], leaves[k][2]};
    uj[k].hess[0] = {leaves[k][3], leaves[k][4]};
    uj[k].hess[1] = {leaves[k][4], leaves[k][5]};
  }
  Var r[3];
  const std::size_t nr = static_cast<std::size_t>(s.boundary ? n_boundary() : n_interior());
  if (s.boundary)
    boundary(s, std::span<const Jet<Var>>(uj, nf), std::span<Var>(r, nr));
  else
    interior(s, std::span<const Jet<Var>>(uj, nf), std::span<Var>(r, nr));
  Var loss = 0.0;
  for (std::size_t k = 0; k < nr; ++k) loss = loss + ad::square(r[k]);
  loss = loss * scale;
  tape.backward(loss);
  for (std::size_t k = 0; k < nf; ++k) {
    SpatialJet2& b = bar[k];
    b.value = tape.adjoint(leaves[k][0]);
    b.grad = {tape.adjoint(leaves[k][1]), tape.adjoint(leaves[k][2])};
    b.hess[0] = {tape.adjoint(leaves[k][3]), tape.adjoint(leaves[k][4])};
    b.hess[1] = {0.0, tape.adjoint(leaves[k][5])};
  }
  return loss.value();
}

std::vector<double> PdeSystem::residual(const Site& s, std::span<const SpatialJet2> u) const {
  std::vector<double> r(static_cast<std::size_t>(s.boundary ? n_boundary() : n_interior()));
  if (s.boundary)
    boundary(s, u, r);
  else
    interior(s, u, r);
  return r;
}

double PdeSystem::point_loss(const Site& s, std::span<const SpatialJet2> u) const {
  double sum = 0.0;
  for (double v : residual(s, u)) sum += v * v;
  return sum;
}

void pack_jet(const SpatialJet2& j, std::span<double> out6) {
  out6[0] = j.value;
  out6[1] = j.grad[0];
  out6[2] = j.grad[1];
  out6[3] = j.hess[0][0];
  out6[4] = j.hess[0][1];
  out6[5] = j.hess[1][1];
}

SpatialJet2 unpack_jet(std::span<const double> in6) {
  SpatialJet2 j;
  j.value = in6[0];
  j.grad = {in6[1], in6[2]};
  j.hess[0] = {in6[3], in6[4]};
  j.hess[1] = {in6[4], in6[5]};
  return j;
}

}  // namespace dwrnet::pde
