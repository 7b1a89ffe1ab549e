#pragma once

#include <functional>

#include "dwrnet/problems/system.hpp"

namespace dwrnet::pde {

struct NSParams {
  double nu = 0.05;
  double re = 100.0;
  double c_re() const { return 1.0 / (nu * re); }
  void validate() const;
};

/// Momentum rows -nu lap u + (u . grad) u + grad p - f and continuity div u.
template <class T>
void ns_residual(std::span<const Jet<T>> w, const NSParams& prm, const double* f, std::span<T> r) {
  const Jet<T>& u = w[0];
  const Jet<T>& v = w[1];
  const Jet<T>& p = w[2];
  r[0] = -prm.nu * u.laplacian() + u.value * u.grad[0] + v.value * u.grad[1] + p.grad[0] - f[0];
  r[1] = -prm.nu * v.laplacian() + u.value * v.grad[0] + v.value * v.grad[1] + p.grad[1] - f[1];
  r[2] = u.grad[0] + v.grad[1];
}

/// Adjoint operator as printed: -nu lap z - (u . grad) z - (div u) z + (grad u) z + grad pi - j,
/// with (grad u)_{ik} = d_i u_k, and div z - j_p. u is frozen.
template <class T>
void ns_adjoint_residual(std::span<const SpatialJet2> uw, std::span<const Jet<T>> zw, const NSParams& prm,
                         const double* j, std::span<T> r) {
  const SpatialJet2& u = uw[0];
  const SpatialJet2& v = uw[1];
  const Jet<T>& z1 = zw[0];
  const Jet<T>& z2 = zw[1];
  const Jet<T>& pi = zw[2];
  const double divu = u.grad[0] + v.grad[1];
  r[0] = -prm.nu * z1.laplacian() - (u.value * z1.grad[0] + v.value * z1.grad[1]) - divu * z1.value +
         (u.grad[0] * z1.value + v.grad[0] * z2.value) + pi.grad[0] - j[0];
  r[1] = -prm.nu * z2.laplacian() - (u.value * z2.grad[0] + v.value * z2.grad[1]) - divu * z2.value +
         (u.grad[1] * z1.value + v.grad[1] * z2.value) + pi.grad[1] - j[1];
  r[2] = z1.grad[0] + z2.grad[1] - j[2];
}

/// Fields (u, v, p); Dirichlet velocity data on the whole boundary.
class NavierStokes final : public SystemBase<NavierStokes> {
 public:
  using VectorData = std::function<void(const Vec2&, std::span<double>)>;

  NavierStokes(NSParams prm, VectorData f, VectorData psi);

  std::string name() const override { return "navier_stokes"; }
  int n_fields() const override { return 3; }
  int n_interior() const override { return 3; }
  int n_boundary() const override { return 2; }
  void annotate(std::vector<Site>& sites) const override;
  void dual_weights(const Site& s, std::span<const SpatialJet2> u, std::span<const SpatialJet2> z,
                    std::span<double> w) const override;
  std::shared_ptr<PdeSystem> adjoint(std::shared_ptr<const Field> primal, AdjointRhs rhs) const override;
  const NSParams& params() const { return prm_; }

  template <class T>
  void interior_t(const Site& s, std::span<const Jet<T>> w, std::span<T> r) const {
    ns_residual(w, prm_, s.aux.data(), r);
  }

  template <class T>
  void boundary_t(const Site& s, std::span<const Jet<T>> w, std::span<T> r) const {
    r[0] = w[0].value - s.aux[0];
    r[1] = w[1].value - s.aux[1];
  }

 private:
  NSParams prm_;
  VectorData f_;
  VectorData psi_;
};

/// aux: [j (3) or g (2, padded to 3), primal jets (3 x 6)].
class NSAdjoint final : public SystemBase<NSAdjoint> {
 public:
  NSAdjoint(NSParams prm, std::shared_ptr<const Field> primal, AdjointRhs rhs);

  std::string name() const override { return "navier_stokes_adjoint"; }
  int n_fields() const override { return 3; }
  int n_interior() const override { return 3; }
  int n_boundary() const override { return 2; }
  void annotate(std::vector<Site>& sites) const override;

  template <class T>
  void interior_t(const Site& s, std::span<const Jet<T>> z, std::span<T> r) const {
    SpatialJet2 u[3];
    for (int k = 0; k < 3; ++k) u[k] = unpack_jet(std::span<const double>(s.aux).subspan(3 + 6 * static_cast<std::size_t>(k), 6));
    ns_adjoint_residual(std::span<const SpatialJet2>(u, 3), z, prm_, s.aux.data(), r);
  }

  template <class T>
  void boundary_t(const Site& s, std::span<const Jet<T>> z, std::span<T> r) const {
    r[0] = z[0].value - s.aux[0];
    r[1] = z[1].value - s.aux[1];
  }

 private:
  NSParams prm_;
  std::shared_ptr<const Field> primal_;
  AdjointRhs rhs_;
};

}  // namespace dwrnet::pde
