#pragma once

#include <cmath>
#include <functional>

#include "dwrnet/problems/system.hpp"

namespace dwrnet::pde {

struct PLaplaceParams {
  double p = 2.0;
  double delta = 0.0;
  void validate() const;
};

namespace detail {

// Zero-gradient guard for delta = 0: the (p-2) s^(alpha-1) terms vanish in the limit.
inline bool degenerate(const PLaplaceParams& prm, double grad_norm2) {
  return prm.delta == 0.0 && std::sqrt(grad_norm2) < 1e-150;
}

}  // namespace detail

/// -div((delta^2 + |grad u|^2)^((p-2)/2) grad u), expanded over the Hessian.
template <class T>
T plaplace_neg_div(const Jet<T>& u, const PLaplaceParams& prm) {
  using std::pow;
  const T lap = u.laplacian();
  if (prm.p == 2.0) return -lap;
  const T gx = u.grad[0], gy = u.grad[1];
  const T g2 = gx * gx + gy * gy;
  if (detail::degenerate(prm, ad::value_of(g2))) return T(0.0);
  const double alpha = 0.5 * (prm.p - 2.0);
  const T s = g2 + prm.delta * prm.delta;
  const T a = pow(s, alpha);
  const T q = gx * gx * u.hess[0][0] + T(2.0) * gx * gy * u.hess[0][1] + gy * gy * u.hess[1][1];
  return -(a * lap + (prm.p - 2.0) * (a / s) * q);
}

/// Gateaux derivative A'(u) z of div(s^alpha grad u), u frozen.
template <class T>
T plaplace_frechet(const SpatialJet2& u, const Jet<T>& z, const PLaplaceParams& prm) {
  const T lapz = z.laplacian();
  if (prm.p == 2.0) return lapz;
  const double gx = u.grad[0], gy = u.grad[1];
  const double g2 = gx * gx + gy * gy;
  const double alpha = 0.5 * (prm.p - 2.0);
  const double s = g2 + prm.delta * prm.delta;
  const double a = std::pow(s, alpha);
  if (detail::degenerate(prm, g2)) return a * lapz;
  const double b = (prm.p - 2.0) * a / s;
  const double c = 2.0 * (prm.p - 2.0) * (alpha - 1.0) * a / (s * s);
  const double lapu = u.laplacian();
  const double uHu = gx * gx * u.hess[0][0] + 2.0 * gx * gy * u.hess[0][1] + gy * gy * u.hess[1][1];
  // H_u grad u components, reused for grad u^T H_u grad z.
  const double hu0 = u.hess[0][0] * gx + u.hess[0][1] * gy;
  const double hu1 = u.hess[1][0] * gx + u.hess[1][1] * gy;
  const T q = gx * z.grad[0] + gy * z.grad[1];
  const T uHz = hu0 * z.grad[0] + hu1 * z.grad[1];
  const T uHzu = gx * gx * z.hess[0][0] + 2.0 * gx * gy * z.hess[0][1] + gy * gy * z.hess[1][1];
  return a * lapz + b * (T(2.0) * uHz + lapu * q + uHzu) + c * uHu * q;
}

/// Conormal flux (a I + b grad u grad u^T) grad z . n of the linearized operator.
template <class T>
T plaplace_conormal(const SpatialJet2& u, const Jet<T>& z, const Vec2& n, const PLaplaceParams& prm) {
  const T dzn = z.grad[0] * n[0] + z.grad[1] * n[1];
  if (prm.p == 2.0) return dzn;
  const double gx = u.grad[0], gy = u.grad[1];
  const double g2 = gx * gx + gy * gy;
  const double alpha = 0.5 * (prm.p - 2.0);
  const double s = g2 + prm.delta * prm.delta;
  const double a = std::pow(s, alpha);
  if (detail::degenerate(prm, g2)) return a * dzn;
  const double b = (prm.p - 2.0) * a / s;
  const T q = gx * z.grad[0] + gy * z.grad[1];
  return a * dzn + b * (gx * n[0] + gy * n[1]) * q;
}

/// Interior residual -A(u) - f, boundary residual B[u] - g. Neumann tags
/// compare the flagged axis derivative.
class PLaplace final : public SystemBase<PLaplace> {
 public:
  using Source = std::function<double(const Vec2&)>;
  using BoundaryData = std::function<double(const Vec2&, BcTag)>;

  PLaplace(PLaplaceParams prm, Source f, BoundaryData g);

  std::string name() const override { return "plaplace"; }
  int n_fields() const override { return 1; }
  int n_interior() const override { return 1; }
  int n_boundary() const override { return 1; }
  void annotate(std::vector<Site>& sites) const override;
  void dual_weights(const Site& s, std::span<const SpatialJet2> u, std::span<const SpatialJet2> z,
                    std::span<double> w) const override;
  double flux_coefficient(const SpatialJet2& u, const Vec2& n) const override;
  std::shared_ptr<PdeSystem> adjoint(std::shared_ptr<const Field> primal, AdjointRhs rhs) const override;
  const PLaplaceParams& params() const { return prm_; }

  template <class T>
  void interior_t(const Site& s, std::span<const Jet<T>> u, std::span<T> r) const {
    r[0] = plaplace_neg_div(u[0], prm_) - s.aux[0];
  }

  template <class T>
  void boundary_t(const Site& s, std::span<const Jet<T>> u, std::span<T> r) const {
    switch (s.tag) {
      case BcTag::dirichlet: r[0] = u[0].value - s.aux[0]; break;
      case BcTag::neumann_x: r[0] = u[0].grad[0] - s.aux[0]; break;
      case BcTag::neumann_y: r[0] = u[0].grad[1] - s.aux[0]; break;
    }
  }

 private:
  PLaplaceParams prm_;
  Source f_;
  BoundaryData g_;
};

/// -A'(u_theta) z - j with z = g on Dirichlet segments and zero conormal
/// flux on the primal's Neumann segments. aux: [j or g, u jet (6)].
class PLaplaceAdjoint final : public SystemBase<PLaplaceAdjoint> {
 public:
  PLaplaceAdjoint(PLaplaceParams prm, std::shared_ptr<const Field> primal, AdjointRhs rhs);

  std::string name() const override { return "plaplace_adjoint"; }
  int n_fields() const override { return 1; }
  int n_interior() const override { return 1; }
  int n_boundary() const override { return 1; }
  void annotate(std::vector<Site>& sites) const override;

  template <class T>
  void interior_t(const Site& s, std::span<const Jet<T>> z, std::span<T> r) const {
    const SpatialJet2 u = unpack_jet(std::span<const double>(s.aux).subspan(1, 6));
    r[0] = -plaplace_frechet(u, z[0], prm_) - s.aux[0];
  }

  template <class T>
  void boundary_t(const Site& s, std::span<const Jet<T>> z, std::span<T> r) const {
    if (s.tag == BcTag::dirichlet) {
      r[0] = z[0].value - s.aux[0];
      return;
    }
    const SpatialJet2 u = unpack_jet(std::span<const double>(s.aux).subspan(1, 6));
    r[0] = plaplace_conormal(u, z[0], s.normal, prm_);
  }

 private:
  PLaplaceParams prm_;
  std::shared_ptr<const Field> primal_;
  AdjointRhs rhs_;
};

}  // namespace dwrnet::pde
