#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dwrnet/autodiff/jet.hpp"
#include "dwrnet/autodiff/tape.hpp"
#include "dwrnet/geometry/collocation.hpp"
#include "dwrnet/problems/field.hpp"

namespace dwrnet::pde {

using ad::Var;
using geo::BcTag;

/// One collocation or test location together with data precomputed by the
/// system (sources, boundary data, frozen primal jets).
struct Site {
  Vec2 x{};
  Vec2 normal{};
  BcTag tag = BcTag::dirichlet;
  bool boundary = false;
  int segment = -1;
  double weight = 0.0;  // measure weight (area or arc length) for the estimator
  std::vector<double> aux;
};

std::vector<Site> interior_sites(std::span<const Vec2> points, double weight_each = 0.0);
std::vector<Site> boundary_sites(const geo::CollocationSet& colloc);

/// Adjoint right-hand side J'(u_theta) as pointwise data: an interior
/// density per field component, and Dirichlet values for the adjoint on
/// boundary segments (from flux-type functionals). Callbacks add into a
/// zero-initialized buffer.
struct AdjointRhs {
  int n_components = 1;
  std::function<void(const Vec2& x, std::span<double> j)> interior;
  std::function<void(const Vec2& x, const Vec2& normal, int segment, std::span<double> g)> boundary;

  static AdjointRhs zero(int n);
  /// sum_k c_k * parts_k
  static AdjointRhs combine(const std::vector<AdjointRhs>& parts, const std::vector<double>& coeffs);
};

/// Strong-form residual operator. Interior residuals are N(u) - f; boundary
/// residuals are B[u] - g. Both are evaluated over double jets (plain
/// evaluation) and tape-variable jets (for the loss gradient).
class PdeSystem {
 public:
  virtual ~PdeSystem() = default;
  virtual std::string name() const = 0;
  virtual int n_fields() const = 0;
  virtual int n_interior() const = 0;
  virtual int n_boundary() const = 0;

  /// Fills Site::aux. Called once per point set.
  virtual void annotate(std::vector<Site>& sites) const = 0;

  virtual void interior(const Site& s, std::span<const Jet<double>> u, std::span<double> r) const = 0;
  virtual void interior(const Site& s, std::span<const Jet<Var>> u, std::span<Var> r) const = 0;
  virtual void boundary(const Site& s, std::span<const Jet<double>> u, std::span<double> r) const = 0;
  virtual void boundary(const Site& s, std::span<const Jet<Var>> u, std::span<Var> r) const = 0;

  /// Estimator weights pairing primal residual components with the adjoint:
  /// eta contribution = -weight(site) * sum_k r_k * w_k.
  virtual void dual_weights(const Site& s, std::span<const SpatialJet2> u, std::span<const SpatialJet2> z,
                            std::span<double> w) const;

  /// Coefficient c with (linearized conormal flux of z) = c * dz/dn when z
  /// vanishes along the boundary; converts flux functionals into adjoint
  /// Dirichlet data.
  virtual double flux_coefficient(const SpatialJet2& u, const Vec2& n) const;

  /// Adjoint system linearized at the frozen primal field.
  virtual std::shared_ptr<PdeSystem> adjoint(std::shared_ptr<const Field> primal, AdjointRhs rhs) const;

  /// sum_k r_k^2 * scale and its adjoint w.r.t. the field jets (bar
  /// overwritten). Uses the caller's tape as scratch.
  double point_loss_grad(const Site& s, std::span<const SpatialJet2> u, double scale, std::span<SpatialJet2> bar,
                         ad::Tape& tape) const;
  double point_loss(const Site& s, std::span<const SpatialJet2> u) const;
  std::vector<double> residual(const Site& s, std::span<const SpatialJet2> u) const;
};

/// Forwards the four evaluation virtuals to templated members
/// `interior_t<T>` and `boundary_t<T>` of Derived.
template <class Derived>
class SystemBase : public PdeSystem {
 public:
  void interior(const Site& s, std::span<const Jet<double>> u, std::span<double> r) const override {
    self().template interior_t<double>(s, u, r);
  }
  void interior(const Site& s, std::span<const Jet<Var>> u, std::span<Var> r) const override {
    self().template interior_t<Var>(s, u, r);
  }
  void boundary(const Site& s, std::span<const Jet<double>> u, std::span<double> r) const override {
    self().template boundary_t<double>(s, u, r);
  }
  void boundary(const Site& s, std::span<const Jet<Var>> u, std::span<Var> r) const override {
    self().template boundary_t<Var>(s, u, r);
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

/// Packs a jet into (v, gx, gy, hxx, hxy, hyy) and back.
void pack_jet(const SpatialJet2& j, std::span<double> out6);
SpatialJet2 unpack_jet(std::span<const double> in6);

}  // namespace dwrnet::pde
