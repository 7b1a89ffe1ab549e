#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "dwrnet/autodiff/jet.hpp"
#include "dwrnet/common.hpp"
#include "dwrnet/network/mlp.hpp"

namespace dwrnet::pde {

using ad::Jet;
using ad::SpatialJet2;

/// Anything that yields value, gradient and Hessian of each component at a point.
class Field {
 public:
  virtual ~Field() = default;
  virtual int n_components() const = 0;
  /// out[p * n_components() + k]
  virtual void jets(std::span<const Vec2> points, std::span<SpatialJet2> out) const = 0;

  std::vector<SpatialJet2> jets(std::span<const Vec2> points) const;
  std::vector<SpatialJet2> jets_at(const Vec2& x) const;
  std::vector<double> values(std::span<const Vec2> points) const;
};

class NetworkField final : public Field {
 public:
  explicit NetworkField(nn::Mlp net) : net_(std::move(net)) {}
  int n_components() const override { return net_.output_dim(); }
  void jets(std::span<const Vec2> points, std::span<SpatialJet2> out) const override;
  using Field::jets;
  const nn::Mlp& net() const { return net_; }

 private:
  nn::Mlp net_;
};

/// Closed-form field written once over jets: f(X, Y, out) with X, Y the
/// seeded coordinate jets.
class AnalyticField final : public Field {
 public:
  using Fn = std::function<void(const SpatialJet2& X, const SpatialJet2& Y, std::span<SpatialJet2> out)>;
  AnalyticField(int n, Fn fn) : n_(n), fn_(std::move(fn)) {}
  int n_components() const override { return n_; }
  void jets(std::span<const Vec2> points, std::span<SpatialJet2> out) const override;
  using Field::jets;

 private:
  int n_;
  Fn fn_;
};

/// Field scaled by a constant (used to probe bilinearity of the estimator).
class ScaledField final : public Field {
 public:
  ScaledField(std::shared_ptr<const Field> base, double c) : base_(std::move(base)), c_(c) {}
  int n_components() const override { return base_->n_components(); }
  void jets(std::span<const Vec2> points, std::span<SpatialJet2> out) const override;
  using Field::jets;

 private:
  std::shared_ptr<const Field> base_;
  double c_;
};

}  // namespace dwrnet::pde
