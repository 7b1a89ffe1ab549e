#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dwrnet/autodiff/activation.hpp"
#include "dwrnet/autodiff/jet.hpp"
#include "dwrnet/common.hpp"

namespace dwrnet::nn {

using ad::Activation;
using ad::SpatialJet2;

/// Offsets of one affine layer inside the flat parameter vector. Weights are
/// stored row-major as n_out x n_in, followed by the n_out biases.
struct LayerSlot {
  int n_in = 0;
  int n_out = 0;
  std::size_t weights = 0;
  std::size_t biases = 0;
};

class ParamLayout {
 public:
  ParamLayout() = default;
  explicit ParamLayout(const std::vector<int>& layer_sizes);

  const std::vector<LayerSlot>& layers() const { return slots_; }
  std::size_t size() const { return size_; }

  /// Splits theta into per-layer (weights, biases) copies.
  std::vector<std::pair<std::vector<double>, std::vector<double>>> unflatten(std::span<const double> theta) const;
  ParamVector flatten(const std::vector<std::pair<std::vector<double>, std::vector<double>>>& blocks) const;

 private:
  std::vector<LayerSlot> slots_;
  std::size_t size_ = 0;
};

enum class BiasInit { zeros, normal };

BiasInit parse_bias_init(const std::string& name);
std::string to_string(BiasInit b);

/// Fully connected network with a linear output layer. Inputs are mapped to
/// [-1, 1] through the normalization bounds before the first layer.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> layer_sizes, std::vector<Activation> hidden_activations, std::vector<double> lb,
      std::vector<double> ub);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  const std::vector<Activation>& activations() const { return acts_; }
  const std::vector<double>& lb() const { return lb_; }
  const std::vector<double>& ub() const { return ub_; }
  const ParamLayout& layout() const { return layout_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  std::size_t num_params() const { return layout_.size(); }

  ParamVector& theta() { return theta_; }
  const ParamVector& theta() const { return theta_; }
  void set_theta(ParamVector theta);

  /// Throws StructuralError if theta does not match the layout.
  void check_theta(std::span<const double> theta) const;

  std::vector<double> normalize_input(std::span<const double> x) const;

  /// Jet-free evaluation; same arithmetic order as the value part of jet_eval.
  void forward(std::span<const double> theta, std::span<const double> x, std::span<double> out) const;
  std::vector<double> forward(std::span<const double> x) const;

  /// Value, gradient and Hessian of every output with respect to x (2D input).
  void jet_eval(std::span<const double> theta, const Vec2& x, std::span<SpatialJet2> out) const;
  std::vector<SpatialJet2> jet_eval(const Vec2& x) const;

 private:
  std::vector<int> sizes_;
  std::vector<Activation> acts_;
  std::vector<double> lb_;
  std::vector<double> ub_;
  ParamLayout layout_;
  ParamVector theta_;
};

/// Truncated-normal Xavier weights (stddev sqrt(2/(fan_in+fan_out)), draws
/// beyond two standard deviations are redrawn). Biases are zero, or
/// standard normal when requested.
ParamVector xavier_init(const std::vector<int>& layer_sizes, std::uint64_t seed, BiasInit bias = BiasInit::zeros);

double xavier_stddev(int fan_in, int fan_out);

}  // namespace dwrnet::nn
