#include "dwrnet/network/mlp.hpp"

#include <random>
#include <sstream>

namespace dwrnet::nn {

ParamLayout::ParamLayout(const std::vector<int>& layer_sizes) {
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    LayerSlot s;
    s.n_in = layer_sizes[l];
    s.n_out = layer_sizes[l + 1];
    s.weights = offset;
    offset += static_cast<std::size_t>(s.n_in) * static_cast<std::size_t>(s.n_out);
    s.biases = offset;
    offset += static_cast<std::size_t>(s.n_out);
    slots_.push_back(s);
  }
  size_ = offset;
}

std::vector<std::pair<std::vector<double>, std::vector<double>>> ParamLayout::unflatten(
    std::span<const double> theta) const {
  if (theta.size() != size_) throw StructuralError("unflatten: parameter length mismatch");
  std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
  for (const auto& s : slots_) {
    const auto nw = static_cast<std::size_t>(s.n_in * s.n_out);
    std::vector<double> w(theta.begin() + static_cast<long>(s.weights),
                          theta.begin() + static_cast<long>(s.weights + nw));
    std::vector<double> b(theta.begin() + static_cast<long>(s.biases),
                          theta.begin() + static_cast<long>(s.biases) + s.n_out);
    out.emplace_back(std::move(w), std::move(b));
  }
  return out;
}

ParamVector ParamLayout::flatten(const std::vector<std::pair<std::vector<double>, std::vector<double>>>& blocks) const {
  if (blocks.size() != slots_.size()) throw StructuralError("flatten: layer count mismatch");
  ParamVector theta(size_);
  for (std::size_t l = 0; l < slots_.size(); ++l) {
    const auto& s = slots_[l];
    const auto& [w, b] = blocks[l];
    if (w.size() != static_cast<std::size_t>(s.n_in * s.n_out) || b.size() != static_cast<std::size_t>(s.n_out))
      throw StructuralError("flatten: block shape mismatch");
    std::copy(w.begin(), w.end(), theta.begin() + static_cast<long>(s.weights));
    std::copy(b.begin(), b.end(), theta.begin() + static_cast<long>(s.biases));
  }
  return theta;
}

BiasInit parse_bias_init(const std::string& name) {
  if (name == "zeros") return BiasInit::zeros;
  if (name == "normal") return BiasInit::normal;
  throw ConfigError("unknown bias_init '" + name + "'");
}

std::string to_string(BiasInit b) { return b == BiasInit::zeros ? "zeros" : "normal"; }

Mlp::Mlp(std::vector<int> layer_sizes, std::vector<Activation> hidden_activations, std::vector<double> lb,
         std::vector<double> ub)
    : sizes_(std::move(layer_sizes)), acts_(std::move(hidden_activations)), lb_(std::move(lb)), ub_(std::move(ub)) {
  if (sizes_.size() < 2) throw StructuralError("Mlp needs at least input and output layers");
  for (int n : sizes_) {
    if (n <= 0) throw StructuralError("Mlp layer sizes must be positive");
  }
  if (acts_.size() != sizes_.size() - 2) {
    std::ostringstream msg;
    msg << "Mlp: expected " << sizes_.size() - 2 << " hidden activations, got " << acts_.size();
    throw StructuralError(msg.str());
  }
  if (lb_.size() != static_cast<std::size_t>(sizes_.front()) || ub_.size() != lb_.size())
    throw StructuralError("Mlp: normalization bounds must match the input dimension");
  for (std::size_t k = 0; k < lb_.size(); ++k) {
    if (!(lb_[k] < ub_[k])) throw ConfigError("Mlp: normalization bounds need lb < ub in every component");
  }
  layout_ = ParamLayout(sizes_);
  theta_.assign(layout_.size(), 0.0);
}

void Mlp::set_theta(ParamVector theta) {
  check_theta(theta);
  theta_ = std::move(theta);
}

void Mlp::check_theta(std::span<const double> theta) const {
  if (theta.size() != layout_.size()) {
    std::ostringstream msg;
    msg << "parameter vector has " << theta.size() << " entries, network layout needs " << layout_.size();
    throw StructuralError(msg.str());
  }
}

std::vector<double> Mlp::normalize_input(std::span<const double> x) const {
  std::vector<double> h(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) h[k] = 2.0 * (x[k] - lb_[k]) / (ub_[k] - lb_[k]) - 1.0;
  return h;
}

void Mlp::forward(std::span<const double> theta, std::span<const double> x, std::span<double> out) const {
  check_theta(theta);
  std::vector<double> cur = normalize_input(x);
  std::vector<double> next;
  const auto& slots = layout_.layers();
  for (std::size_t l = 0; l < slots.size(); ++l) {
    const auto& s = slots[l];
    next.assign(static_cast<std::size_t>(s.n_out), 0.0);
    const bool hidden = l + 1 < slots.size();
    for (int i = 0; i < s.n_out; ++i) {
      const double* w = theta.data() + s.weights + static_cast<std::size_t>(i * s.n_in);
      double acc = 0.0;
      for (int j = 0; j < s.n_in; ++j) acc += w[j] * cur[static_cast<std::size_t>(j)];
      acc += theta[s.biases + static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(i)] = hidden ? ad::activate(acts_[l], acc).f : acc;
    }
    cur.swap(next);
  }
  std::copy(cur.begin(), cur.end(), out.begin());
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
  std::vector<double> out(static_cast<std::size_t>(output_dim()));
  forward(theta_, x, out);
  return out;
}

void Mlp::jet_eval(std::span<const double> theta, const Vec2& x, std::span<SpatialJet2> out) const {
  check_theta(theta);
  if (input_dim() != 2) throw StructuralError("jet_eval requires a two-dimensional input");
  std::vector<SpatialJet2> cur(2);
  for (int k = 0; k < 2; ++k) {
    const double scale = 2.0 / (ub_[k] - lb_[k]);
    cur[k].value = 2.0 * (x[k] - lb_[k]) / (ub_[k] - lb_[k]) - 1.0;
    cur[k].grad[k] = scale;
  }
  std::vector<SpatialJet2> next;
  const auto& slots = layout_.layers();
  for (std::size_t l = 0; l < slots.size(); ++l) {
    const auto& s = slots[l];
    next.assign(static_cast<std::size_t>(s.n_out), SpatialJet2{});
    const bool hidden = l + 1 < slots.size();
    for (int i = 0; i < s.n_out; ++i) {
      const double* w = theta.data() + s.weights + static_cast<std::size_t>(i * s.n_in);
      SpatialJet2 a;
      for (int j = 0; j < s.n_in; ++j) {
        const SpatialJet2& y = cur[static_cast<std::size_t>(j)];
        a.value += w[j] * y.value;
        for (int k = 0; k < 2; ++k) {
          a.grad[k] += w[j] * y.grad[k];
          for (int m = 0; m < 2; ++m) a.hess[k][m] += w[j] * y.hess[k][m];
        }
      }
      a.value += theta[s.biases + static_cast<std::size_t>(i)];
      if (hidden) {
        const auto d = ad::activate(acts_[l], a.value);
        a = ad::chain(a, d.f, d.d1, d.d2);
      }
      next[static_cast<std::size_t>(i)] = a;
    }
    cur.swap(next);
  }
  std::copy(cur.begin(), cur.end(), out.begin());
}

std::vector<SpatialJet2> Mlp::jet_eval(const Vec2& x) const {
  std::vector<SpatialJet2> out(static_cast<std::size_t>(output_dim()));
  jet_eval(theta_, x, out);
  return out;
}

double xavier_stddev(int fan_in, int fan_out) { return std::sqrt(2.0 / static_cast<double>(fan_in + fan_out)); }

ParamVector xavier_init(const std::vector<int>& layer_sizes, std::uint64_t seed, BiasInit bias) {
  ParamLayout layout(layer_sizes);
  ParamVector theta(layout.size(), 0.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> standard(0.0, 1.0);
  for (const auto& s : layout.layers()) {
    const double sd = xavier_stddev(s.n_in, s.n_out);
    const std::size_t nw = static_cast<std::size_t>(s.n_in * s.n_out);
    for (std::size_t k = 0; k < nw; ++k) {
      double z = standard(rng);
      while (std::abs(z) > 2.0) z = standard(rng);
      theta[s.weights + k] = sd * z;
    }
    if (bias == BiasInit::normal) {
      for (int i = 0; i < s.n_out; ++i) theta[s.biases + static_cast<std::size_t>(i)] = standard(rng);
    }
  }
  return theta;
}

}  // namespace dwrnet::nn
