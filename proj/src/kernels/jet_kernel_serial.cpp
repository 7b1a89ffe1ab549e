#include <algorithm>

#include "dwrnet/kernels/jet_kernel.hpp"

namespace dwrnet::kernels {

namespace {

// Adjoint of one jet with the mixed second derivative stored once.
struct Bar6 {
  double v = 0, gx = 0, gy = 0, hxx = 0, hxy = 0, hyy = 0;
};

class SerialKernel final : public JetKernel {
 public:
  explicit SerialKernel(const nn::Mlp& net) : JetKernel(net) {}

  void forward(std::span<const double> theta, std::span<const Vec2> points, std::span<SpatialJet2> out) override {
    net_.check_theta(theta);
    theta_.assign(theta.begin(), theta.end());
    const auto& slots = net_.layout().layers();
    const std::size_t L = slots.size();
    const int n_out = net_.output_dim();
    if (out.size() != points.size() * static_cast<std::size_t>(n_out))
      throw StructuralError("serial kernel: output span has the wrong size");
    pre_.assign(points.size(), {});
    post_.assign(points.size(), {});
    derivs_.assign(points.size(), {});
    for (std::size_t p = 0; p < points.size(); ++p) {
      auto& pre = pre_[p];
      auto& post = post_[p];
      auto& dv = derivs_[p];
      pre.resize(L + 1);
      post.resize(L + 1);
      dv.resize(L + 1);
      post[0].resize(2);
      for (int k = 0; k < 2; ++k) {
        const double lo = net_.lb()[k], hi = net_.ub()[k];
        post[0][k].value = 2.0 * (points[p][k] - lo) / (hi - lo) - 1.0;
        post[0][k].grad[k] = 2.0 / (hi - lo);
      }
      for (std::size_t l = 0; l < L; ++l) {
        const auto& s = slots[l];
        const bool hidden = l + 1 < L;
        auto& a_l = pre[l + 1];
        auto& y_l = post[l + 1];
        a_l.assign(static_cast<std::size_t>(s.n_out), SpatialJet2{});
        y_l.resize(static_cast<std::size_t>(s.n_out));
        dv[l + 1].resize(static_cast<std::size_t>(s.n_out));
        for (int i = 0; i < s.n_out; ++i) {
          SpatialJet2& a = a_l[static_cast<std::size_t>(i)];
          for (int j = 0; j < s.n_in; ++j) {
            const double w = theta[s.weights + static_cast<std::size_t>(i * s.n_in + j)];
            const SpatialJet2& y = post[l][static_cast<std::size_t>(j)];
            a.value += w * y.value;
            for (int k = 0; k < 2; ++k) {
              a.grad[k] += w * y.grad[k];
              for (int m = 0; m < 2; ++m) a.hess[k][m] += w * y.hess[k][m];
            }
          }
          a.value += theta[s.biases + static_cast<std::size_t>(i)];
          if (hidden) {
            const auto d = ad::activate(net_.activations()[l], a.value);
            dv[l + 1][static_cast<std::size_t>(i)] = d;
            y_l[static_cast<std::size_t>(i)] = ad::chain(a, d.f, d.d1, d.d2);
          } else {
            y_l[static_cast<std::size_t>(i)] = a;
          }
        }
      }
      for (int k = 0; k < n_out; ++k) out[p * static_cast<std::size_t>(n_out) + static_cast<std::size_t>(k)] = post[L][static_cast<std::size_t>(k)];
    }
  }

  void backward(std::span<const SpatialJet2> out_bar, std::span<double> grad) override {
    const auto& slots = net_.layout().layers();
    const std::size_t L = slots.size();
    const auto n_out = static_cast<std::size_t>(net_.output_dim());
    if (grad.size() != net_.num_params()) throw StructuralError("serial kernel: gradient span has the wrong size");
    if (out_bar.size() != pre_.size() * n_out) throw StructuralError("serial kernel: adjoint span has the wrong size");
    std::fill(grad.begin(), grad.end(), 0.0);
    std::vector<Bar6> ybar, abar;
    for (std::size_t p = 0; p < pre_.size(); ++p) {
      ybar.assign(n_out, Bar6{});
      for (std::size_t k = 0; k < n_out; ++k) {
        const SpatialJet2& b = out_bar[p * n_out + k];
        ybar[k] = {b.value, b.grad[0], b.grad[1], b.hess[0][0], b.hess[0][1] + b.hess[1][0], b.hess[1][1]};
      }
      for (std::size_t l = L; l-- > 0;) {
        const auto& s = slots[l];
        const bool hidden = l + 1 < L;
        abar.assign(static_cast<std::size_t>(s.n_out), Bar6{});
        for (int i = 0; i < s.n_out; ++i) {
          const auto ii = static_cast<std::size_t>(i);
          const Bar6& sb = ybar[ii];
          if (!hidden) {
            abar[ii] = sb;
            continue;
          }
          const SpatialJet2& a = pre_[p][l + 1][ii];
          const auto& d = derivs_[p][l + 1][ii];
          const double gx = a.grad[0], gy = a.grad[1];
          Bar6& ab = abar[ii];
          ab.v = d.d1 * sb.v + d.d2 * (sb.gx * gx + sb.gy * gy) +
                 d.d3 * (sb.hxx * gx * gx + sb.hxy * gx * gy + sb.hyy * gy * gy) +
                 d.d2 * (sb.hxx * a.hess[0][0] + sb.hxy * a.hess[0][1] + sb.hyy * a.hess[1][1]);
          ab.gx = d.d1 * sb.gx + d.d2 * (2.0 * sb.hxx * gx + sb.hxy * gy);
          ab.gy = d.d1 * sb.gy + d.d2 * (2.0 * sb.hyy * gy + sb.hxy * gx);
          ab.hxx = d.d1 * sb.hxx;
          ab.hxy = d.d1 * sb.hxy;
          ab.hyy = d.d1 * sb.hyy;
        }
        std::vector<Bar6> prev(static_cast<std::size_t>(s.n_in));
        for (int i = 0; i < s.n_out; ++i) {
          const Bar6& ab = abar[static_cast<std::size_t>(i)];
          grad[s.biases + static_cast<std::size_t>(i)] += ab.v;
          for (int j = 0; j < s.n_in; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            const SpatialJet2& y = post_[p][l][jj];
            const std::size_t w_idx = s.weights + static_cast<std::size_t>(i * s.n_in + j);
            grad[w_idx] += ab.v * y.value + ab.gx * y.grad[0] + ab.gy * y.grad[1] + ab.hxx * y.hess[0][0] +
                           ab.hxy * y.hess[0][1] + ab.hyy * y.hess[1][1];
            const double w = theta_[w_idx];
            Bar6& pb = prev[jj];
            pb.v += w * ab.v;
            pb.gx += w * ab.gx;
            pb.gy += w * ab.gy;
            pb.hxx += w * ab.hxx;
            pb.hxy += w * ab.hxy;
            pb.hyy += w * ab.hyy;
          }
        }
        ybar.swap(prev);
      }
    }
  }

 private:
  std::vector<double> theta_;
  std::vector<std::vector<std::vector<SpatialJet2>>> pre_;
  std::vector<std::vector<std::vector<SpatialJet2>>> post_;
  std::vector<std::vector<std::vector<ad::ActivationDerivs>>> derivs_;
};

}  // namespace

std::unique_ptr<JetKernel> make_serial_kernel(const nn::Mlp& net) { return std::make_unique<SerialKernel>(net); }

KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "serial") return KernelKind::serial;
  if (name == "omp") return KernelKind::omp;
  throw ConfigError("unknown kernel '" + name + "'");
}

std::unique_ptr<JetKernel> make_kernel(const nn::Mlp& net, KernelKind kind) {
  return kind == KernelKind::serial ? make_serial_kernel(net) : make_omp_kernel(net);
}

}  // namespace dwrnet::kernels
