#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <omp.h>

#include "dwrnet/kernels/jet_kernel.hpp"

namespace dwrnet::kernels {

namespace {

using Mat = Eigen::MatrixXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstWeights = Eigen::Map<const RowMat>;
using Arr = Eigen::ArrayXXd;

// Activation and its first three derivatives, elementwise over t.
void activate_block(ad::Activation act, const Arr& t, Arr& f, Arr& d1, Arr& d2, Arr& d3) {
  switch (act) {
    case ad::Activation::tanh: {
      f = t.unaryExpr([](double v) { return std::tanh(v); });
      d1 = 1.0 - f.square();
      d2 = -2.0 * f * d1;
      d3 = d1 * (6.0 * f.square() - 2.0);
      return;
    }
    case ad::Activation::sigmoid: {
      f = 1.0 / (1.0 + (-t).exp());
      d1 = f * (1.0 - f);
      d2 = d1 * (1.0 - 2.0 * f);
      d3 = d1 * (1.0 - 6.0 * f + 6.0 * f.square());
      return;
    }
    case ad::Activation::swish: {
      const Arr s = 1.0 / (1.0 + (-t).exp());
      const Arr s1 = s * (1.0 - s);
      const Arr s2 = s1 * (1.0 - 2.0 * s);
      const Arr s3 = s1 * (1.0 - 6.0 * s + 6.0 * s.square());
      f = t * s;
      d1 = s + t * s1;
      d2 = 2.0 * s1 + t * s2;
      d3 = 3.0 * s2 + t * s3;
      return;
    }
    case ad::Activation::linear:
      f = t;
      d1.setOnes(t.rows(), t.cols());
      d2.setZero(t.rows(), t.cols());
      d3.setZero(t.rows(), t.cols());
      return;
  }
}

// Column blocks of a chunk matrix, each C wide.
enum Block { V = 0, GX, GY, HXX, HXY, HYY };

struct Chunk {
  std::size_t first = 0;
  int count = 0;
  std::vector<Mat> pre;   // per layer 1..L, n_l x 6C
  std::vector<Mat> post;  // per layer 0..L-1 (inputs of the next affine map)
  std::vector<Arr> d1, d2, d3;
  Eigen::VectorXd grad;
};

class OmpKernel final : public JetKernel {
 public:
  OmpKernel(const nn::Mlp& net, int chunk) : JetKernel(net), chunk_(std::max(1, chunk)) {}

  void forward(std::span<const double> theta, std::span<const Vec2> points, std::span<SpatialJet2> out) override {
    net_.check_theta(theta);
    theta_.assign(theta.begin(), theta.end());
    const auto n_out = static_cast<std::size_t>(net_.output_dim());
    if (out.size() != points.size() * n_out) throw StructuralError("omp kernel: output span has the wrong size");
    const std::size_t n_chunks = (points.size() + static_cast<std::size_t>(chunk_) - 1) / static_cast<std::size_t>(chunk_);
    chunks_.resize(n_chunks);
#pragma omp parallel for schedule(static)
    for (long c = 0; c < static_cast<long>(n_chunks); ++c) {
      Chunk& ch = chunks_[static_cast<std::size_t>(c)];
      ch.first = static_cast<std::size_t>(c) * static_cast<std::size_t>(chunk_);
      ch.count = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(chunk_), points.size() - ch.first));
      forward_chunk(ch, points.subspan(ch.first, static_cast<std::size_t>(ch.count)));
      const Mat& y = ch.pre.back();
      const int C = ch.count;
      for (int q = 0; q < C; ++q) {
        for (std::size_t k = 0; k < n_out; ++k) {
          const auto r = static_cast<Eigen::Index>(k);
          SpatialJet2& j = out[(ch.first + static_cast<std::size_t>(q)) * n_out + k];
          j.value = y(r, V * C + q);
          j.grad = {y(r, GX * C + q), y(r, GY * C + q)};
          j.hess[0] = {y(r, HXX * C + q), y(r, HXY * C + q)};
          j.hess[1] = {y(r, HXY * C + q), y(r, HYY * C + q)};
        }
      }
    }
  }

  void backward(std::span<const SpatialJet2> out_bar, std::span<double> grad) override {
    const auto n_out = static_cast<std::size_t>(net_.output_dim());
    if (grad.size() != net_.num_params()) throw StructuralError("omp kernel: gradient span has the wrong size");
    std::size_t total = 0;
    for (const auto& ch : chunks_) total += static_cast<std::size_t>(ch.count);
    if (out_bar.size() != total * n_out) throw StructuralError("omp kernel: adjoint span has the wrong size");
#pragma omp parallel for schedule(static)
    for (long c = 0; c < static_cast<long>(chunks_.size()); ++c) {
      Chunk& ch = chunks_[static_cast<std::size_t>(c)];
      const int C = ch.count;
      Mat bar(static_cast<Eigen::Index>(n_out), 6 * C);
      for (int q = 0; q < C; ++q) {
        for (std::size_t k = 0; k < n_out; ++k) {
          const auto r = static_cast<Eigen::Index>(k);
          const SpatialJet2& b = out_bar[(ch.first + static_cast<std::size_t>(q)) * n_out + k];
          bar(r, V * C + q) = b.value;
          bar(r, GX * C + q) = b.grad[0];
          bar(r, GY * C + q) = b.grad[1];
          bar(r, HXX * C + q) = b.hess[0][0];
          bar(r, HXY * C + q) = b.hess[0][1] + b.hess[1][0];
          bar(r, HYY * C + q) = b.hess[1][1];
        }
      }
      backward_chunk(ch, bar);
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const auto& ch : chunks_) {
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += ch.grad[static_cast<Eigen::Index>(i)];
    }
  }

 private:
  void forward_chunk(Chunk& ch, std::span<const Vec2> pts) {
    const auto& slots = net_.layout().layers();
    const std::size_t L = slots.size();
    const int C = ch.count;
    ch.pre.resize(L);
    ch.post.resize(L);
    ch.d1.resize(L);
    ch.d2.resize(L);
    ch.d3.resize(L);
    Mat& y0 = ch.post[0];
    y0.setZero(2, 6 * C);
    for (int k = 0; k < 2; ++k) {
      const double lo = net_.lb()[k], hi = net_.ub()[k];
      for (int q = 0; q < C; ++q) {
        y0(k, V * C + q) = 2.0 * (pts[static_cast<std::size_t>(q)][k] - lo) / (hi - lo) - 1.0;
        y0(k, (k == 0 ? GX : GY) * C + q) = 2.0 / (hi - lo);
      }
    }
    for (std::size_t l = 0; l < L; ++l) {
      const auto& s = slots[l];
      ConstWeights w(theta_.data() + s.weights, s.n_out, s.n_in);
      Eigen::Map<const Eigen::VectorXd> b(theta_.data() + s.biases, s.n_out);
      Mat& a = ch.pre[l];
      a.noalias() = w * ch.post[l];
      a.leftCols(C).colwise() += b;
      if (l + 1 == L) break;
      Arr& d1 = ch.d1[l];
      Arr& d2 = ch.d2[l];
      Arr& d3 = ch.d3[l];
      Mat& y = ch.post[l + 1];
      y.resize(s.n_out, 6 * C);
      auto A = [&](Block k) { return a.middleCols(k * C, C).array(); };
      auto Y = [&](Block k) { return y.middleCols(k * C, C).array(); };
      Arr f;
      activate_block(net_.activations()[l], A(V), f, d1, d2, d3);
      Y(V) = f;
      Y(GX) = d1 * A(GX);
      Y(GY) = d1 * A(GY);
      Y(HXX) = d2 * A(GX).square() + d1 * A(HXX);
      Y(HXY) = d2 * A(GX) * A(GY) + d1 * A(HXY);
      Y(HYY) = d2 * A(GY).square() + d1 * A(HYY);
    }
  }

  void backward_chunk(Chunk& ch, Mat& bar) {
    const auto& slots = net_.layout().layers();
    const std::size_t L = slots.size();
    const int C = ch.count;
    ch.grad.setZero(static_cast<Eigen::Index>(net_.num_params()));
    Mat abar;
    for (std::size_t l = L; l-- > 0;) {
      const auto& s = slots[l];
      if (l + 1 == L) {
        abar.swap(bar);
      } else {
        const Mat& a = ch.pre[l];
        const Arr& f1 = ch.d1[l];
        const Arr& f2 = ch.d2[l];
        const Arr& f3 = ch.d3[l];
        abar.resize(s.n_out, 6 * C);
        auto A = [&](Block k) { return a.middleCols(k * C, C).array(); };
        auto S = [&](Block k) { return bar.middleCols(k * C, C).array(); };
        auto R = [&](Block k) { return abar.middleCols(k * C, C).array(); };
        const auto gx = A(GX), gy = A(GY);
        R(V) = f1 * S(V) + f2 * (S(GX) * gx + S(GY) * gy) +
               f3 * (S(HXX) * gx.square() + S(HXY) * gx * gy + S(HYY) * gy.square()) +
               f2 * (S(HXX) * A(HXX) + S(HXY) * A(HXY) + S(HYY) * A(HYY));
        R(GX) = f1 * S(GX) + f2 * (2.0 * S(HXX) * gx + S(HXY) * gy);
        R(GY) = f1 * S(GY) + f2 * (2.0 * S(HYY) * gy + S(HXY) * gx);
        R(HXX) = f1 * S(HXX);
        R(HXY) = f1 * S(HXY);
        R(HYY) = f1 * S(HYY);
      }
      Eigen::Map<RowMat> gw(ch.grad.data() + s.weights, s.n_out, s.n_in);
      gw.noalias() += abar * ch.post[l].transpose();
      Eigen::Map<Eigen::VectorXd> gb(ch.grad.data() + s.biases, s.n_out);
      gb += abar.leftCols(C).rowwise().sum();
      if (l > 0) {
        ConstWeights w(theta_.data() + s.weights, s.n_out, s.n_in);
        bar.noalias() = w.transpose() * abar;
      }
    }
  }

  int chunk_;
  std::vector<double> theta_;
  std::vector<Chunk> chunks_;
};

}  // namespace

std::unique_ptr<JetKernel> make_omp_kernel(const nn::Mlp& net, int chunk) {
  return std::make_unique<OmpKernel>(net, chunk);
}

void set_num_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

}  // namespace dwrnet::kernels
