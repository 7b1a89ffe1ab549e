#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "dwrnet/common.hpp"

namespace dwrnet::ad {

enum class Op : std::uint8_t {
  leaf,
  add,
  sub,
  mul,
  div,
  neg,
  add_c,
  mul_c,
  rsub_c,  // c - a
  rdiv_c,  // c / a
  exp,
  log,
  sqrt,
  pow_c,
  tanh,
  sigmoid,
  swish,
  smooth_abs,  // sqrt(a^2 + c^2)
  square,
};

class Var;

/// Append-only Wengert list for reverse-mode differentiation of scalar
/// expressions. One tape per worker; not thread safe.
class Tape {
 public:
  struct Node {
    Op op;
    int a;
    int b;
    double param;
  };

  Var leaf(double value);

  int push(Op op, int a, int b, double param, double value) {
    nodes_.push_back({op, a, b, param});
    values_.push_back(value);
    return static_cast<int>(nodes_.size()) - 1;
  }

  /// Reverse sweep seeded at `output`. Returns the number of nodes visited.
  std::size_t backward(const Var& output);

  double adjoint(const Var& v) const;
  double value(int index) const { return values_[static_cast<std::size_t>(index)]; }

  /// Re-evaluates every node forward from new leaf values (in leaf creation
  /// order) and returns the resulting node values.
  std::vector<double> replay(std::span<const double> leaf_values) const;

  void clear() {
    nodes_.clear();
    values_.clear();
    adjoints_.clear();
  }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::vector<double> adjoints_;
};

/// Handle to a tape node. A Var without a tape is a constant.
class Var {
 public:
  Var() = default;
  Var(double v) : value_(v) {}  // NOLINT: implicit constants are intended
  Var(Tape* tape, int index, double v) : tape_(tape), index_(index), value_(v) {}

  double value() const { return value_; }
  int index() const { return index_; }
  Tape* tape() const { return tape_; }
  bool is_constant() const { return tape_ == nullptr; }

 private:
  Tape* tape_ = nullptr;
  int index_ = -1;
  double value_ = 0.0;
};

inline Var Tape::leaf(double value) { return Var(this, push(Op::leaf, -1, -1, 0.0, value), value); }

namespace detail {

double sigmoid(double t);

inline Var unary(const Var& a, Op op, double param, double value) {
  if (a.is_constant()) return Var(value);
  return Var(a.tape(), a.tape()->push(op, a.index(), -1, param, value), value);
}

}  // namespace detail

inline Var operator+(const Var& a, const Var& b) {
  double v = a.value() + b.value();
  if (a.is_constant()) return detail::unary(b, Op::add_c, a.value(), v);
  if (b.is_constant()) return detail::unary(a, Op::add_c, b.value(), v);
  return Var(a.tape(), a.tape()->push(Op::add, a.index(), b.index(), 0.0, v), v);
}

inline Var operator-(const Var& a) { return detail::unary(a, Op::neg, 0.0, -a.value()); }

inline Var operator-(const Var& a, const Var& b) {
  double v = a.value() - b.value();
  if (a.is_constant()) return detail::unary(b, Op::rsub_c, a.value(), v);
  if (b.is_constant()) return detail::unary(a, Op::add_c, -b.value(), v);
  return Var(a.tape(), a.tape()->push(Op::sub, a.index(), b.index(), 0.0, v), v);
}

inline Var operator*(const Var& a, const Var& b) {
  double v = a.value() * b.value();
  if (a.is_constant()) return detail::unary(b, Op::mul_c, a.value(), v);
  if (b.is_constant()) return detail::unary(a, Op::mul_c, b.value(), v);
  return Var(a.tape(), a.tape()->push(Op::mul, a.index(), b.index(), 0.0, v), v);
}

inline Var operator/(const Var& a, const Var& b) {
  double v = a.value() / b.value();
  if (a.is_constant()) return detail::unary(b, Op::rdiv_c, a.value(), v);
  if (b.is_constant()) return detail::unary(a, Op::mul_c, 1.0 / b.value(), v);
  return Var(a.tape(), a.tape()->push(Op::div, a.index(), b.index(), 0.0, v), v);
}

inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }

inline Var exp(const Var& a) {
  double v = std::exp(a.value());
  return detail::unary(a, Op::exp, 0.0, v);
}
inline Var log(const Var& a) { return detail::unary(a, Op::log, 0.0, std::log(a.value())); }
inline Var sqrt(const Var& a) { return detail::unary(a, Op::sqrt, 0.0, std::sqrt(a.value())); }
inline Var pow(const Var& a, double p) { return detail::unary(a, Op::pow_c, p, std::pow(a.value(), p)); }
inline Var tanh(const Var& a) { return detail::unary(a, Op::tanh, 0.0, std::tanh(a.value())); }
inline Var sigmoid(const Var& a) {
  return detail::unary(a, Op::sigmoid, 0.0, detail::sigmoid(a.value()));
}
inline Var swish(const Var& a) {
  return detail::unary(a, Op::swish, 0.0, a.value() * detail::sigmoid(a.value()));
}
inline Var square(const Var& a) { return detail::unary(a, Op::square, 0.0, a.value() * a.value()); }
/// |a| smoothed as sqrt(a^2 + eps^2).
inline Var smooth_abs(const Var& a, double eps) {
  return detail::unary(a, Op::smooth_abs, eps, std::sqrt(a.value() * a.value() + eps * eps));
}

inline double value_of(double v) { return v; }
inline double value_of(const Var& v) { return v.value(); }

// Double overloads so residual templates compile for both scalar types.
inline double square(double a) { return a * a; }
inline double smooth_abs(double a, double eps) { return std::sqrt(a * a + eps * eps); }

/// Loss value and exact gradient of a scalar closure over the parameters.
struct ValueGrad {
  double value = 0.0;
  std::vector<double> grad;
};

ValueGrad loss_grad(const std::function<Var(std::span<const Var>)>& loss, std::span<const double> theta);

}  // namespace dwrnet::ad
