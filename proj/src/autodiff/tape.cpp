#include "dwrnet/autodiff/tape.hpp"

#include <cmath>
#include <sstream>

namespace dwrnet::ad {

namespace detail {

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace detail

namespace {

double apply(Op op, double a, double b, double param) {
  switch (op) {
    case Op::leaf:
      return a;
    case Op::add:
      return a + b;
    case Op::sub:
      return a - b;
    case Op::mul:
      return a * b;
    case Op::div:
      return a / b;
    case Op::neg:
      return -a;
    case Op::add_c:
      return a + param;
    case Op::mul_c:
      return a * param;
    case Op::rsub_c:
      return param - a;
    case Op::rdiv_c:
      return param / a;
    case Op::exp:
      return std::exp(a);
    case Op::log:
      return std::log(a);
    case Op::sqrt:
      return std::sqrt(a);
    case Op::pow_c:
      return std::pow(a, param);
    case Op::tanh:
      return std::tanh(a);
    case Op::sigmoid:
      return detail::sigmoid(a);
    case Op::swish:
      return a * detail::sigmoid(a);
    case Op::smooth_abs:
      return std::sqrt(a * a + param * param);
    case Op::square:
      return a * a;
  }
  return 0.0;
}

}  // namespace

std::size_t Tape::backward(const Var& output) {
  adjoints_.assign(nodes_.size(), 0.0);
  if (output.is_constant()) return 0;
  adjoints_[static_cast<std::size_t>(output.index())] = 1.0;
  std::size_t visited = 0;
  for (int i = output.index(); i >= 0; --i) {
    ++visited;
    const std::size_t u = static_cast<std::size_t>(i);
    const double g = adjoints_[u];
    if (g == 0.0) continue;
    const Node& n = nodes_[u];
    const double v = values_[u];
    const double a = n.a >= 0 ? values_[static_cast<std::size_t>(n.a)] : 0.0;
    const double b = n.b >= 0 ? values_[static_cast<std::size_t>(n.b)] : 0.0;
    double da = 0.0;
    double db = 0.0;
    switch (n.op) {
      case Op::leaf:
        continue;
      case Op::add:
        da = 1.0;
        db = 1.0;
        break;
      case Op::sub:
        da = 1.0;
        db = -1.0;
        break;
      case Op::mul:
        da = b;
        db = a;
        break;
      case Op::div:
        da = 1.0 / b;
        db = -a / (b * b);
        break;
      case Op::neg:
        da = -1.0;
        break;
      case Op::add_c:
        da = 1.0;
        break;
      case Op::mul_c:
        da = n.param;
        break;
      case Op::rsub_c:
        da = -1.0;
        break;
      case Op::rdiv_c:
        da = -n.param / (a * a);
        break;
      case Op::exp:
        da = v;
        break;
      case Op::log:
        da = 1.0 / a;
        break;
      case Op::sqrt:
        da = 0.5 / v;
        break;
      case Op::pow_c:
        da = n.param * std::pow(a, n.param - 1.0);
        break;
      case Op::tanh:
        da = 1.0 - v * v;
        break;
      case Op::sigmoid:
        da = v * (1.0 - v);
        break;
      case Op::swish: {
        double s = detail::sigmoid(a);
        da = s + a * s * (1.0 - s);
        break;
      }
      case Op::smooth_abs:
        da = a / v;
        break;
      case Op::square:
        da = 2.0 * a;
        break;
    }
    adjoints_[static_cast<std::size_t>(n.a)] += g * da;
    if (n.b >= 0) adjoints_[static_cast<std::size_t>(n.b)] += g * db;
  }
  return visited;
}

double Tape::adjoint(const Var& v) const {
  if (v.is_constant() || v.tape() != this) return 0.0;
  const auto i = static_cast<std::size_t>(v.index());
  return i < adjoints_.size() ? adjoints_[i] : 0.0;
}

std::vector<double> Tape::replay(std::span<const double> leaf_values) const {
  std::vector<double> out(nodes_.size());
  std::size_t next_leaf = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.op == Op::leaf) {
      out[i] = next_leaf < leaf_values.size() ? leaf_values[next_leaf] : values_[i];
      ++next_leaf;
      continue;
    }
    const double a = n.a >= 0 ? out[static_cast<std::size_t>(n.a)] : 0.0;
    const double b = n.b >= 0 ? out[static_cast<std::size_t>(n.b)] : 0.0;
    out[i] = apply(n.op, a, b, n.param);
  }
  return out;
}

ValueGrad loss_grad(const std::function<Var(std::span<const Var>)>& loss, std::span<const double> theta) {
  Tape tape;
  std::vector<Var> params;
  params.reserve(theta.size());
  for (double t : theta) params.push_back(tape.leaf(t));
  Var out = loss(params);
  ValueGrad result;
  result.value = out.value();
  if (!std::isfinite(result.value)) throw NumericalError("loss_grad: non-finite loss value");
  tape.backward(out);
  result.grad.resize(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    result.grad[i] = tape.adjoint(params[i]);
    if (!std::isfinite(result.grad[i])) {
      std::ostringstream msg;
      msg << "loss_grad: non-finite gradient component " << i;
      throw NumericalError(msg.str());
    }
  }
  return result;
}

}  // namespace dwrnet::ad
