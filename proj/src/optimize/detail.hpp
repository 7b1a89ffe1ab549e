#pragma once

#include <chrono>
#include <cmath>
#include <span>

#include "dwrnet/optimize/optimizer.hpp"

namespace dwrnet::opt::detail {

inline double norm(std::span<const double> g) {
  double s = 0.0;
  for (double x : g) s += x * x;
  return std::sqrt(s);
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Evaluates loss and gradient; false on a numerical error or non-finite output.
inline bool safe_eval(const LossGrad& loss, std::span<const double> theta, ad::ValueGrad& out) {
  try {
    out = loss(theta);
  } catch (const NumericalError&) {
    return false;
  }
  if (!std::isfinite(out.value)) return false;
  for (double g : out.grad) {
    if (!std::isfinite(g)) return false;
  }
  return true;
}

}  // namespace dwrnet::opt::detail
