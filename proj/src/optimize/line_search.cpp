#include <cmath>
#include <limits>

#include "detail.hpp"
#include "dwrnet/optimize/optimizer.hpp"

namespace dwrnet::opt {

namespace {

struct Probe {
  double a = 0.0;
  double f = 0.0;
  double d = 0.0;  // directional derivative
  std::vector<double> g;
};

// Minimizer of the cubic through two probes, or NaN.
double cubic_min(const Probe& p, const Probe& q) {
  const double d1 = p.d + q.d - 3.0 * (p.f - q.f) / (p.a - q.a);
  const double disc = d1 * d1 - p.d * q.d;
  if (!(disc >= 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double d2 = std::copysign(std::sqrt(disc), q.a - p.a);
  return q.a - (q.a - p.a) * (q.d + d2 - d1) / (q.d - p.d + 2.0 * d2);
}

}  // namespace

LineSearchResult strong_wolfe_search(const LossGrad& loss, std::span<const double> x, double f0,
                                     std::span<const double> g0, std::span<const double> d, double alpha0,
                                     const StrongWolfe& params) {
  const std::size_t n = x.size();
  double dphi0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) dphi0 += g0[i] * d[i];
  LineSearchResult res;
  if (!(dphi0 < 0.0)) return res;

  std::vector<double> xt(n);
  auto probe = [&](double a) {
    Probe p;
    p.a = a;
    for (std::size_t i = 0; i < n; ++i) xt[i] = x[i] + a * d[i];
    ad::ValueGrad vg;
    ++res.evals;
    if (!detail::safe_eval(loss, xt, vg)) {
      p.f = std::numeric_limits<double>::infinity();
      p.d = std::numeric_limits<double>::quiet_NaN();
      return p;
    }
    p.f = vg.value;
    p.g = std::move(vg.grad);
    for (std::size_t i = 0; i < n; ++i) p.d += p.g[i] * d[i];
    return p;
  };
  auto armijo_fails = [&](const Probe& p) { return !(p.f <= f0 + params.c1 * p.a * dphi0); };
  auto curvature_ok = [&](const Probe& p) { return std::abs(p.d) <= -params.c2 * dphi0; };
  auto accept = [&](Probe& p) {
    res.alpha = p.a;
    res.f = p.f;
    res.g = std::move(p.g);
    res.ok = true;
    return res;
  };

  auto zoom = [&](Probe lo, Probe hi) {
    while (res.evals < params.max_evals) {
      const double width = hi.a - lo.a;
      double a = std::isfinite(hi.f) && std::isfinite(hi.d) ? cubic_min(lo, hi) : std::nan("");
      const double lo_b = std::min(lo.a, hi.a) + 0.1 * std::abs(width);
      const double hi_b = std::max(lo.a, hi.a) - 0.1 * std::abs(width);
      if (!std::isfinite(a) || a < lo_b || a > hi_b) a = 0.5 * (lo.a + hi.a);
      if (std::abs(width) < 1e-16 * std::max(1.0, std::abs(lo.a))) break;
      Probe p = probe(a);
      if (armijo_fails(p) || p.f >= lo.f) {
        hi = std::move(p);
      } else {
        if (curvature_ok(p)) return accept(p);
        if (p.d * (hi.a - lo.a) >= 0.0) hi = lo;
        lo = std::move(p);
      }
    }
    return res;
  };

  Probe prev;
  prev.a = 0.0;
  prev.f = f0;
  prev.d = dphi0;
  double a = alpha0;
  for (int i = 0; res.evals < params.max_evals; ++i) {
    Probe p = probe(a);
    if (armijo_fails(p) || (i > 0 && p.f >= prev.f)) return zoom(prev, p);
    if (curvature_ok(p)) return accept(p);
    if (p.d >= 0.0) return zoom(p, prev);
    prev = std::move(p);
    a *= 2.0;
  }
  return res;
}

}  // namespace dwrnet::opt
