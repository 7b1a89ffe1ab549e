#include "dwrnet/problems/metrics.hpp"

#include <cmath>

namespace dwrnet::pde {

double relative_l2(const Field& approx, const Field& exact, std::span<const Vec2> points,
                   const std::vector<int>& components) {
  if (approx.n_components() != exact.n_components()) throw StructuralError("relative_l2: component count mismatch");
  const auto n = static_cast<std::size_t>(approx.n_components());
  const auto a = approx.values(points);
  const auto e = exact.values(points);
  std::vector<double> av, ev;
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::size_t k = 0; k < n; ++k) {
      if (!components.empty()) {
        bool keep = false;
        for (int c : components) keep = keep || static_cast<std::size_t>(c) == k;
        if (!keep) continue;
      }
      av.push_back(a[p * n + k]);
      ev.push_back(e[p * n + k]);
    }
  }
  return relative_l2(av, ev);
}

double relative_l2(std::span<const double> approx, std::span<const double> exact) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < approx.size(); ++i) {
    const double d = approx[i] - exact[i];
    num += d * d;
    den += exact[i] * exact[i];
  }
  if (den == 0.0) throw NumericalError("relative_l2: exact field vanishes on every test point");
  return std::sqrt(num) / std::sqrt(den);
}

double residual_error_metric(const PdeSystem& system, const Field& field, std::span<const Vec2> points) {
  if (points.empty()) throw GeometryError("residual_error_metric: no test points");
  auto sites = interior_sites(points);
  system.annotate(sites);
  const auto jets = field.jets(points);
  const auto nf = static_cast<std::size_t>(field.n_components());
  double sum = 0.0;
  for (std::size_t p = 0; p < sites.size(); ++p) sum += system.point_loss(sites[p], std::span<const SpatialJet2>(jets.data() + p * nf, nf));
  return sum / static_cast<double>(points.size());
}

}  // namespace dwrnet::pde
