#include "dwrnet/problems/field.hpp"

#include <memory>

namespace dwrnet::pde {

std::vector<SpatialJet2> Field::jets(std::span<const Vec2> points) const {
  std::vector<SpatialJet2> out(points.size() * static_cast<std::size_t>(n_components()));
  jets(points, out);
  return out;
}

std::vector<SpatialJet2> Field::jets_at(const Vec2& x) const {
  const Vec2 pts[1] = {x};
  return jets(std::span<const Vec2>(pts, 1));
}

std::vector<double> Field::values(std::span<const Vec2> points) const {
  const auto j = jets(points);
  std::vector<double> v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].value;
  return v;
}

void NetworkField::jets(std::span<const Vec2> points, std::span<SpatialJet2> out) const {
  const auto n = static_cast<std::size_t>(n_components());
#pragma omp parallel for schedule(static)
  for (long p = 0; p < static_cast<long>(points.size()); ++p) {
    const auto pp = static_cast<std::size_t>(p);
    net_.jet_eval(net_.theta(), points[pp], out.subspan(pp * n, n));
  }
}

void AnalyticField::jets(std::span<const Vec2> points, std::span<SpatialJet2> out) const {
  const auto n = static_cast<std::size_t>(n_);
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto X = SpatialJet2::variable(points[p][0], 0);
    const auto Y = SpatialJet2::variable(points[p][1], 1);
    fn_(X, Y, out.subspan(p * n, n));
  }
}

void ScaledField::jets(std::span<const Vec2> points, std::span<SpatialJet2> out) const {
  base_->jets(points, out);
  for (auto& j : out) j = c_ * j;
}

}  // namespace dwrnet::pde
