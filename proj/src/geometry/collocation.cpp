#include "dwrnet/geometry/collocation.hpp"

#include <algorithm>
#include <cmath>

namespace dwrnet::geo {

std::vector<Vec2> grid_points(const Domain& domain, int nx, int ny) {
  if (nx < 2 || ny < 2) throw GeometryError("collocation grid needs N_x, N_y >= 2");
  const auto bb = domain.bbox();
  std::vector<Vec2> pts;
  for (int j = 0; j < ny; ++j) {
    const double y = bb[2] + j * (bb[3] - bb[2]) / (ny - 1);
    for (int i = 0; i < nx; ++i) {
      const double x = bb[0] + i * (bb[1] - bb[0]) / (nx - 1);
      if (domain.inside({x, y})) pts.push_back({x, y});
    }
  }
  return pts;
}

CollocationSet sample_collocation(const Domain& domain, int nx, int ny, double boundary_density) {
  CollocationSet set;
  set.nx = nx;
  set.ny = ny;
  set.interior = grid_points(domain, nx, ny);
  if (set.interior.empty()) throw GeometryError("collocation: no grid point falls inside domain " + domain.name());
  const auto bb = domain.bbox();
  set.spacing = 0.5 * ((bb[1] - bb[0]) / (nx - 1) + (bb[3] - bb[2]) / (ny - 1));
  const auto& segs = domain.segments();
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const auto& seg = segs[s];
    const int n = std::max(2, static_cast<int>(std::ceil(boundary_density * seg.length / set.spacing - 1e-9))) + 1;
    const double ds = seg.length / (n - 1);
    for (int k = 0; k < n; ++k) {
      const double t = seg.param_at_length(k * ds);
      BoundaryPoint bp;
      bp.x = seg.point(t);
      bp.normal = seg.normal(t);
      bp.tag = seg.tag;
      bp.segment = static_cast<int>(s);
      bp.weight = (k == 0 || k == n - 1) ? 0.5 * ds : ds;
      auto dup = std::find_if(set.boundary.begin(), set.boundary.end(),
                              [&](const BoundaryPoint& q) { return norm(q.x - bp.x) < 1e-12; });
      if (dup == set.boundary.end()) {
        set.boundary.push_back(bp);
        continue;
      }
      dup->weight += bp.weight;
      if (bp.tag == BcTag::dirichlet && dup->tag != BcTag::dirichlet) {
        dup->tag = BcTag::dirichlet;
        dup->normal = bp.normal;
        dup->segment = bp.segment;
      }
    }
  }
  return set;
}

}  // namespace dwrnet::geo
