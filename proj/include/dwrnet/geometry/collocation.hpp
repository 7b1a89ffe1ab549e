#pragma once

#include <vector>

#include "dwrnet/geometry/domain.hpp"

namespace dwrnet::geo {

struct BoundaryPoint {
  Vec2 x{};
  Vec2 normal{};
  BcTag tag = BcTag::dirichlet;
  int segment = -1;
  double weight = 0.0;  // trapezoid arc-length weight
};

struct CollocationSet {
  std::vector<Vec2> interior;
  std::vector<BoundaryPoint> boundary;
  int nx = 0;
  int ny = 0;
  double spacing = 0.0;  // mean grid spacing, used for boundary density and mollifier width

  std::size_t n_int() const { return interior.size(); }
  std::size_t n_bnd() const { return boundary.size(); }
};

/// Bounding-box grid filtered by the strict inside test, plus boundary
/// points spaced uniformly in arc length on every segment (endpoints
/// included, coincident points merged with Dirichlet taking precedence).
CollocationSet sample_collocation(const Domain& domain, int nx, int ny, double boundary_density = 1.0);

/// Grid points of the bounding box strictly inside the domain (no boundary).
std::vector<Vec2> grid_points(const Domain& domain, int nx, int ny);

}  // namespace dwrnet::geo
