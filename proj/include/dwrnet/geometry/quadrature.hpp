#pragma once

#include <string>
#include <vector>

#include "dwrnet/geometry/domain.hpp"

namespace dwrnet::geo {

struct QuadratureRule {
  std::vector<Vec2> nodes;
  std::vector<double> weights;
  std::vector<Vec2> normals;  // boundary rules only
  std::vector<int> segments;  // boundary rules only

  std::size_t size() const { return nodes.size(); }
  double total_weight() const;
  void append(const QuadratureRule& other);
};

/// Tensor Gauss–Legendre on each patch (split into cells x cells pieces),
/// weighted by |det J|. Cells straddling a half-plane cut are subdivided
/// `refine` times and clipped; clipped pieces use collapsed Gauss rules on
/// a triangle fan.
QuadratureRule gauss_quadrature(const Domain& domain, int order, int cells = 1, int refine = 3);

/// Gauss–Legendre along one segment, weights in arc length.
QuadratureRule boundary_quadrature(const Domain& domain, std::size_t segment, int order, int pieces = 1);

/// Union over all segments whose group is listed (all segments if empty).
QuadratureRule boundary_quadrature(const Domain& domain, const std::vector<std::string>& groups, int order,
                                   int pieces = 1);

}  // namespace dwrnet::geo
