#pragma once

#include <vector>

namespace dwrnet::geo {

struct GaussRule1D {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule, exact for polynomials of degree 2n-1.
GaussRule1D gauss_legendre(int n);

/// Same rule mapped to [a, b].
GaussRule1D gauss_legendre(int n, double a, double b);

}  // namespace dwrnet::geo
