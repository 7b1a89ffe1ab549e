#pragma once

#include <span>
#include <vector>

#include "dwrnet/problems/system.hpp"

namespace dwrnet::pde {

/// sqrt(sum (u - U)^2) / sqrt(sum U^2) over the listed components (all if empty).
double relative_l2(const Field& approx, const Field& exact, std::span<const Vec2> points,
                   const std::vector<int>& components = {});

/// Same ratio from precomputed values (recomputation oracle for exported point clouds).
double relative_l2(std::span<const double> approx, std::span<const double> exact);

/// Mean over the points of the squared interior residual of a (typically
/// adjoint) system: ||A'(u) z - J'(u)||^2 sampled.
double residual_error_metric(const PdeSystem& system, const Field& field, std::span<const Vec2> points);

}  // namespace dwrnet::pde
