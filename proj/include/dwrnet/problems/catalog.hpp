#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dwrnet/geometry/domain.hpp"
#include "dwrnet/problems/navier_stokes.hpp"
#include "dwrnet/problems/plaplace.hpp"

namespace dwrnet::pde {

struct ProblemParams {
  double p = 2.0;
  double delta = 0.0;
  double nu = 0.05;
  double re = 100.0;
};

/// A boundary-value problem ready for training: domain with BC tags, the
/// residual system and (when known) the exact solution.
struct Problem {
  std::string name;
  geo::Domain domain;
  std::shared_ptr<const PdeSystem> system;
  std::shared_ptr<const Field> exact;
  std::vector<int> error_components;  // components entering relative_l2
  ProblemParams params;
  int n_fields() const { return system->n_fields(); }
};

/// poisson_case1, plaplace_case2, plaplace_case3, ns_kovasznay_like,
/// subdomain_functionals, poisson_disc.
Problem make_problem(const std::string& name, const ProblemParams& params = {});
std::vector<std::string> problem_names();

// Closed-form solutions shared with tests.
std::shared_ptr<const Field> case1_exact();        // xy(1 - x^2 - y^2)
std::shared_ptr<const Field> paraboloid_exact();   // 1 - x^2 - y^2
std::shared_ptr<const Field> ns_exact();           // (u, v, p)

}  // namespace dwrnet::pde
