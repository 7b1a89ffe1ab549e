#include "dwrnet/problems/catalog.hpp"

#include <numbers>

namespace dwrnet::pde {

namespace {

using ad::SpatialJet2;

PLaplace::Source source_from(std::shared_ptr<const Field> exact, PLaplaceParams prm) {
  return [exact, prm](const Vec2& x) { return plaplace_neg_div(exact->jets_at(x)[0], prm); };
}

PLaplace::BoundaryData boundary_from(std::shared_ptr<const Field> exact) {
  return [exact](const Vec2& x, BcTag tag) {
    const auto j = exact->jets_at(x)[0];
    switch (tag) {
      case BcTag::neumann_x: return j.grad[0];
      case BcTag::neumann_y: return j.grad[1];
      case BcTag::dirichlet: break;
    }
    return j.value;
  };
}

Problem plaplace_problem(std::string name, geo::Domain domain, std::shared_ptr<const Field> exact, PLaplaceParams prm,
                         const ProblemParams& params) {
  Problem pb;
  pb.name = std::move(name);
  pb.domain = std::move(domain);
  pb.system = std::make_shared<PLaplace>(prm, source_from(exact, prm), boundary_from(exact));
  pb.exact = std::move(exact);
  pb.error_components = {0};
  pb.params = params;
  return pb;
}

}  // namespace

std::shared_ptr<const Field> case1_exact() {
  return std::make_shared<AnalyticField>(1, [](const SpatialJet2& X, const SpatialJet2& Y, std::span<SpatialJet2> o) {
    o[0] = X * Y * (1.0 - X * X - Y * Y);
  });
}

std::shared_ptr<const Field> paraboloid_exact() {
  return std::make_shared<AnalyticField>(1, [](const SpatialJet2& X, const SpatialJet2& Y, std::span<SpatialJet2> o) {
    o[0] = 1.0 - X * X - Y * Y;
  });
}

std::shared_ptr<const Field> ns_exact() {
  using std::numbers::pi;
  return std::make_shared<AnalyticField>(3, [](const SpatialJet2& X, const SpatialJet2& Y, std::span<SpatialJet2> o) {
    const SpatialJet2 e = exp(-0.5 * X);
    o[0] = 1.0 - e * sin(2.0 * pi * Y);
    o[1] = (1.0 / (4.0 * pi)) * e * cos(2.0 * pi * Y);
    o[2] = 1.0 - exp(-0.5 * (X + Y));
  });
}

std::vector<std::string> problem_names() {
  return {"poisson_case1", "plaplace_case2", "plaplace_case3", "ns_kovasznay_like", "subdomain_functionals",
          "poisson_disc"};
}

Problem make_problem(const std::string& name, const ProblemParams& params) {
  if (name == "poisson_case1") {
    auto d = geo::Domain::quarter_disc_pair();
    return plaplace_problem(name, std::move(d), case1_exact(), {2.0, 0.0}, {2.0, 0.0, params.nu, params.re});
  }
  if (name == "plaplace_case2" || name == "plaplace_case3") {
    auto d = geo::Domain::quarter_disc_pair();
    d.set_bc("arc", BcTag::dirichlet);
    d.set_bc("x_axis", BcTag::neumann_x);
    d.set_bc("y_axis", BcTag::neumann_y);
    PLaplaceParams prm{params.p, params.delta};
    prm.validate();
    return plaplace_problem(name, std::move(d), paraboloid_exact(), prm, params);
  }
  if (name == "poisson_disc") {
    return plaplace_problem(name, geo::Domain::unit_disc(), paraboloid_exact(), {2.0, 0.0}, {2.0, 0.0, params.nu, params.re});
  }
  if (name == "subdomain_functionals") {
    Problem pb;
    pb.name = name;
    pb.domain = geo::Domain::ns_frame();
    pb.system = std::make_shared<PLaplace>(PLaplaceParams{2.0, 0.0}, [](const Vec2&) { return 1.0; },
                                           [](const Vec2&, BcTag) { return 0.0; });
    pb.params = {2.0, 0.0, params.nu, params.re};
    return pb;
  }
  if (name == "ns_kovasznay_like") {
    NSParams prm{params.nu, params.re};
    prm.validate();
    auto exact = ns_exact();
    auto f = [exact, prm](const Vec2& x, std::span<double> out) {
      const auto j = exact->jets_at(x);
      const double zero[2] = {0.0, 0.0};
      double r[3];
      ns_residual<double>(j, prm, zero, r);
      out[0] = r[0];
      out[1] = r[1];
    };
    auto psi = [exact](const Vec2& x, std::span<double> out) {
      const auto j = exact->jets_at(x);
      out[0] = j[0].value;
      out[1] = j[1].value;
    };
    Problem pb;
    pb.name = name;
    pb.domain = geo::Domain::ns_frame();
    pb.system = std::make_shared<NavierStokes>(prm, f, psi);
    pb.exact = exact;
    pb.error_components = {0, 1};
    pb.params = params;
    return pb;
  }
  throw ConfigError("unknown problem '" + name + "'");
}

}  // namespace dwrnet::pde
