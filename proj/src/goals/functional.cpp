#include "dwrnet/goals/functional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dwrnet::goals {

namespace {

const std::pair<double, double> kNoCut{0.0, 0.0};

double smooth_abs(double t) { return std::sqrt(t * t + kAbsEps * kAbsEps); }
double smooth_sign(double t) { return t / smooth_abs(t); }

bool in_groups(const std::vector<std::string>& groups, const std::string& g) {
  return groups.empty() || std::find(groups.begin(), groups.end(), g) != groups.end();
}

// n . sigma e with sigma = -p I + nu (grad u + grad u^T) / 2.
double traction(const SpatialJet2* w, const Vec2& n, const Vec2& e, double nu) {
  double t = 0.0;
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) {
      const double sym = 0.5 * nu * (w[k].grad[j] + w[j].grad[k]);
      const double sigma = (j == k ? -w[2].value : 0.0) + sym;
      t += n[j] * sigma * e[k];
    }
  }
  return t;
}

// Smoothed indicator of a x > b y, 0.5 (1 + tanh(d / h)) with d the signed distance.
struct SoftHalfPlane {
  double a = 0.0, b = 0.0, h = 1.0;
  double norm() const { return std::hypot(a, b); }
  double t(const Vec2& x) const { return (a * x[0] - b * x[1]) / (norm() * h); }
  double value(const Vec2& x) const { return 0.5 * (1.0 + std::tanh(t(x))); }
  double laplacian(const Vec2& x) const {
    const double th = std::tanh(t(x));
    return -th * (1.0 - th * th) / (h * h);
  }
};

}  // namespace

GoalKind parse_goal_kind(const std::string& name) {
  static const std::map<std::string, GoalKind> kinds{{"domain_integral", GoalKind::domain_integral},
                                                     {"laplacian_integral", GoalKind::laplacian_integral},
                                                     {"boundary_flux", GoalKind::boundary_flux},
                                                     {"point_value", GoalKind::point_value},
                                                     {"abs_domain_integral", GoalKind::abs_domain_integral},
                                                     {"drag_lift", GoalKind::drag_lift},
                                                     {"product", GoalKind::product}};
  const auto it = kinds.find(name);
  if (it == kinds.end()) throw ConfigError("unknown functional variant '" + name + "'");
  return it->second;
}

std::string to_string(GoalKind kind) {
  switch (kind) {
    case GoalKind::domain_integral: return "domain_integral";
    case GoalKind::laplacian_integral: return "laplacian_integral";
    case GoalKind::boundary_flux: return "boundary_flux";
    case GoalKind::point_value: return "point_value";
    case GoalKind::abs_domain_integral: return "abs_domain_integral";
    case GoalKind::drag_lift: return "drag_lift";
    case GoalKind::product: return "product";
  }
  return "domain_integral";
}

Weight parse_weight(const std::string& name) {
  if (name == "one") return Weight::one;
  if (name == "upper_ramp") return Weight::upper_ramp;
  throw ConfigError("unknown functional weight '" + name + "'");
}

std::string to_string(Weight w) { return w == Weight::one ? "one" : "upper_ramp"; }

double weight_value(Weight w, const Vec2& x) {
  if (w == Weight::one) return 1.0;
  return x[0] < x[1] ? x[1] - x[0] : 0.0;
}

int GoalFunctional::depth() const {
  if (kind != GoalKind::product) return 0;
  return 1 + std::max(left ? left->depth() : 0, right ? right->depth() : 0);
}

void GoalFunctional::validate(const geo::Domain& domain, int n_fields) const {
  auto fail = [&](const std::string& what) { throw FunctionalError("functional '" + name + "': " + what); };
  if (kind == GoalKind::product) {
    if (!left || !right) fail("product needs two factors");
    if (depth() > 2) fail("product nesting deeper than 2");
    left->validate(domain, n_fields);
    right->validate(domain, n_fields);
    return;
  }
  if (component < 0 || component >= n_fields) fail("component out of range");
  if (cut && cut->a == 0.0 && cut->b == 0.0) fail("subdomain cut needs (a, b) != (0, 0)");
  for (const auto& g : groups) {
    if (!domain.has_group(g)) fail("unknown boundary group '" + g + "'");
  }
  if (kind == GoalKind::point_value) {
    if (points.empty()) fail("point_value needs at least one point");
    if (!coeffs.empty() && coeffs.size() != points.size()) fail("point_value coefficient count mismatch");
    for (const auto& p : points) {
      if (!domain.inside(p)) {
        std::ostringstream msg;
        msg << "point (" << p[0] << ", " << p[1] << ") lies outside the domain";
        fail(msg.str());
      }
    }
  }
  if (kind == GoalKind::drag_lift && n_fields < 3) fail("drag_lift needs velocity and pressure fields");
}

GoalFunctional domain_integral(std::string name, int component, Weight weight, double scale) {
  GoalFunctional J;
  J.kind = GoalKind::domain_integral;
  J.name = std::move(name);
  J.component = component;
  J.weight = weight;
  J.scale = scale;
  return J;
}

GoalFunctional subdomain_integral(std::string name, double a, double b, int component) {
  GoalFunctional J = domain_integral(std::move(name), component);
  J.cut = geo::HalfPlane{a, b};
  return J;
}

GoalFunctional laplacian_integral(std::string name, double a, double b, int component) {
  GoalFunctional J;
  J.kind = GoalKind::laplacian_integral;
  J.name = std::move(name);
  J.component = component;
  J.cut = geo::HalfPlane{a, b};
  return J;
}

GoalFunctional boundary_flux(std::string name, std::vector<std::string> groups, int component) {
  GoalFunctional J;
  J.kind = GoalKind::boundary_flux;
  J.name = std::move(name);
  J.groups = std::move(groups);
  J.component = component;
  return J;
}

GoalFunctional point_value(std::string name, std::vector<Vec2> points, std::vector<double> coeffs, int component) {
  GoalFunctional J;
  J.kind = GoalKind::point_value;
  J.name = std::move(name);
  J.points = std::move(points);
  J.coeffs = std::move(coeffs);
  J.component = component;
  return J;
}

GoalFunctional abs_domain_integral(std::string name, int component, double scale, double offset) {
  GoalFunctional J;
  J.kind = GoalKind::abs_domain_integral;
  J.name = std::move(name);
  J.component = component;
  J.scale = scale;
  J.offset = offset;
  return J;
}

GoalFunctional drag_lift(std::string name, Vec2 direction, double c_re, double nu, std::vector<std::string> groups) {
  GoalFunctional J;
  J.kind = GoalKind::drag_lift;
  J.name = std::move(name);
  J.direction = direction;
  J.c_re = c_re;
  J.nu = nu;
  J.groups = std::move(groups);
  return J;
}

GoalFunctional product(std::string name, GoalFunctional left, GoalFunctional right) {
  GoalFunctional J;
  J.kind = GoalKind::product;
  J.name = std::move(name);
  J.left = std::make_shared<const GoalFunctional>(std::move(left));
  J.right = std::make_shared<const GoalFunctional>(std::move(right));
  return J;
}

GoalEvaluator::GoalEvaluator(geo::Domain domain, int order, int cells, double spacing)
    : domain_(std::move(domain)), order_(order), cells_(cells), spacing_(spacing) {
  if (order_ < 1 || cells_ < 1) throw ConfigError("quadrature order and cells must be positive");
  if (!(spacing_ > 0.0)) throw ConfigError("collocation spacing must be positive");
}

const geo::QuadratureRule& GoalEvaluator::volume_rule(const std::optional<geo::HalfPlane>& cut) {
  const auto key = cut ? std::make_pair(cut->a, cut->b) : kNoCut;
  auto it = volume_.find(key);
  if (it == volume_.end()) {
    geo::QuadratureRule rule = cut ? geo::gauss_quadrature(geo::subdomain_restrict(domain_, cut->a, cut->b), order_, cells_)
                                   : geo::gauss_quadrature(domain_, order_, cells_);
    it = volume_.emplace(key, std::move(rule)).first;
  }
  return it->second;
}

const geo::QuadratureRule& GoalEvaluator::boundary_rule(const std::vector<std::string>& groups) {
  auto it = boundary_.find(groups);
  if (it == boundary_.end()) it = boundary_.emplace(groups, geo::boundary_quadrature(domain_, groups, order_, cells_)).first;
  return it->second;
}

std::function<double(const Vec2&)> GoalEvaluator::mollifier(const Vec2& x0) {
  const double h = mollifier_width();
  auto g = [x0, h](const Vec2& x) {
    const Vec2 d = x - x0;
    return std::exp(-dot(d, d) / (2.0 * h * h));
  };
  const auto& rule = volume_rule();
  double mass = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) mass += rule.weights[q] * g(rule.nodes[q]);
  if (!(mass > 0.0)) throw FunctionalError("mollifier has no mass on the quadrature rule");
  return [g, mass](const Vec2& x) { return g(x) / mass; };
}

double GoalEvaluator::evaluate_linear(const GoalFunctional& J, const Field& u) {
  const auto nc = static_cast<std::size_t>(u.n_components());
  const auto c = static_cast<std::size_t>(J.component);
  double sum = 0.0;
  switch (J.kind) {
    case GoalKind::domain_integral:
    case GoalKind::laplacian_integral: {
      const auto& rule = volume_rule(J.cut);
      const auto jets = u.jets(rule.nodes);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const SpatialJet2& j = jets[q * nc + c];
        const double f = J.kind == GoalKind::domain_integral ? weight_value(J.weight, rule.nodes[q]) * j.value
                                                             : j.laplacian();
        sum += rule.weights[q] * f;
      }
      break;
    }
    case GoalKind::boundary_flux: {
      const auto& rule = boundary_rule(J.groups);
      const auto jets = u.jets(rule.nodes);
      for (std::size_t q = 0; q < rule.size(); ++q) sum += rule.weights[q] * dot(jets[q * nc + c].grad, rule.normals[q]);
      break;
    }
    case GoalKind::point_value: {
      const auto jets = u.jets(J.points);
      for (std::size_t k = 0; k < J.points.size(); ++k) sum += (J.coeffs.empty() ? 1.0 : J.coeffs[k]) * jets[k * nc + c].value;
      break;
    }
    case GoalKind::drag_lift: {
      if (nc < 3) throw FunctionalError("functional '" + J.name + "': drag_lift needs velocity and pressure fields");
      const auto& rule = boundary_rule(J.groups);
      const auto jets = u.jets(rule.nodes);
      for (std::size_t q = 0; q < rule.size(); ++q)
        sum += rule.weights[q] * J.c_re * traction(&jets[q * nc], rule.normals[q], J.direction, J.nu);
      break;
    }
    default: throw FunctionalError("functional '" + J.name + "' is not linear");
  }
  return J.scale * sum;
}

double GoalEvaluator::evaluate(const GoalFunctional& J, const Field& u) {
  if (J.kind == GoalKind::product) return evaluate(*J.left, u) * evaluate(*J.right, u);
  if (J.kind != GoalKind::abs_domain_integral) return evaluate_linear(J, u);
  const auto& rule = volume_rule(J.cut);
  const auto vals = u.jets(rule.nodes);
  const auto nc = static_cast<std::size_t>(u.n_components());
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q)
    sum += rule.weights[q] * smooth_abs(vals[q * nc + static_cast<std::size_t>(J.component)].value - J.offset);
  return J.scale * sum;
}

double GoalEvaluator::directional(const GoalFunctional& J, const Field& u, const Field& phi) {
  if (J.kind == GoalKind::product)
    return directional(*J.left, u, phi) * evaluate(*J.right, u) + evaluate(*J.left, u) * directional(*J.right, u, phi);
  if (J.kind != GoalKind::abs_domain_integral) return evaluate_linear(J, phi);
  const auto& rule = volume_rule(J.cut);
  const auto uj = u.jets(rule.nodes);
  const auto pj = phi.jets(rule.nodes);
  const auto nc = static_cast<std::size_t>(u.n_components());
  const auto c = static_cast<std::size_t>(J.component);
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q)
    sum += rule.weights[q] * smooth_sign(uj[q * nc + c].value - J.offset) * pj[q * nc + c].value;
  return J.scale * sum;
}

AdjointRhs GoalEvaluator::derivative(const GoalFunctional& J, std::shared_ptr<const Field> u,
                                     const pde::PdeSystem& system) {
  const int n = system.n_fields();
  J.validate(domain_, n);
  AdjointRhs rhs = AdjointRhs::zero(n);
  const auto c = static_cast<std::size_t>(J.component);
  const double scale = J.scale;
  const std::vector<geo::BoundarySegment>& segs = domain_.segments();
  std::vector<char> on_group(segs.size());
  for (std::size_t s = 0; s < segs.size(); ++s) on_group[s] = in_groups(J.groups, segs[s].group) ? 1 : 0;
  auto on = [on_group](int seg) { return seg >= 0 && static_cast<std::size_t>(seg) < on_group.size() && on_group[static_cast<std::size_t>(seg)]; };

  switch (J.kind) {
    case GoalKind::domain_integral: {
      std::optional<SoftHalfPlane> soft;
      if (J.cut) soft = SoftHalfPlane{J.cut->a, J.cut->b, smoothing_width()};
      const Weight w = J.weight;
      rhs.interior = [=](const Vec2& x, std::span<double> j) {
        j[c] += scale * weight_value(w, x) * (soft ? soft->value(x) : 1.0);
      };
      break;
    }
    case GoalKind::laplacian_integral: {
      // The adjoint of the cut Laplacian integral is -chi_h itself.
      const SoftHalfPlane soft{J.cut->a, J.cut->b, smoothing_width()};
      rhs.interior = [=](const Vec2& x, std::span<double> j) { j[c] += scale * soft.laplacian(x); };
      rhs.boundary = [=](const Vec2& x, const Vec2&, int, std::span<double> g) { g[c] -= scale * soft.value(x); };
      break;
    }
    case GoalKind::boundary_flux: {
      const pde::PdeSystem* sys = &system;
      rhs.boundary = [=](const Vec2& x, const Vec2& nrm, int seg, std::span<double> g) {
        if (!on(seg)) return;
        const auto uj = u->jets_at(x);
        g[c] -= scale / sys->flux_coefficient(uj[c], nrm);
      };
      break;
    }
    case GoalKind::point_value: {
      std::vector<std::function<double(const Vec2&)>> moll;
      std::vector<double> coeffs;
      for (std::size_t k = 0; k < J.points.size(); ++k) {
        moll.push_back(mollifier(J.points[k]));
        coeffs.push_back(J.coeffs.empty() ? 1.0 : J.coeffs[k]);
      }
      rhs.interior = [=](const Vec2& x, std::span<double> j) {
        for (std::size_t k = 0; k < moll.size(); ++k) j[c] += scale * coeffs[k] * moll[k](x);
      };
      break;
    }
    case GoalKind::abs_domain_integral: {
      const double off = J.offset;
      rhs.interior = [=](const Vec2& x, std::span<double> j) {
        const auto uj = u->jets_at(x);
        j[c] += scale * smooth_sign(uj[c].value - off);
      };
      break;
    }
    case GoalKind::drag_lift: {
      const Vec2 e = J.direction;
      const double cre = J.c_re;
      rhs.boundary = [=](const Vec2&, const Vec2&, int seg, std::span<double> g) {
        if (!on(seg)) return;
        for (int k = 0; k < 2; ++k) g[static_cast<std::size_t>(k)] -= scale * cre * e[static_cast<std::size_t>(k)];
      };
      break;
    }
    case GoalKind::product: {
      const double jl = evaluate(*J.left, *u);
      const double jr = evaluate(*J.right, *u);
      return AdjointRhs::combine({derivative(*J.left, u, system), derivative(*J.right, u, system)}, {jr, jl});
    }
  }
  return rhs;
}

}  // namespace dwrnet::goals
