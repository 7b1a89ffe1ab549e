#include <cmath>

#include "dwrnet/dwr/dwr.hpp"

namespace dwrnet::dwr {

EtaMode parse_eta_mode(const std::string& name) {
  if (name == "measure") return EtaMode::measure;
  if (name == "point_mean") return EtaMode::point_mean;
  throw ConfigError("unknown eta mode '" + name + "'");
}

std::string to_string(EtaMode mode) { return mode == EtaMode::measure ? "measure" : "point_mean"; }

std::vector<pde::Site> eta_sites(const pde::Problem& problem, const geo::CollocationSet& colloc,
                                 goals::GoalEvaluator& evaluator, const EtaOptions& opts) {
  std::vector<pde::Site> sites;
  if (opts.mode == EtaMode::point_mean) {
    const std::size_t n = colloc.n_int() + (opts.include_boundary ? colloc.n_bnd() : 0);
    const double w = 1.0 / static_cast<double>(n);
    sites = pde::interior_sites(colloc.interior, w);
    if (opts.include_boundary) {
      auto b = pde::boundary_sites(colloc);
      for (auto& s : b) s.weight = w;
      sites.insert(sites.end(), b.begin(), b.end());
    }
  } else {
    const auto& vol = evaluator.volume_rule();
    sites = pde::interior_sites(vol.nodes);
    for (std::size_t q = 0; q < vol.size(); ++q) sites[q].weight = vol.weights[q];
    if (opts.include_boundary) {
      const auto& bnd = evaluator.boundary_rule({});
      const auto& segs = problem.domain.segments();
      for (std::size_t q = 0; q < bnd.size(); ++q) {
        pde::Site s;
        s.x = bnd.nodes[q];
        s.normal = bnd.normals[q];
        s.segment = bnd.segments[q];
        s.tag = segs[static_cast<std::size_t>(s.segment)].tag;
        s.boundary = true;
        s.weight = bnd.weights[q];
        sites.push_back(std::move(s));
      }
    }
  }
  problem.system->annotate(sites);
  return sites;
}

double estimate_eta(const pde::PdeSystem& system, const pde::Field& u, const pde::Field& z,
                    std::vector<pde::Site> sites) {
  if (u.n_components() != system.n_fields() || z.n_components() != system.n_fields())
    throw StructuralError("estimate_eta: field components do not match the system");
  std::vector<Vec2> pts(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) pts[i] = sites[i].x;
  const auto uj = u.jets(pts);
  const auto zj = z.jets(pts);
  const auto nf = static_cast<std::size_t>(system.n_fields());
  std::vector<double> w(3);
  double eta = 0.0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const pde::Site& s = sites[i];
    const std::span<const SpatialJet2> us(uj.data() + i * nf, nf), zs(zj.data() + i * nf, nf);
    const auto r = system.residual(s, us);
    system.dual_weights(s, us, zs, w);
    double acc = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) acc += r[k] * w[k];
    if (!std::isfinite(acc)) throw NumericalError("non-finite estimator term", static_cast<long>(i));
    eta -= s.weight * acc;
  }
  return eta;
}

double effectivity(double eta, double e) {
  if (!(std::abs(e) > 1e-14)) throw FunctionalError("effectivity index undefined: true error vanishes");
  return eta / e;
}

}  // namespace dwrnet::dwr
