#include <algorithm>
#include <chrono>
#include <cmath>

#include "dwrnet/dwr/dwr.hpp"
#include "dwrnet/problems/metrics.hpp"

namespace dwrnet::dwr {

namespace {

NetConfig widened(NetConfig cfg, int widen) {
  for (int& h : cfg.hidden) h += widen;
  return cfg;
}

template <class F>
void collect(std::vector<std::string>& bad, F&& check) {
  try {
    check();
  } catch (const ConfigError& e) {
    if (e.violations().empty())
      bad.emplace_back(e.what());
    else
      bad.insert(bad.end(), e.violations().begin(), e.violations().end());
  } catch (const Error& e) {
    bad.emplace_back(e.what());
  }
}

}  // namespace

void Experiment::validate() const {
  std::vector<std::string> bad;
  const auto names = pde::problem_names();
  std::optional<pde::Problem> prob;
  if (std::find(names.begin(), names.end(), problem) == names.end()) {
    bad.emplace_back("unknown problem '" + problem + "'");
  } else {
    collect(bad, [&] { prob = pde::make_problem(problem, params); });
  }
  if (schedule.empty()) bad.emplace_back("schedule must not be empty");
  for (const auto& l : schedule) {
    if (l.nx < 2 || l.ny < 2) {
      bad.emplace_back("schedule grids need nx, ny >= 2");
      break;
    }
    if (l.widen < 0) {
      bad.emplace_back("schedule widen must be nonnegative");
      break;
    }
  }
  if (!(boundary_density > 0.0)) bad.emplace_back("boundary_density must be positive");
  if (quad_order < 1 || quad_cells < 1) bad.emplace_back("quadrature order and cells must be positive");
  if (!(ieff_band[0] < ieff_band[1])) bad.emplace_back("ieff_band needs lower < upper");
  if (test_grid < 2) bad.emplace_back("test_grid must be at least 2");
  collect(bad, [&] { primal_net.validate(); });
  collect(bad, [&] { adjoint_net.validate(); });
  collect(bad, [&] { primal_opt.validate(); });
  collect(bad, [&] { adjoint_opt.validate(); });
  collect(bad, [&] { goal.validate(); });
  if (goal.sign_source == goals::SignSource::reference_values && goal.reference.empty() && prob && !prob->exact)
    bad.emplace_back("sign_source reference_values needs reference values or a problem with an exact solution");
  if (prob) {
    for (const auto& J : goal.parts) collect(bad, [&] { J.validate(prob->domain, prob->n_fields()); });
  }
  if (!bad.empty()) {
    std::string msg = "invalid experiment '" + name + "':";
    for (const auto& b : bad) msg += " " + b + ";";
    throw ConfigError(msg, bad);
  }
}

EstimateReport run_level(const Experiment& exp, const pde::Problem& problem, int level, LevelArtifacts* artifacts) {
  const auto t0 = std::chrono::steady_clock::now();
  const Level& L = exp.schedule.at(static_cast<std::size_t>(level));
  EstimateReport rep;
  rep.problem = problem.name;
  rep.level = level;
  rep.nx = L.nx;
  rep.ny = L.ny;
  rep.seed_primal = exp.seed + 1000ULL * static_cast<std::uint64_t>(level);
  rep.seed_adjoint = rep.seed_primal + 1;
  for (const auto& J : exp.goal.parts) rep.names.push_back(J.name);
  const NetConfig pnet = widened(exp.primal_net, L.widen);
  const NetConfig anet = widened(exp.adjoint_net, L.widen);
  rep.primal_shape = pnet.layer_sizes(problem.n_fields());
  rep.adjoint_shape = anet.layer_sizes(problem.n_fields());
  try {
    const auto colloc = geo::sample_collocation(problem.domain, L.nx, L.ny, exp.boundary_density);
    rep.n_int = colloc.n_int();
    rep.n_bnd = colloc.n_bnd();

    auto primal = solve_primal(problem, colloc, pnet, exp.primal_opt, rep.seed_primal, exp.kernel);
    rep.loss_primal = primal.train.loss;
    rep.primal_line_search_failed = primal.train.trace.line_search_failed;
    const auto ufield = primal.field();
    if (artifacts) {
      artifacts->primal_trace = primal.train.trace;
      artifacts->primal = primal;
    }
    if (problem.exact) {
      const auto grid = geo::grid_points(problem.domain, exp.test_grid, exp.test_grid);
      rep.rel_l2 = pde::relative_l2(*ufield, *problem.exact, grid, problem.error_components);
    }

    goals::GoalEvaluator ev(problem.domain, exp.quad_order, exp.quad_cells, colloc.spacing);
    for (const auto& J : exp.goal.parts) rep.j_theta.push_back(ev.evaluate(J, *ufield));
    goals::CombinedFunctional jc = exp.goal;
    if (!jc.reference.empty()) {
      rep.j_reference = jc.reference;
    } else if (problem.exact) {
      std::vector<double> ref;
      for (const auto& J : jc.parts) ref.push_back(ev.evaluate(J, *problem.exact));
      rep.j_reference = ref;
      jc.reference = ref;
    }

    std::vector<double> signs;
    if (jc.sign_source == goals::SignSource::estimated) {
      for (std::size_t n = 0; n < jc.parts.size(); ++n) {
        auto adj = assemble_adjoint_problem(problem, ufield, ev, {jc.parts[n]}, {1.0});
        auto z = solve_adjoint(adj, problem, colloc, anet, exp.adjoint_opt, rep.seed_adjoint + 100 + n, exp.kernel);
        signs.push_back(estimate_eta(*problem.system, *ufield, *z.field(), eta_sites(problem, colloc, ev, exp.eta)));
      }
    }
    rep.omega = goals::combine_weights(jc, rep.j_theta, signs);
    rep.jc_theta = goals::combined_value(rep.omega, rep.j_theta);

    auto adjoint_sys = assemble_adjoint_problem(problem, ufield, ev, jc.parts, rep.omega);
    auto adjoint = solve_adjoint(adjoint_sys, problem, colloc, anet, exp.adjoint_opt, rep.seed_adjoint, exp.kernel);
    rep.loss_adjoint = adjoint.train.loss;
    rep.adjoint_line_search_failed = adjoint.train.trace.line_search_failed;
    const auto zfield = adjoint.field();
    rep.r_err = pde::residual_error_metric(*adjoint_sys, *zfield, colloc.interior);
    if (artifacts) {
      artifacts->adjoint_trace = adjoint.train.trace;
      artifacts->adjoint = adjoint;
    }

    rep.eta = estimate_eta(*problem.system, *ufield, *zfield, eta_sites(problem, colloc, ev, exp.eta));
    if (rep.j_reference) {
      rep.jc_reference = goals::combined_value(rep.omega, *rep.j_reference);
      double e = 0.0;
      for (std::size_t n = 0; n < rep.omega.size(); ++n) {
        const double term = rep.omega[n] * ((*rep.j_reference)[n] - rep.j_theta[n]);
        rep.cancellation_terms.push_back(term);
        e += term;
      }
      rep.true_error = e;
      if (std::abs(e) > 1e-14) {
        rep.i_eff = effectivity(rep.eta, e);
        rep.in_band = *rep.i_eff >= exp.ieff_band[0] && *rep.i_eff <= exp.ieff_band[1];
      }
    }
  } catch (const Error& e) {
    rep.error = e.what();
    rep.error_code = e.exit_code();
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

AlgorithmResult run_algorithm1(const Experiment& exp, std::optional<int> only_level) {
  exp.validate();
  const pde::Problem problem = pde::make_problem(exp.problem, exp.params);
  AlgorithmResult out;
  const int n_levels = static_cast<int>(exp.schedule.size());
  if (only_level && (*only_level < 0 || *only_level >= n_levels))
    throw ConfigError("level " + std::to_string(*only_level) + " is outside the schedule");
  for (int level = 0; level < n_levels; ++level) {
    if (only_level && level != *only_level) continue;
    LevelArtifacts art;
    out.reports.push_back(run_level(exp, problem, level, &art));
    out.artifacts.push_back(std::move(art));
    if (exp.stop_in_band && out.reports.back().in_band) break;
  }
  return out;
}

}  // namespace dwrnet::dwr
