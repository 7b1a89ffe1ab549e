#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dwrnet/runner/runner.hpp"

namespace dwrnet::run {

using nlohmann::json;

namespace {

class Reader {
 public:
  std::vector<std::string> bad;

  template <class T>
  void get(const json& obj, const char* key, T& out, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) return;
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      bad.push_back(path + key + " has the wrong type");
    }
  }

  bool require(const json& obj, const char* key, const std::string& path) {
    if (obj.is_object() && obj.contains(key)) return true;
    bad.push_back(path + key + " is required");
    return false;
  }

  void keys(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
    if (!obj.is_object()) {
      bad.push_back((path.empty() ? std::string("config") : path.substr(0, path.size() - 1)) + " must be an object");
      return;
    }
    for (const auto& [k, v] : obj.items()) {
      if (!allowed.count(k)) bad.push_back("unknown key " + path + k);
    }
  }

  template <class F>
  void guard(F&& f) {
    try {
      f();
    } catch (const ConfigError& e) {
      if (e.violations().empty())
        bad.emplace_back(e.what());
      else
        bad.insert(bad.end(), e.violations().begin(), e.violations().end());
    } catch (const Error& e) {
      bad.emplace_back(e.what());
    }
  }
};

dwr::NetConfig parse_net(Reader& rd, const json& j, const std::string& path) {
  dwr::NetConfig n;
  rd.keys(j, {"hidden", "activations", "bias_init"}, path);
  rd.get(j, "hidden", n.hidden, path);
  rd.get(j, "activations", n.activations, path);
  std::string bias = nn::to_string(n.bias);
  rd.get(j, "bias_init", bias, path);
  rd.guard([&] { n.bias = nn::parse_bias_init(bias); });
  return n;
}

json net_json(const dwr::NetConfig& n) {
  return {{"hidden", n.hidden}, {"activations", n.activations}, {"bias_init", nn::to_string(n.bias)}};
}

opt::OptimizerConfig parse_opt(Reader& rd, const json& j, const std::string& path) {
  opt::OptimizerConfig c;
  rd.keys(j, {"adam_lr", "adam_steps", "adam_betas", "adam_eps", "minibatch", "qn_kind", "lbfgs_memory", "qn_max_iters",
              "tol", "grad_tol", "line_search"},
          path);
  rd.get(j, "adam_lr", c.adam_lr, path);
  rd.get(j, "adam_steps", c.adam_steps, path);
  std::vector<double> betas{c.adam_beta1, c.adam_beta2};
  rd.get(j, "adam_betas", betas, path);
  if (betas.size() == 2) {
    c.adam_beta1 = betas[0];
    c.adam_beta2 = betas[1];
  } else {
    rd.bad.push_back(path + "adam_betas needs two entries");
  }
  rd.get(j, "adam_eps", c.adam_eps, path);
  rd.get(j, "minibatch", c.minibatch, path);
  std::string qn = opt::to_string(c.qn);
  rd.get(j, "qn_kind", qn, path);
  rd.guard([&] { c.qn = opt::parse_qn_kind(qn); });
  rd.get(j, "lbfgs_memory", c.lbfgs_memory, path);
  rd.get(j, "qn_max_iters", c.qn_max_iters, path);
  rd.get(j, "tol", c.tol, path);
  rd.get(j, "grad_tol", c.grad_tol, path);
  if (j.is_object() && j.contains("line_search")) {
    const auto& ls = j.at("line_search");
    const std::string lp = path + "line_search.";
    rd.keys(ls, {"c1", "c2", "max_evals"}, lp);
    rd.get(ls, "c1", c.line_search.c1, lp);
    rd.get(ls, "c2", c.line_search.c2, lp);
    rd.get(ls, "max_evals", c.line_search.max_evals, lp);
  }
  rd.guard([&] { c.validate(); });
  return c;
}

json opt_json(const opt::OptimizerConfig& c) {
  return {{"adam_lr", c.adam_lr},
          {"adam_steps", c.adam_steps},
          {"adam_betas", {c.adam_beta1, c.adam_beta2}},
          {"adam_eps", c.adam_eps},
          {"minibatch", c.minibatch},
          {"qn_kind", opt::to_string(c.qn)},
          {"lbfgs_memory", c.lbfgs_memory},
          {"qn_max_iters", c.qn_max_iters},
          {"tol", c.tol},
          {"grad_tol", c.grad_tol},
          {"line_search", {{"c1", c.line_search.c1}, {"c2", c.line_search.c2}, {"max_evals", c.line_search.max_evals}}}};
}

const std::set<std::string> kFunctionalKeys{"name",   "variant", "component", "scale",  "weight", "subdomain",
                                            "offset", "points",  "coeffs",    "groups", "direction", "c_re",
                                            "nu",     "left",    "right",     "w",      "reference"};

goals::GoalFunctional parse_functional(Reader& rd, const json& j, const std::string& path,
                                       const std::map<std::string, json>& defs, const pde::ProblemParams& prm,
                                       int depth) {
  goals::GoalFunctional J;
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    const auto it = defs.find(name);
    if (it == defs.end()) {
      rd.bad.push_back(path + " references unknown functional '" + name + "'");
      return J;
    }
    return parse_functional(rd, it->second, "definitions." + name + ".", defs, prm, depth);
  }
  rd.keys(j, kFunctionalKeys, path);
  if (!j.is_object()) return J;
  if (depth > 3) {
    rd.bad.push_back(path + "functional nesting is too deep");
    return J;
  }
  rd.get(j, "name", J.name, path);
  std::string variant;
  if (rd.require(j, "variant", path)) rd.get(j, "variant", variant, path);
  rd.guard([&] { J.kind = goals::parse_goal_kind(variant); });
  rd.get(j, "component", J.component, path);
  rd.get(j, "scale", J.scale, path);
  std::string weight = goals::to_string(J.weight);
  rd.get(j, "weight", weight, path);
  rd.guard([&] { J.weight = goals::parse_weight(weight); });
  if (j.contains("subdomain")) {
    std::vector<double> ab;
    rd.get(j, "subdomain", ab, path);
    if (ab.size() == 2)
      J.cut = geo::HalfPlane{ab[0], ab[1]};
    else
      rd.bad.push_back(path + "subdomain needs [a, b]");
  }
  if (J.kind == goals::GoalKind::laplacian_integral && !J.cut) rd.bad.push_back(path + "laplacian_integral needs a subdomain");
  rd.get(j, "offset", J.offset, path);
  std::vector<std::vector<double>> pts;
  rd.get(j, "points", pts, path);
  for (const auto& p : pts) {
    if (p.size() != 2) {
      rd.bad.push_back(path + "points must be [x, y] pairs");
      break;
    }
    J.points.push_back({p[0], p[1]});
  }
  rd.get(j, "coeffs", J.coeffs, path);
  rd.get(j, "groups", J.groups, path);
  std::vector<double> dir{J.direction[0], J.direction[1]};
  rd.get(j, "direction", dir, path);
  if (dir.size() == 2) J.direction = {dir[0], dir[1]};
  J.c_re = 1.0 / (prm.nu * prm.re);
  J.nu = prm.nu;
  rd.get(j, "c_re", J.c_re, path);
  rd.get(j, "nu", J.nu, path);
  if (J.kind == goals::GoalKind::product) {
    if (rd.require(j, "left", path) && rd.require(j, "right", path)) {
      J.left = std::make_shared<const goals::GoalFunctional>(
          parse_functional(rd, j.at("left"), path + "left.", defs, prm, depth + 1));
      J.right = std::make_shared<const goals::GoalFunctional>(
          parse_functional(rd, j.at("right"), path + "right.", defs, prm, depth + 1));
    }
  }
  return J;
}

}  // namespace

json functional_to_json(const goals::GoalFunctional& J) {
  json j;
  j["name"] = J.name;
  j["variant"] = goals::to_string(J.kind);
  if (J.kind == goals::GoalKind::product) {
    j["left"] = functional_to_json(*J.left);
    j["right"] = functional_to_json(*J.right);
    return j;
  }
  j["component"] = J.component;
  j["scale"] = J.scale;
  switch (J.kind) {
    case goals::GoalKind::domain_integral:
      j["weight"] = goals::to_string(J.weight);
      break;
    case goals::GoalKind::abs_domain_integral: j["offset"] = J.offset; break;
    case goals::GoalKind::point_value:
      j["points"] = json::array();
      for (const auto& p : J.points) j["points"].push_back({p[0], p[1]});
      j["coeffs"] = J.coeffs;
      break;
    case goals::GoalKind::boundary_flux: j["groups"] = J.groups; break;
    case goals::GoalKind::drag_lift:
      j["groups"] = J.groups;
      j["direction"] = {J.direction[0], J.direction[1]};
      j["c_re"] = J.c_re;
      j["nu"] = J.nu;
      break;
    default: break;
  }
  if (J.cut) j["subdomain"] = {J.cut->a, J.cut->b};
  return j;
}

ExperimentConfig parse_config(const json& j) {
  Reader rd;
  ExperimentConfig cfg;
  dwr::Experiment& e = cfg.exp;
  rd.keys(j, {"name", "problem", "nets", "optimizer", "schedule", "boundary_density", "definitions", "goals", "sign_source",
              "quadrature", "estimator", "ieff_band", "stop_in_band", "seed", "kernel", "test_grid", "sweep", "output_dir"},
          "");
  if (!j.is_object()) throw ConfigError("config must be a JSON object", rd.bad);
  rd.get(j, "name", e.name, "");
  if (rd.require(j, "problem", "")) {
    const auto& p = j.at("problem");
    rd.keys(p, {"name", "p", "delta", "nu", "re"}, "problem.");
    if (rd.require(p, "name", "problem.")) rd.get(p, "name", e.problem, "problem.");
    rd.get(p, "p", e.params.p, "problem.");
    rd.get(p, "delta", e.params.delta, "problem.");
    rd.get(p, "nu", e.params.nu, "problem.");
    rd.get(p, "re", e.params.re, "problem.");
  }
  if (j.contains("nets")) {
    const auto& n = j.at("nets");
    rd.keys(n, {"primal", "adjoint"}, "nets.");
    if (n.contains("primal")) e.primal_net = parse_net(rd, n.at("primal"), "nets.primal.");
    e.adjoint_net = n.contains("adjoint") ? parse_net(rd, n.at("adjoint"), "nets.adjoint.") : e.primal_net;
  }
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    rd.keys(o, {"primal", "adjoint"}, "optimizer.");
    if (o.contains("primal")) e.primal_opt = parse_opt(rd, o.at("primal"), "optimizer.primal.");
    e.adjoint_opt = o.contains("adjoint") ? parse_opt(rd, o.at("adjoint"), "optimizer.adjoint.") : e.primal_opt;
  }
  if (rd.require(j, "schedule", "")) {
    std::vector<std::vector<int>> sched;
    rd.get(j, "schedule", sched, "");
    for (const auto& s : sched) {
      if (s.size() == 2 || s.size() == 3) {
        e.schedule.push_back({s[0], s[1], s.size() == 3 ? s[2] : 0});
      } else {
        rd.bad.emplace_back("schedule entries must be [nx, ny] or [nx, ny, widen]");
        break;
      }
    }
  }
  rd.get(j, "boundary_density", e.boundary_density, "");

  std::map<std::string, json> defs;
  if (j.contains("definitions")) {
    if (j.at("definitions").is_object()) {
      for (const auto& [k, v] : j.at("definitions").items()) defs[k] = v;
    } else {
      rd.bad.emplace_back("definitions must be an object of named functionals");
    }
  }
  if (rd.require(j, "goals", "")) {
    const auto& gl = j.at("goals");
    if (!gl.is_array() || gl.empty()) rd.bad.emplace_back("goals must be a nonempty array");
    std::size_t with_ref = 0;
    for (std::size_t i = 0; gl.is_array() && i < gl.size(); ++i) {
      const std::string path = "goals[" + std::to_string(i) + "].";
      e.goal.parts.push_back(parse_functional(rd, gl[i], path, defs, e.params, 0));
      double w = 1.0;
      rd.get(gl[i], "w", w, path);
      e.goal.w.push_back(w);
      if (gl[i].is_object() && gl[i].contains("reference")) {
        double r = 0.0;
        rd.get(gl[i], "reference", r, path);
        e.goal.reference.push_back(r);
        ++with_ref;
      }
    }
    if (with_ref != 0 && with_ref != e.goal.parts.size())
      rd.bad.emplace_back("reference values must be given for every goal or none");
  }
  std::string sign = "";
  rd.get(j, "sign_source", sign, "");
  rd.guard([&] {
    if (!sign.empty()) e.goal.sign_source = goals::parse_sign_source(sign);
  });
  if (sign.empty()) {
    // reference_values when references are available, else fixed_positive
    bool exact = false;
    rd.guard([&] {
      const auto names = pde::problem_names();
      if (std::find(names.begin(), names.end(), e.problem) != names.end())
        exact = static_cast<bool>(pde::make_problem(e.problem, e.params).exact);
    });
    e.goal.sign_source = exact || !e.goal.reference.empty() ? goals::SignSource::reference_values
                                                            : goals::SignSource::fixed_positive;
  }
  if (j.contains("quadrature")) {
    const auto& q = j.at("quadrature");
    rd.keys(q, {"order", "cells"}, "quadrature.");
    rd.get(q, "order", e.quad_order, "quadrature.");
    rd.get(q, "cells", e.quad_cells, "quadrature.");
  }
  if (j.contains("estimator")) {
    const auto& s = j.at("estimator");
    rd.keys(s, {"mode", "include_boundary"}, "estimator.");
    std::string mode = dwr::to_string(e.eta.mode);
    rd.get(s, "mode", mode, "estimator.");
    rd.guard([&] { e.eta.mode = dwr::parse_eta_mode(mode); });
    rd.get(s, "include_boundary", e.eta.include_boundary, "estimator.");
  }
  std::vector<double> band{e.ieff_band[0], e.ieff_band[1]};
  rd.get(j, "ieff_band", band, "");
  if (band.size() == 2)
    e.ieff_band = {band[0], band[1]};
  else
    rd.bad.emplace_back("ieff_band needs [lower, upper]");
  rd.get(j, "stop_in_band", e.stop_in_band, "");
  rd.get(j, "seed", e.seed, "");
  std::string kernel = "omp";
  rd.get(j, "kernel", kernel, "");
  rd.guard([&] { e.kernel = kernels::parse_kernel_kind(kernel); });
  rd.get(j, "test_grid", e.test_grid, "");
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    rd.keys(s, {"p", "delta"}, "sweep.");
    rd.get(s, "p", cfg.sweep.p, "sweep.");
    rd.get(s, "delta", cfg.sweep.delta, "sweep.");
  }
  rd.get(j, "output_dir", cfg.output_dir, "");

  for (std::size_t k = 0; k < std::max<std::size_t>(1, sweep_size(cfg)); ++k)
    rd.guard([&] { sweep_cell(cfg, k).validate(); });
  if (!rd.bad.empty()) {
    // one message per distinct violation, in discovery order
    std::vector<std::string> uniq;
    for (const auto& b : rd.bad) {
      if (std::find(uniq.begin(), uniq.end(), b) == uniq.end()) uniq.push_back(b);
    }
    std::string msg = "invalid config:";
    for (const auto& b : uniq) msg += "\n  - " + b;
    throw ConfigError(msg, uniq);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config ") + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json serialize_config(const ExperimentConfig& cfg) {
  const dwr::Experiment& e = cfg.exp;
  json j;
  j["name"] = e.name;
  j["problem"] = {{"name", e.problem}, {"p", e.params.p}, {"delta", e.params.delta}, {"nu", e.params.nu}, {"re", e.params.re}};
  j["nets"] = {{"primal", net_json(e.primal_net)}, {"adjoint", net_json(e.adjoint_net)}};
  j["optimizer"] = {{"primal", opt_json(e.primal_opt)}, {"adjoint", opt_json(e.adjoint_opt)}};
  j["schedule"] = json::array();
  for (const auto& l : e.schedule) j["schedule"].push_back({l.nx, l.ny, l.widen});
  j["boundary_density"] = e.boundary_density;
  j["goals"] = json::array();
  for (std::size_t n = 0; n < e.goal.parts.size(); ++n) {
    json g = functional_to_json(e.goal.parts[n]);
    g["w"] = e.goal.w[n];
    if (!e.goal.reference.empty()) g["reference"] = e.goal.reference[n];
    j["goals"].push_back(g);
  }
  j["sign_source"] = goals::to_string(e.goal.sign_source);
  j["quadrature"] = {{"order", e.quad_order}, {"cells", e.quad_cells}};
  j["estimator"] = {{"mode", dwr::to_string(e.eta.mode)}, {"include_boundary", e.eta.include_boundary}};
  j["ieff_band"] = {e.ieff_band[0], e.ieff_band[1]};
  j["stop_in_band"] = e.stop_in_band;
  j["seed"] = e.seed;
  j["kernel"] = e.kernel == kernels::KernelKind::serial ? "serial" : "omp";
  j["test_grid"] = e.test_grid;
  if (!cfg.sweep.empty()) j["sweep"] = {{"p", cfg.sweep.p}, {"delta", cfg.sweep.delta}};
  j["output_dir"] = cfg.output_dir;
  return j;
}

std::size_t sweep_size(const ExperimentConfig& cfg) {
  if (cfg.sweep.empty()) return 1;
  return std::max<std::size_t>(1, cfg.sweep.p.size()) * std::max<std::size_t>(1, cfg.sweep.delta.size());
}

dwr::Experiment sweep_cell(const ExperimentConfig& cfg, std::size_t index) {
  dwr::Experiment e = cfg.exp;
  if (cfg.sweep.empty()) return e;
  const std::size_t nd = std::max<std::size_t>(1, cfg.sweep.delta.size());
  if (!cfg.sweep.p.empty()) e.params.p = cfg.sweep.p.at(index / nd);
  if (!cfg.sweep.delta.empty()) e.params.delta = cfg.sweep.delta.at(index % nd);
  e.seed += 7919ULL * index;
  std::ostringstream name;
  name << e.name << "_p" << e.params.p << "_d" << e.params.delta;
  e.name = name.str();
  return e;
}

}  // namespace dwrnet::run
