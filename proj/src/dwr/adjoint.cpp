#include <algorithm>
#include <numeric>
#include <random>

#include "dwrnet/dwr/dwr.hpp"
#include "dwrnet/problems/residual_loss.hpp"

namespace dwrnet::dwr {

std::vector<ad::Activation> NetConfig::resolved() const {
  std::vector<ad::Activation> acts;
  for (std::size_t l = 0; l < hidden.size(); ++l)
    acts.push_back(ad::parse_activation(activations.size() == 1 ? activations[0] : activations.at(l)));
  return acts;
}

std::vector<int> NetConfig::layer_sizes(int n_out) const {
  std::vector<int> sizes{2};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(n_out);
  return sizes;
}

void NetConfig::validate() const {
  std::vector<std::string> bad;
  if (hidden.empty()) bad.emplace_back("net needs at least one hidden layer");
  for (int h : hidden) {
    if (h <= 0) {
      bad.emplace_back("hidden layer widths must be positive");
      break;
    }
  }
  if (activations.size() != 1 && activations.size() != hidden.size())
    bad.emplace_back("give one activation, or one per hidden layer");
  for (const auto& a : activations) {
    try {
      const auto act = ad::parse_activation(a);
      if (act == ad::Activation::linear) bad.emplace_back("hidden activations must be tanh, sigmoid or swish");
    } catch (const ConfigError& e) {
      bad.emplace_back(e.what());
    }
  }
  if (!bad.empty()) {
    std::string msg = "invalid net config:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw ConfigError(msg, bad);
  }
}

nn::Mlp build_net(const NetConfig& cfg, int n_out, const std::array<double, 4>& bbox) {
  cfg.validate();
  return nn::Mlp(cfg.layer_sizes(n_out), cfg.resolved(), {bbox[0], bbox[2]}, {bbox[1], bbox[3]});
}

SolveResult solve_system(std::shared_ptr<const pde::PdeSystem> system, const geo::CollocationSet& colloc,
                         const NetConfig& net_cfg, const opt::OptimizerConfig& opt_cfg,
                         const std::array<double, 4>& bbox, std::uint64_t seed, kernels::KernelKind kind) {
  opt_cfg.validate();
  SolveResult out;
  out.seed = seed;
  out.net = build_net(net_cfg, system->n_fields(), bbox);
  auto theta0 = nn::xavier_init(out.net.layer_sizes(), seed, net_cfg.bias);
  auto loss = std::make_shared<pde::CollocationLoss>(out.net, std::move(system), colloc, kind);
  opt::LossGrad full = [loss](std::span<const double> th) { return loss->value_grad(th); };
  opt::LossGrad batched;
  const std::size_t n_sites = loss->sites().size();
  if (opt_cfg.minibatch > 0 && static_cast<std::size_t>(opt_cfg.minibatch) < n_sites) {
    struct Batcher {
      std::mt19937_64 rng;
      std::vector<std::size_t> order;
      std::size_t pos = 0;
    };
    auto st = std::make_shared<Batcher>();
    st->rng.seed(seed ^ 0x9e3779b97f4a7c15ULL);
    st->order.resize(n_sites);
    std::iota(st->order.begin(), st->order.end(), std::size_t{0});
    std::shuffle(st->order.begin(), st->order.end(), st->rng);
    const auto m = static_cast<std::size_t>(opt_cfg.minibatch);
    batched = [loss, st, m](std::span<const double> th) {
      if (st->pos + m > st->order.size()) {
        std::shuffle(st->order.begin(), st->order.end(), st->rng);
        st->pos = 0;
      }
      std::vector<std::size_t> subset(st->order.begin() + static_cast<long>(st->pos),
                                      st->order.begin() + static_cast<long>(st->pos + m));
      std::sort(subset.begin(), subset.end());
      st->pos += m;
      return loss->value_grad(th, subset);
    };
  }
  out.train = opt::train(full, std::move(theta0), opt_cfg, batched);
  out.net.set_theta(out.train.theta);
  return out;
}

SolveResult solve_primal(const pde::Problem& problem, const geo::CollocationSet& colloc, const NetConfig& net_cfg,
                         const opt::OptimizerConfig& opt_cfg, std::uint64_t seed, kernels::KernelKind kind) {
  return solve_system(problem.system, colloc, net_cfg, opt_cfg, problem.domain.bbox(), seed, kind);
}

std::shared_ptr<pde::PdeSystem> assemble_adjoint_problem(const pde::Problem& problem,
                                                         std::shared_ptr<const pde::Field> primal,
                                                         goals::GoalEvaluator& evaluator,
                                                         const std::vector<goals::GoalFunctional>& parts,
                                                         const std::vector<double>& omega) {
  if (parts.size() != omega.size()) throw FunctionalError("adjoint assembly: one weight per functional is required");
  std::vector<pde::AdjointRhs> rhs;
  for (const auto& J : parts) rhs.push_back(evaluator.derivative(J, primal, *problem.system));
  return problem.system->adjoint(std::move(primal), pde::AdjointRhs::combine(rhs, omega));
}

SolveResult solve_adjoint(std::shared_ptr<const pde::PdeSystem> adjoint, const pde::Problem& problem,
                          const geo::CollocationSet& colloc, const NetConfig& net_cfg,
                          const opt::OptimizerConfig& opt_cfg, std::uint64_t seed, kernels::KernelKind kind) {
  return solve_system(std::move(adjoint), colloc, net_cfg, opt_cfg, problem.domain.bbox(), seed, kind);
}

}  // namespace dwrnet::dwr
