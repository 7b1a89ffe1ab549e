#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dwrnet/goals/combined.hpp"
#include "dwrnet/kernels/jet_kernel.hpp"
#include "dwrnet/optimize/optimizer.hpp"
#include "dwrnet/problems/catalog.hpp"

namespace dwrnet::dwr {

using ad::SpatialJet2;

struct NetConfig {
  std::vector<int> hidden{30, 30, 20};
  /// One tag per hidden layer, or a single tag applied to all.
  std::vector<std::string> activations{"tanh"};
  nn::BiasInit bias = nn::BiasInit::zeros;

  std::vector<ad::Activation> resolved() const;
  std::vector<int> layer_sizes(int n_out) const;
  void validate() const;
};

/// Network with normalization bounds set to the bounding box.
nn::Mlp build_net(const NetConfig& cfg, int n_out, const std::array<double, 4>& bbox);

struct SolveResult {
  nn::Mlp net;
  opt::TrainResult train;
  std::uint64_t seed = 0;
  std::shared_ptr<const pde::Field> field() const { return std::make_shared<pde::NetworkField>(net); }
};

/// Xavier-initialized network trained on the collocation loss of `system`.
SolveResult solve_system(std::shared_ptr<const pde::PdeSystem> system, const geo::CollocationSet& colloc,
                         const NetConfig& net_cfg, const opt::OptimizerConfig& opt_cfg,
                         const std::array<double, 4>& bbox, std::uint64_t seed,
                         kernels::KernelKind kind = kernels::KernelKind::omp);

SolveResult solve_primal(const pde::Problem& problem, const geo::CollocationSet& colloc, const NetConfig& net_cfg,
                         const opt::OptimizerConfig& opt_cfg, std::uint64_t seed,
                         kernels::KernelKind kind = kernels::KernelKind::omp);

/// N'(u_theta) z = sum_n omega_n J_n'(u_theta).
std::shared_ptr<pde::PdeSystem> assemble_adjoint_problem(const pde::Problem& problem,
                                                         std::shared_ptr<const pde::Field> primal,
                                                         goals::GoalEvaluator& evaluator,
                                                         const std::vector<goals::GoalFunctional>& parts,
                                                         const std::vector<double>& omega);

SolveResult solve_adjoint(std::shared_ptr<const pde::PdeSystem> adjoint, const pde::Problem& problem,
                          const geo::CollocationSet& colloc, const NetConfig& net_cfg,
                          const opt::OptimizerConfig& opt_cfg, std::uint64_t seed,
                          kernels::KernelKind kind = kernels::KernelKind::omp);

enum class EtaMode {
  measure,     // quadrature over Omega and its boundary
  point_mean,  // average over the collocation points, 1/N with N = N_int + N_bnd
};

EtaMode parse_eta_mode(const std::string& name);
std::string to_string(EtaMode mode);

struct EtaOptions {
  EtaMode mode = EtaMode::measure;
  bool include_boundary = true;
};

/// Sites carrying the estimator weights of the chosen mode.
std::vector<pde::Site> eta_sites(const pde::Problem& problem, const geo::CollocationSet& colloc,
                                 goals::GoalEvaluator& evaluator, const EtaOptions& opts);

/// eta = -sum_s weight_s sum_k r_k(u) w_k(u, z) over annotated sites.
double estimate_eta(const pde::PdeSystem& system, const pde::Field& u, const pde::Field& z,
                    std::vector<pde::Site> sites);

/// eta / e; FunctionalError when |e| <= 1e-14.
double effectivity(double eta, double e);

struct Level {
  int nx = 0;
  int ny = 0;
  int widen = 0;  // neurons added to every hidden layer of both nets
};

struct Experiment {
  std::string name = "experiment";
  std::string problem;
  pde::ProblemParams params;
  NetConfig primal_net;
  NetConfig adjoint_net;
  opt::OptimizerConfig primal_opt;
  opt::OptimizerConfig adjoint_opt;
  std::vector<Level> schedule;
  double boundary_density = 1.0;
  goals::CombinedFunctional goal;
  int quad_order = 8;
  int quad_cells = 4;
  std::uint64_t seed = 1234;
  EtaOptions eta;
  std::array<double, 2> ieff_band{0.75, 1.25};
  bool stop_in_band = false;
  int test_grid = 100;
  kernels::KernelKind kernel = kernels::KernelKind::omp;

  /// Throws ConfigError listing every violation.
  void validate() const;
};

struct EstimateReport {
  std::string problem;
  int level = 0;
  int nx = 0, ny = 0;
  std::size_t n_int = 0, n_bnd = 0;
  std::vector<std::string> names;
  std::vector<double> j_theta;
  std::optional<std::vector<double>> j_reference;
  std::vector<double> omega;
  double jc_theta = 0.0;
  std::optional<double> jc_reference;
  double eta = 0.0;
  std::optional<double> true_error;
  std::optional<double> i_eff;
  bool in_band = false;
  std::vector<double> cancellation_terms;  // omega_n (J_n(u) - J_n(u_theta))
  double loss_primal = 0.0;
  double loss_adjoint = 0.0;
  double r_err = 0.0;
  std::optional<double> rel_l2;
  std::uint64_t seed_primal = 0, seed_adjoint = 0;
  std::vector<int> primal_shape, adjoint_shape;
  bool primal_line_search_failed = false;
  bool adjoint_line_search_failed = false;
  std::string error;
  int error_code = 0;
  double seconds = 0.0;  // wall time, kept out of to_json

  nlohmann::json to_json() const;
  static EstimateReport from_json(const nlohmann::json& j);
};

/// level,n_int,n_bnd,J_c_theta,eta,e,i_eff,loss_primal,loss_adjoint,seconds
std::string sweep_csv(const std::vector<EstimateReport>& reports);

/// Artifacts of one level, kept for export by the runner.
struct LevelArtifacts {
  std::optional<SolveResult> primal;
  std::optional<SolveResult> adjoint;
  opt::TrainTrace primal_trace, adjoint_trace;
};

struct AlgorithmResult {
  std::vector<EstimateReport> reports;
  std::vector<LevelArtifacts> artifacts;
};

/// Train, estimate, compare I_eff and refine, one report per level. `only_level`
/// restricts the run to one schedule entry.
AlgorithmResult run_algorithm1(const Experiment& exp, std::optional<int> only_level = std::nullopt);

/// One level on an existing problem instance.
EstimateReport run_level(const Experiment& exp, const pde::Problem& problem, int level, LevelArtifacts* artifacts);

}  // namespace dwrnet::dwr
