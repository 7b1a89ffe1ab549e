#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dwrnet/autodiff/tape.hpp"
#include "dwrnet/common.hpp"

namespace dwrnet::opt {

using LossGrad = std::function<ad::ValueGrad(std::span<const double>)>;

struct StrongWolfe {
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_evals = 30;
};

enum class QnKind { none, bfgs, lbfgs };

QnKind parse_qn_kind(const std::string& name);
std::string to_string(QnKind kind);

struct OptimizerConfig {
  double adam_lr = 1e-3;
  int adam_steps = 2000;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int minibatch = 0;  // 0 = full batch; Adam phase only
  QnKind qn = QnKind::bfgs;
  int lbfgs_memory = 20;
  int qn_max_iters = 5000;
  double tol = 1e-12;
  double grad_tol = 1e-10;
  StrongWolfe line_search;

  /// Throws ConfigError listing every violated constraint.
  void validate() const;
};

struct TraceRow {
  int iter = 0;
  std::string phase;
  double loss = 0.0;
  double grad_norm = 0.0;
  double seconds = 0.0;
  double step = 0.0;      // accepted line-search step (quasi-Newton rows)
  bool wolfe_ok = true;   // strong Wolfe conditions held at the accepted step
};

struct TrainTrace {
  std::vector<TraceRow> rows;
  double wall_seconds = 0.0;
  bool line_search_failed = false;
  std::string stop_reason;

  void append(const TrainTrace& other);
  /// iter,phase,loss,grad_norm,seconds
  std::string csv() const;
  void write_csv(const std::filesystem::path& path) const;
  double best_loss() const;
};

struct TrainResult {
  ParamVector theta;
  double loss = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;  // accepted updates
  TrainTrace trace;
};

TrainResult adam_run(const LossGrad& loss, ParamVector theta0, const OptimizerConfig& cfg, int first_iter = 0);
TrainResult quasinewton_run(const LossGrad& loss, ParamVector theta0, const OptimizerConfig& cfg, int first_iter = 0);
/// Adam warm-up followed by quasi-Newton refinement; one concatenated trace.
/// `adam_loss` may differ from `loss` (minibatches); defaults to `loss`.
TrainResult train(const LossGrad& loss, ParamVector theta0, const OptimizerConfig& cfg, const LossGrad& adam_loss = {});

struct LineSearchResult {
  double alpha = 0.0;
  double f = 0.0;
  std::vector<double> g;
  bool ok = false;
  int evals = 0;
};

/// Nocedal–Wright bracketing and zoom for the strong Wolfe conditions along d.
LineSearchResult strong_wolfe_search(const LossGrad& loss, std::span<const double> x, double f0,
                                     std::span<const double> g0, std::span<const double> d, double alpha0,
                                     const StrongWolfe& params);

/// Inverse-Hessian BFGS update H <- (I - r s y^T) H (I - r y s^T) + r s s^T.
void bfgs_update(Eigen::MatrixXd& H, const Eigen::VectorXd& s, const Eigen::VectorXd& y);

/// L-BFGS two-loop recursion: returns H g for the implicit H built from the
/// pairs (oldest first) on top of gamma * I.
Eigen::VectorXd lbfgs_two_loop(const std::vector<Eigen::VectorXd>& s, const std::vector<Eigen::VectorXd>& y,
                               const Eigen::VectorXd& g, double gamma);

}  // namespace dwrnet::opt
