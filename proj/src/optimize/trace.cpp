#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "dwrnet/optimize/optimizer.hpp"

namespace dwrnet::opt {

QnKind parse_qn_kind(const std::string& name) {
  if (name == "none") return QnKind::none;
  if (name == "bfgs") return QnKind::bfgs;
  if (name == "lbfgs") return QnKind::lbfgs;
  throw ConfigError("unknown quasi-Newton kind '" + name + "'");
}

std::string to_string(QnKind kind) {
  switch (kind) {
    case QnKind::none: return "none";
    case QnKind::bfgs: return "bfgs";
    case QnKind::lbfgs: return "lbfgs";
  }
  return "none";
}

void OptimizerConfig::validate() const {
  std::vector<std::string> bad;
  if (!(adam_lr > 0.0)) bad.emplace_back("adam_lr must be positive");
  if (adam_steps < 0) bad.emplace_back("adam_steps must be nonnegative");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) bad.emplace_back("adam_betas[0] must lie in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) bad.emplace_back("adam_betas[1] must lie in [0, 1)");
  if (!(adam_eps > 0.0)) bad.emplace_back("adam_eps must be positive");
  if (minibatch < 0) bad.emplace_back("minibatch must be nonnegative");
  if (lbfgs_memory < 1) bad.emplace_back("lbfgs_memory must be at least 1");
  if (qn_max_iters < 0) bad.emplace_back("qn_max_iters must be nonnegative");
  if (!(tol > 0.0)) bad.emplace_back("tol must be positive");
  if (!(grad_tol >= 0.0)) bad.emplace_back("grad_tol must be nonnegative");
  if (!(line_search.c1 > 0.0 && line_search.c1 < line_search.c2 && line_search.c2 < 1.0))
    bad.emplace_back("line search needs 0 < c1 < c2 < 1");
  if (line_search.max_evals < 1) bad.emplace_back("line search max_evals must be at least 1");
  if (!bad.empty()) {
    std::string msg = "invalid optimizer config:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw ConfigError(msg, bad);
  }
}

void TrainTrace::append(const TrainTrace& other) {
  // Appended rows continue the clock of this trace.
  for (TraceRow r : other.rows) {
    r.seconds += wall_seconds;
    rows.push_back(r);
  }
  wall_seconds += other.wall_seconds;
  line_search_failed = line_search_failed || other.line_search_failed;
  if (!other.stop_reason.empty()) stop_reason = other.stop_reason;
}

std::string TrainTrace::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "iter,phase,loss,grad_norm,seconds\n";
  for (const auto& r : rows) os << r.iter << ',' << r.phase << ',' << r.loss << ',' << r.grad_norm << ',' << r.seconds << '\n';
  return os.str();
}

void TrainTrace::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trace " + path.string());
  out << csv();
  if (!out) throw IoError("failed writing trace " + path.string());
}

double TrainTrace::best_loss() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) best = std::min(best, r.loss);
  return best;
}

}  // namespace dwrnet::opt
