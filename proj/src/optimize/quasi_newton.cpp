#include <chrono>
#include <cmath>
#include <deque>

#include "detail.hpp"
#include "dwrnet/optimize/optimizer.hpp"

namespace dwrnet::opt {

namespace {

// Rank-two inverse update given Hy = H y, in one pass over the full matrix:
// H - rho (Hy s^T + s Hy^T) + (rho^2 yHy + rho) s s^T.
void bfgs_update_hy(Eigen::MatrixXd& H, const Eigen::VectorXd& s, const Eigen::VectorXd& y, const Eigen::VectorXd& Hy) {
  const double rho = 1.0 / s.dot(y);
  const double c = rho * rho * y.dot(Hy) + rho;
  const Eigen::VectorXd u = c * s - rho * Hy;
  const Eigen::VectorXd v = -rho * s;
  for (Eigen::Index j = 0; j < H.cols(); ++j) H.col(j) += u * s(j) + v * Hy(j);
}

}  // namespace

void bfgs_update(Eigen::MatrixXd& H, const Eigen::VectorXd& s, const Eigen::VectorXd& y) {
  const Eigen::VectorXd Hy = H * y;
  bfgs_update_hy(H, s, y, Hy);
}

Eigen::VectorXd lbfgs_two_loop(const std::vector<Eigen::VectorXd>& s, const std::vector<Eigen::VectorXd>& y,
                               const Eigen::VectorXd& g, double gamma) {
  const std::size_t m = s.size();
  std::vector<double> alpha(m), rho(m);
  Eigen::VectorXd q = g;
  for (std::size_t k = m; k-- > 0;) {
    rho[k] = 1.0 / s[k].dot(y[k]);
    alpha[k] = rho[k] * s[k].dot(q);
    q -= alpha[k] * y[k];
  }
  Eigen::VectorXd r = gamma * q;
  for (std::size_t k = 0; k < m; ++k) {
    const double beta = rho[k] * y[k].dot(r);
    r += (alpha[k] - beta) * s[k];
  }
  return r;
}

TrainResult quasinewton_run(const LossGrad& loss, ParamVector theta0, const OptimizerConfig& cfg, int first_iter) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  TrainResult res;
  res.theta = std::move(theta0);
  const auto n = static_cast<Eigen::Index>(res.theta.size());

  ad::ValueGrad cur;
  if (!detail::safe_eval(loss, res.theta, cur))
    throw NumericalError("quasi-Newton: non-finite loss at the initial parameters");
  Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(cur.grad.data(), n);
  double f = cur.value;
  res.loss = f;
  res.grad_norm = g.norm();
  res.trace.rows.push_back({first_iter, "qn", f, res.grad_norm, detail::seconds_since(t0)});

  const bool dense = cfg.qn == QnKind::bfgs;
  Eigen::MatrixXd H;
  bool h_scaled = false;
  // Hg tracks H g for the dense update, so each iteration needs one matvec.
  Eigen::VectorXd Hg;
  if (dense) {
    H = Eigen::MatrixXd::Identity(n, n);
    Hg = g;
  }
  std::deque<Eigen::VectorXd> S, Y;
  double gamma = 1.0;
  auto reset = [&] {
    if (dense) {
      H.setIdentity();
      Hg = g;
    }
    h_scaled = false;
    S.clear();
    Y.clear();
    gamma = 1.0;
  };

  bool just_reset = true;
  bool retried = false;
  while (true) {
    if (f < cfg.tol) {
      res.trace.stop_reason = "tolerance";
      break;
    }
    if (res.grad_norm < cfg.grad_tol) {
      res.trace.stop_reason = "gradient tolerance";
      break;
    }
    if (res.iterations >= cfg.qn_max_iters || cfg.qn == QnKind::none) {
      res.trace.stop_reason = "max iterations";
      break;
    }
    Eigen::VectorXd d;
    if (dense) {
      d = -Hg;
    } else {
      d = -lbfgs_two_loop({S.begin(), S.end()}, {Y.begin(), Y.end()}, g, gamma);
    }
    if (!(g.dot(d) < 0.0)) {
      reset();
      d = -g;
      just_reset = true;
    }
    const double alpha0 = just_reset ? std::min(1.0, 1.0 / std::max(1e-300, g.norm())) : 1.0;
    auto ls = strong_wolfe_search(loss, res.theta, f, std::span<const double>(g.data(), static_cast<std::size_t>(n)),
                                  std::span<const double>(d.data(), static_cast<std::size_t>(n)), alpha0, cfg.line_search);
    if (!ls.ok) {
      if (!retried && !just_reset) {
        retried = true;
        reset();
        just_reset = true;
        continue;
      }
      res.trace.line_search_failed = true;
      res.trace.stop_reason = "line search failure";
      break;
    }
    retried = false;
    just_reset = false;
    const Eigen::VectorXd s = ls.alpha * d;
    const Eigen::VectorXd g_new = Eigen::Map<const Eigen::VectorXd>(ls.g.data(), n);
    const Eigen::VectorXd y = g_new - g;
    const double dphi0 = g.dot(d);
    const bool wolfe = ls.f <= f + cfg.line_search.c1 * ls.alpha * dphi0 &&
                       std::abs(g_new.dot(d)) <= cfg.line_search.c2 * std::abs(dphi0);
    for (Eigen::Index i = 0; i < n; ++i) res.theta[static_cast<std::size_t>(i)] += s(i);
    f = ls.f;
    g = g_new;
    ++res.iterations;
    res.loss = f;
    res.grad_norm = g.norm();
    TraceRow row{first_iter + res.iterations, "qn", f, res.grad_norm, detail::seconds_since(t0)};
    row.step = ls.alpha;
    row.wolfe_ok = wolfe;
    res.trace.rows.push_back(row);

    const double sy = s.dot(y);
    if (sy <= 1e-12 * s.norm() * y.norm()) {
      if (dense) Hg = H * g;
      continue;
    }
    if (dense) {
      Eigen::VectorXd Hgn = H * g;
      if (!h_scaled) {
        const double scale = sy / y.squaredNorm();
        H *= scale;
        Hgn *= scale;
        Hg *= scale;
        h_scaled = true;
      }
      const Eigen::VectorXd Hy = Hgn - Hg;
      const double rho = 1.0 / sy;
      const double sg = s.dot(g);
      const double c = rho * rho * y.dot(Hy) + rho;
      Hg = Hgn - rho * (Hy * sg + s * Hy.dot(g)) + c * sg * s;
      bfgs_update_hy(H, s, y, Hy);
    } else {
      S.push_back(s);
      Y.push_back(y);
      if (static_cast<int>(S.size()) > cfg.lbfgs_memory) {
        S.pop_front();
        Y.pop_front();
      }
      gamma = sy / y.squaredNorm();
    }
  }
  res.trace.wall_seconds = detail::seconds_since(t0);
  return res;
}

}  // namespace dwrnet::opt
