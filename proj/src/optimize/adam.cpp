#include <chrono>
#include <cmath>

#include "dwrnet/optimize/optimizer.hpp"
#include "detail.hpp"

namespace dwrnet::opt {

TrainResult adam_run(const LossGrad& loss, ParamVector theta0, const OptimizerConfig& cfg, int first_iter) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  TrainResult res;
  res.theta = std::move(theta0);
  const std::size_t n = res.theta.size();
  std::vector<double> m(n, 0.0), v(n, 0.0);
  ParamVector last = res.theta;
  double b1t = 1.0, b2t = 1.0;
  for (int k = 0; k < cfg.adam_steps; ++k) {
    ad::ValueGrad vg;
    if (!detail::safe_eval(loss, res.theta, vg)) {
      res.theta = std::move(last);
      res.trace.stop_reason = "non-finite loss";
      break;
    }
    last = res.theta;
    const double gn = detail::norm(vg.grad);
    res.trace.rows.push_back({first_iter + k, "adam", vg.value, gn, detail::seconds_since(t0)});
    res.loss = vg.value;
    res.grad_norm = gn;
    ++res.iterations;
    if (vg.value < cfg.tol) {
      res.trace.stop_reason = "tolerance";
      break;
    }
    b1t *= cfg.adam_beta1;
    b2t *= cfg.adam_beta2;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = vg.grad[i];
      m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * g;
      v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * g * g;
      const double mh = m[i] / (1.0 - b1t);
      const double vh = v[i] / (1.0 - b2t);
      res.theta[i] -= cfg.adam_lr * mh / (std::sqrt(vh) + cfg.adam_eps);
    }
  }
  if (res.trace.stop_reason.empty()) res.trace.stop_reason = "adam steps";
  res.trace.wall_seconds = detail::seconds_since(t0);
  return res;
}

}  // namespace dwrnet::opt
