#include "dwrnet/optimize/optimizer.hpp"

namespace dwrnet::opt {

TrainResult train(const LossGrad& loss, ParamVector theta0, const OptimizerConfig& cfg, const LossGrad& adam_loss) {
  cfg.validate();
  TrainResult res;
  res.theta = std::move(theta0);
  int next_iter = 0;
  if (cfg.adam_steps > 0) {
    res = adam_run(adam_loss ? adam_loss : loss, std::move(res.theta), cfg, 0);
    next_iter = res.iterations;
    if (res.trace.stop_reason == "non-finite loss") return res;
  }
  TrainTrace adam_trace = std::move(res.trace);
  const int adam_iters = res.iterations;
  res = quasinewton_run(loss, std::move(res.theta), cfg, next_iter);
  adam_trace.append(res.trace);
  res.trace = std::move(adam_trace);
  res.iterations += adam_iters;
  return res;
}

}  // namespace dwrnet::opt
