#pragma once

#include <cmath>

#include "tbrl/numcore/tensor.hpp"

namespace tbrl::num {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Moments live in each Param; this object only
// carries the hyperparameters and the shared step counter.
class Adam {
 public:
  Adam() = default;
  explicit Adam(AdamConfig config) : config_(config) {}

  void step(const ParamSet& params) {
    for (const Param* p : params) require_finite(p->grad, "gradient of " + p->name);
    ++t_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (Param* p : params) {
      p->m = config_.beta1 * p->m + (1.0 - config_.beta1) * p->grad;
      p->v = config_.beta2 * p->v + (1.0 - config_.beta2) * p->grad.cwiseProduct(p->grad);
      p->value.array() -=
          config_.lr * (p->m.array() / c1) / ((p->v.array() / c2).sqrt() + config_.eps);
      require_finite(p->value, p->name);
    }
  }

  long steps() const { return t_; }
  void set_steps(long t) { t_ = t; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  long t_ = 0;
};

inline void adam_step(const ParamSet& params, Adam& optimizer) { optimizer.step(params); }

}  // namespace tbrl::num
