#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "appgym/core/types.hpp"

namespace appgym {

struct AdamConfig {
  double lr_max = 3e-3;
  int warmup_steps = 100;  // lr(step) = lr_max * min(1, step / warmup)
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  json to_json() const;
  static AdamConfig from_json(const json& j);
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  int64_t t = 0;

  json to_json() const;
  static AdamState from_json(const json& j);
};

double warmup_lr(const AdamConfig& config, int64_t step_index);

// First/second-moment adaptive update with bias correction; `step_index` is
// 1-based and drives the warmup ramp. Throws NumericsError on a non-finite
// gradient.
void adam_update(std::vector<double>& params, const std::vector<double>& grad,
                 AdamState& state, const AdamConfig& config,
                 int64_t step_index);

}  // namespace appgym
