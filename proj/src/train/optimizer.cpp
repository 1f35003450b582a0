#include "appgym/train/optimizer.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "appgym/train/loss.hpp"

namespace appgym {

json AdamConfig::to_json() const {
  return json{{"lr_max", lr_max},
              {"warmup_steps", warmup_steps},
              {"beta1", beta1},
              {"beta2", beta2},
              {"eps", eps}};
}

AdamConfig AdamConfig::from_json(const json& j) {
  AdamConfig c;
  c.lr_max = j.value("lr_max", 3e-3);
  c.warmup_steps = j.value("warmup_steps", 100);
  c.beta1 = j.value("beta1", 0.9);
  c.beta2 = j.value("beta2", 0.999);
  c.eps = j.value("eps", 1e-8);
  return c;
}

json AdamState::to_json() const {
  return json{{"m", m}, {"v", v}, {"t", t}};
}

AdamState AdamState::from_json(const json& j) {
  AdamState s;
  s.m = j.at("m").get<std::vector<double>>();
  s.v = j.at("v").get<std::vector<double>>();
  s.t = j.at("t").get<int64_t>();
  return s;
}

double warmup_lr(const AdamConfig& config, int64_t step_index) {
  if (config.warmup_steps <= 0) return config.lr_max;
  const double ramp = static_cast<double>(step_index) / config.warmup_steps;
  return config.lr_max * std::min(1.0, ramp);
}

void adam_update(std::vector<double>& params, const std::vector<double>& grad,
                 AdamState& state, const AdamConfig& config,
                 int64_t step_index) {
  if (params.size() != grad.size())
    throw std::invalid_argument("gradient size mismatch");
  for (double g : grad)
    if (!std::isfinite(g))
      throw NumericsError("non-finite gradient entry at update step " +
                          std::to_string(step_index));
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.t = 0;
  }
  ++state.t;
  const double lr = warmup_lr(config, step_index);
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
  for (size_t i = 0; i < params.size(); ++i) {
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * grad[i];
    state.v[i] =
        config.beta2 * state.v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + config.eps);
  }
}

}  // namespace appgym
