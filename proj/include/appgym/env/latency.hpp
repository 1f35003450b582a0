#pragma once

#include <map>
#include <stdexcept>

#include <nlohmann/json_fwd.hpp>

#include "appgym/core/types.hpp"
#include "appgym/util/rng.hpp"

namespace appgym {

// Per-action delays, in milliseconds at the desk scale (1000x faster than a
// real device, so a 3 s tap becomes 3 ms). Scrolling is the slow action,
// typing the fast one; a screen change costs an extra stabilization wait.
struct LatencyModel {
  std::map<ActionKind, double> base_ms{
      {ActionKind::Click, 3.0},     {ActionKind::LongPress, 4.5},
      {ActionKind::Type, 1.0},      {ActionKind::Scroll, 6.0},
      {ActionKind::PressHome, 2.0}, {ActionKind::PressBack, 2.0},
      {ActionKind::OpenApp, 5.0},   {ActionKind::Finished, 0.5},
      {ActionKind::Answer, 0.5},
  };
  double reset_ms = 3.0;
  double jitter_frac = 0.25;        // uniform +/- fraction of base
  double stabilization_ms = 3.0;    // extra wait cap after a screen change

  void validate() const {
    for (const auto& [k, v] : base_ms)
      if (v < 0) throw std::invalid_argument("latency base must be >= 0");
    if (jitter_frac < 0 || jitter_frac > 1)
      throw std::invalid_argument("jitter_frac must be in [0,1]");
    if (stabilization_ms < 0 || reset_ms < 0)
      throw std::invalid_argument("delays must be >= 0");
  }

  double sample(ActionKind kind, bool screen_changed, Rng& rng) const {
    auto it = base_ms.find(kind);
    double base = it == base_ms.end() ? 1.0 : it->second;
    double ms = base * (1.0 + jitter_frac * rng.uniform(-1.0, 1.0));
    if (screen_changed) ms += rng.uniform(0.0, stabilization_ms);
    return ms < 0 ? 0.0 : ms;
  }

  json to_json() const;
  static LatencyModel from_json(const json& j);
};

struct FaultModel {
  double crash_prob = 0.0;  // per step
  double hang_prob = 0.0;
  double hang_ms = 50.0;

  void validate() const {
    if (crash_prob < 0 || crash_prob > 1 || hang_prob < 0 || hang_prob > 1)
      throw std::invalid_argument("fault probabilities must be in [0,1]");
    if (hang_ms < 0) throw std::invalid_argument("hang_ms must be >= 0");
  }

  json to_json() const;
  static FaultModel from_json(const json& j);
};

}  // namespace appgym
