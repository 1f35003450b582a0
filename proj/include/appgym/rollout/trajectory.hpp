#pragma once

#include <vector>

#include "appgym/core/types.hpp"
#include "appgym/policy/vocab.hpp"

namespace appgym {

// Per-step data the optimizer needs beyond the canonical trajectory record:
// the featurized state and the masking context it was sampled under.
struct RichStep {
  std::vector<double> features;
  MaskContext mask;
};

enum class RolloutStatus { Complete, Truncated, Failed };

struct RichTrajectory {
  Trajectory base;
  std::vector<RichStep> rich;  // parallel to base.steps
  int64_t behavior_version = 0;
  RolloutStatus status = RolloutStatus::Complete;
  int worker_id = -1;
  int group_slot = -1;
};

}  // namespace appgym
