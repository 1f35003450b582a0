#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "appgym/core/types.hpp"

namespace appgym {

struct FeatureConfig {
  int instruction_hash_dims = 32;
  int t_max = 20;  // step-index normalization

  json to_json() const;
  static FeatureConfig from_json(const json& j);
};

// Fixed-length, deterministic featurization of an agent state: screen
// one-hot, widget-kind counts, focused-field flag, signed hash of the
// instruction words, normalized step index, last-action one-hot.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(FeatureConfig config = {});

  int dim() const { return dim_; }
  const FeatureConfig& config() const { return config_; }

  std::vector<double> extract(const AgentState& state) const;

 private:
  FeatureConfig config_;
  int dim_;
};

}  // namespace appgym
