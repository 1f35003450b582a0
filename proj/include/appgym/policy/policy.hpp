#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "appgym/core/types.hpp"
#include "appgym/policy/features.hpp"
#include "appgym/policy/vocab.hpp"
#include "appgym/util/rng.hpp"

namespace appgym {

struct PolicyConfig {
  int hidden = 64;
  uint64_t init_seed = 1;
  VocabConfig vocab;
  FeatureConfig features;

  json to_json() const;
  static PolicyConfig from_json(const json& j);
};

// Flat parameter vector of a one-hidden-layer tanh network with one output
// head per token position. Layout: W1 [h x f], b1 [h], then per position
// Wout [v x h], bout [v].
struct PolicyParams {
  std::vector<double> flat;
  int n_features = 0;
  int hidden = 0;
  int vocab = 0;
  int64_t version = 0;

  size_t size() const { return flat.size(); }
  int w1_at(int j, int k) const { return j * n_features + k; }
  int b1_at(int j) const { return hidden * n_features + j; }
  int head_base(int pos) const {
    return hidden * n_features + hidden + pos * (vocab * hidden + vocab);
  }
  int wout_at(int pos, int t, int j) const {
    return head_base(pos) + t * hidden + j;
  }
  int bout_at(int pos, int t) const {
    return head_base(pos) + vocab * hidden + t;
  }

  json to_json() const;
  static PolicyParams from_json(const json& j);
};

inline constexpr int kMaxTokenPositions = 3;

class Policy {
 public:
  explicit Policy(PolicyConfig config);

  const PolicyConfig& config() const { return config_; }
  const TokenVocab& vocab() const { return vocab_; }
  const FeatureExtractor& features() const { return features_; }

  // Hidden weights uniform in +/-1/sqrt(fan_in); output heads zero, so the
  // initial policy is uniform over unmasked tokens.
  PolicyParams init_params() const;

  MaskContext mask_context(const Observation& obs) const;

  struct Sampled {
    std::vector<int> tokens;
    std::vector<double> logprobs;  // post-mask, post-temperature
    Action action;
  };

  Sampled sample(const PolicyParams& params, const AgentState& state,
                 double temperature, Rng& rng) const;
  Sampled greedy(const PolicyParams& params, const AgentState& state) const;

  // Per-token log-probabilities of a recorded sequence under `params`
  // (temperature 1; raw parameters). When `weights`/`grad` are given, adds
  // sum_t weights[t] * d log pi(token_t) / d theta into `grad`.
  // Throws MaskError if a token is masked out for its position.
  std::vector<double> token_logprobs(const PolicyParams& params,
                                     std::span<const double> feats,
                                     const MaskContext& ctx,
                                     std::span<const int> tokens,
                                     const double* weights = nullptr,
                                     std::vector<double>* grad = nullptr) const;

  std::vector<double> token_logprobs(const PolicyParams& params,
                                     const AgentState& state,
                                     std::span<const int> tokens) const;

  // Unbiased per-token KL penalty estimates k = r - log r - 1 with
  // r = pi_ref(token) / pi_theta(token); always >= 0.
  std::vector<double> kl_tokens(const PolicyParams& params,
                                const PolicyParams& ref,
                                std::span<const double> feats,
                                const MaskContext& ctx,
                                std::span<const int> tokens) const;

 private:
  Sampled decode_sampled(const PolicyParams& params,
                         std::span<const double> feats, const MaskContext& ctx,
                         double temperature, Rng* rng) const;

  PolicyConfig config_;
  TokenVocab vocab_;
  FeatureExtractor features_;
};

}  // namespace appgym
