#pragma once

#include <span>
#include <vector>

#include "appgym/policy/policy.hpp"
#include "appgym/rollout/trajectory.hpp"

namespace appgym {

struct OnPolicyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Group-relative advantages: (R - mean) / population std, one value per
// trajectory, broadcast to every step. All-equal groups get zeros.
std::vector<double> compute_advantages(std::span<const int> rewards);

inline constexpr double kAdvantageSigmaGuard = 1e-8;

struct TrajGroup {
  Context context;
  std::vector<RichTrajectory> trajectories;
};

struct GroupBatch {
  std::vector<TrajGroup> groups;
  int64_t behavior_version = 0;
};

struct LossDiagnostics {
  double loss = 0.0;
  double policy_term = 0.0;
  double kl_term = 0.0;
  double value_loss = 0.0;
  double clip_fraction = 0.0;
  double mean_kl = 0.0;
  double mean_ratio = 1.0;
};

struct GrpoConfig {
  double clip_eps = 0.2;
  double kl_beta = 0.05;
  // Ratios use the exp of the token-mean log-ratio within a timestep by
  // default; the per-token alternative is kept for ablation.
  bool per_token_surrogate = false;
  int num_threads = 0;  // 0 = runtime default
};

struct LossResult {
  std::vector<double> grad;  // w.r.t. policy parameters
  LossDiagnostics diag;
};

// Clipped group-relative surrogate with a KL penalty to the reference
// policy, averaged per token within each timestep. Gradients are exact.
LossResult grpo_loss_and_grad(const Policy& policy, const GroupBatch& batch,
                              const PolicyParams& params,
                              const PolicyParams& old_params,
                              const PolicyParams& ref_params,
                              const GrpoConfig& config);

struct PpoConfig {
  double clip_eps = 0.2;
  double gamma = 1.0;
  double lambda = 1.0;
  double value_coef = 0.5;
  int num_threads = 0;
};

// Linear state-value head used by the PPO baseline: v(x) = w . x + b,
// stored as n_features weights followed by the bias.
struct ValueParams {
  std::vector<double> flat;

  static ValueParams zeros(int n_features) {
    ValueParams v;
    v.flat.assign(n_features + 1, 0.0);
    return v;
  }
  double value(std::span<const double> feats) const {
    double z = flat.back();
    for (size_t i = 0; i + 1 < flat.size(); ++i) z += flat[i] * feats[i];
    return z;
  }
};

struct PpoLossResult {
  std::vector<double> policy_grad;
  std::vector<double> value_grad;
  LossDiagnostics diag;
};

// Token-level clipped PPO with GAE; the binary reward sits on the final
// token of each trajectory and is propagated backward.
PpoLossResult ppo_loss_and_grad(const Policy& policy, const GroupBatch& batch,
                                const PolicyParams& params,
                                const PolicyParams& old_params,
                                const ValueParams& value_params,
                                const PpoConfig& config);

// O(T^2) reference for tests: A_t = sum_k (gamma*lambda)^k delta_{t+k}.
std::vector<double> gae_direct(std::span<const double> deltas, double gamma,
                               double lambda);

}  // namespace appgym
