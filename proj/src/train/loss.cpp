#include "appgym/train/loss.hpp"

#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace appgym {

std::vector<double> compute_advantages(std::span<const int> rewards) {
  const size_t n = rewards.size();
  std::vector<double> adv(n, 0.0);
  if (n == 0) return adv;
  double mean = 0.0;
  for (int r : rewards) mean += r;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (int r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(n);  // population variance
  const double sigma = std::sqrt(var);
  if (sigma < kAdvantageSigmaGuard) return adv;  // all-equal group
  for (size_t i = 0; i < n; ++i) adv[i] = (rewards[i] - mean) / sigma;
  return adv;
}

namespace {

struct TrajWork {
  const RichTrajectory* traj;
  double advantage = 0.0;  // GRPO only
};

std::vector<TrajWork> flatten_batch(const GroupBatch& batch,
                                    bool with_advantages) {
  std::vector<TrajWork> work;
  for (const auto& group : batch.groups) {
    std::vector<int> rewards;
    for (const auto& t : group.trajectories)
      rewards.push_back(t.base.terminal_reward);
    std::vector<double> adv;
    if (with_advantages) adv = compute_advantages(rewards);
    for (size_t i = 0; i < group.trajectories.size(); ++i) {
      if (group.trajectories[i].status == RolloutStatus::Failed) continue;
      work.push_back(
          {&group.trajectories[i], with_advantages ? adv[i] : 0.0});
    }
  }
  return work;
}

void check_on_policy(const GroupBatch& batch, const PolicyParams& old_params) {
  if (old_params.version != batch.behavior_version)
    throw OnPolicyError("behavior version " +
                        std::to_string(batch.behavior_version) +
                        " does not match old params version " +
                        std::to_string(old_params.version));
  for (const auto& g : batch.groups)
    for (const auto& t : g.trajectories)
      if (t.status != RolloutStatus::Failed &&
          t.behavior_version != batch.behavior_version)
        throw OnPolicyError("trajectory sampled under version " +
                            std::to_string(t.behavior_version));
}

// min(r*A, clip(r)*A) and its derivative w.r.t. r.
std::pair<double, double> clipped_surrogate(double r, double adv, double eps) {
  const double clipped = std::clamp(r, 1.0 - eps, 1.0 + eps);
  const double u1 = r * adv;
  const double u2 = clipped * adv;
  if (u1 <= u2) return {u1, adv};
  const bool inside = r > 1.0 - eps && r < 1.0 + eps;
  return {u2, inside ? adv : 0.0};
}

struct TrajPartial {
  double surrogate_sum = 0.0;
  double kl_sum = 0.0;   // per-timestep token means
  double ratio_sum = 0.0;
  double kl_token_sum = 0.0;
  int64_t clipped = 0;
  int64_t timesteps = 0;
  int64_t tokens = 0;
  std::vector<double> grad;
};

}  // namespace

LossResult grpo_loss_and_grad(const Policy& policy, const GroupBatch& batch,
                              const PolicyParams& params,
                              const PolicyParams& old_params,
                              const PolicyParams& ref_params,
                              const GrpoConfig& config) {
  check_on_policy(batch, old_params);
  const auto work = flatten_batch(batch, /*with_advantages=*/true);

  int64_t total_steps = 0;
  for (const auto& w : work) total_steps += w.traj->base.steps.size();
  const double inv_t = total_steps > 0 ? 1.0 / total_steps : 0.0;

  std::vector<TrajPartial> partials(work.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) \
    num_threads(config.num_threads > 0 ? config.num_threads \
                                       : omp_get_max_threads())
#endif
  for (size_t wi = 0; wi < work.size(); ++wi) {
    const RichTrajectory& traj = *work[wi].traj;
    const double adv = work[wi].advantage;
    TrajPartial& part = partials[wi];
    part.grad.assign(params.size(), 0.0);

    for (size_t si = 0; si < traj.base.steps.size(); ++si) {
      const auto& step = traj.base.steps[si];
      const auto& rich = traj.rich[si];
      const int n_tok = static_cast<int>(step.token_ids.size());
      const auto lp_new = policy.token_logprobs(params, rich.features,
                                                rich.mask, step.token_ids);
      const auto lp_old = policy.token_logprobs(old_params, rich.features,
                                                rich.mask, step.token_ids);
      const auto lp_ref = policy.token_logprobs(ref_params, rich.features,
                                                rich.mask, step.token_ids);

      std::vector<double> weights(n_tok, 0.0);
      if (config.per_token_surrogate) {
        double s_mean = 0.0;
        bool any_clipped = false;
        double r_mean = 0.0;
        for (int j = 0; j < n_tok; ++j) {
          const double r = std::exp(lp_new[j] - lp_old[j]);
          auto [s, ds_dr] = clipped_surrogate(r, adv, config.clip_eps);
          s_mean += s / n_tok;
          r_mean += r / n_tok;
          any_clipped = any_clipped || (ds_dr == 0.0 && adv != 0.0);
          weights[j] += ds_dr * r / n_tok;
        }
        part.surrogate_sum += s_mean;
        part.ratio_sum += r_mean;
        part.clipped += any_clipped ? 1 : 0;
      } else {
        double m_new = 0.0, m_old = 0.0;
        for (int j = 0; j < n_tok; ++j) {
          m_new += lp_new[j] / n_tok;
          m_old += lp_old[j] / n_tok;
        }
        const double r = std::exp(m_new - m_old);
        auto [s, ds_dr] = clipped_surrogate(r, adv, config.clip_eps);
        part.surrogate_sum += s;
        part.ratio_sum += r;
        part.clipped += (ds_dr == 0.0 && adv != 0.0) ? 1 : 0;
        for (int j = 0; j < n_tok; ++j) weights[j] += ds_dr * r / n_tok;
      }

      double kl_mean = 0.0;
      for (int j = 0; j < n_tok; ++j) {
        const double log_rk = lp_ref[j] - lp_new[j];
        const double rk = std::exp(log_rk);
        kl_mean += (rk - log_rk - 1.0) / n_tok;
        // loss has +beta * mean_j k_j; dk/dlp_new = 1 - r_k
        weights[j] = -inv_t * weights[j] +
                     inv_t * config.kl_beta * (1.0 - rk) / n_tok;
      }
      part.kl_sum += kl_mean;
      part.kl_token_sum += kl_mean * n_tok;
      part.tokens += n_tok;
      ++part.timesteps;

      policy.token_logprobs(params, rich.features, rich.mask, step.token_ids,
                            weights.data(), &part.grad);
    }
  }

  LossResult out;
  out.grad.assign(params.size(), 0.0);
  double surrogate = 0.0, kl = 0.0, ratio_sum = 0.0;
  int64_t clipped = 0, timesteps = 0, tokens = 0;
  double kl_token_sum = 0.0;
  for (const auto& part : partials) {  // fixed order: deterministic reduction
    for (size_t i = 0; i < out.grad.size(); ++i) out.grad[i] += part.grad[i];
    surrogate += part.surrogate_sum;
    kl += part.kl_sum;
    ratio_sum += part.ratio_sum;
    kl_token_sum += part.kl_token_sum;
    clipped += part.clipped;
    timesteps += part.timesteps;
    tokens += part.tokens;
  }

  out.diag.policy_term = -inv_t * surrogate;
  out.diag.kl_term = inv_t * config.kl_beta * kl;
  out.diag.loss = out.diag.policy_term + out.diag.kl_term;
  out.diag.clip_fraction =
      timesteps > 0 ? static_cast<double>(clipped) / timesteps : 0.0;
  out.diag.mean_kl = tokens > 0 ? kl_token_sum / tokens : 0.0;
  out.diag.mean_ratio = timesteps > 0 ? ratio_sum / timesteps : 1.0;
  return out;
}

std::vector<double> gae_direct(std::span<const double> deltas, double gamma,
                               double lambda) {
  const size_t n = deltas.size();
  std::vector<double> adv(n, 0.0);
  for (size_t t = 0; t < n; ++t) {
    double w = 1.0;
    for (size_t k = t; k < n; ++k) {
      adv[t] += w * deltas[k];
      w *= gamma * lambda;
    }
  }
  return adv;
}

PpoLossResult ppo_loss_and_grad(const Policy& policy, const GroupBatch& batch,
                                const PolicyParams& params,
                                const PolicyParams& old_params,
                                const ValueParams& value_params,
                                const PpoConfig& config) {
  check_on_policy(batch, old_params);
  const auto work = flatten_batch(batch, /*with_advantages=*/false);

  int64_t total_tokens = 0;
  for (const auto& w : work)
    for (const auto& s : w.traj->base.steps) total_tokens += s.token_ids.size();
  const double inv_m = total_tokens > 0 ? 1.0 / total_tokens : 0.0;

  struct PpoPartial {
    TrajPartial base;
    std::vector<double> value_grad;
    double value_loss_sum = 0.0;
  };
  std::vector<PpoPartial> partials(work.size());

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) \
    num_threads(config.num_threads > 0 ? config.num_threads \
                                       : omp_get_max_threads())
#endif
  for (size_t wi = 0; wi < work.size(); ++wi) {
    const RichTrajectory& traj = *work[wi].traj;
    PpoPartial& part = partials[wi];
    part.base.grad.assign(params.size(), 0.0);
    part.value_grad.assign(value_params.flat.size(), 0.0);

    const size_t n_steps = traj.base.steps.size();
    std::vector<double> v_step(n_steps);
    std::vector<int> step_of_token;
    for (size_t si = 0; si < n_steps; ++si) {
      v_step[si] = value_params.value(traj.rich[si].features);
      for (size_t j = 0; j < traj.base.steps[si].token_ids.size(); ++j)
        step_of_token.push_back(static_cast<int>(si));
    }
    const size_t m = step_of_token.size();

    // token-level TD residuals; reward only on the final token, V after the
    // last token is zero (terminal)
    std::vector<double> delta(m);
    for (size_t j = 0; j < m; ++j) {
      const double v_j = v_step[step_of_token[j]];
      const double v_next = j + 1 < m ? v_step[step_of_token[j + 1]] : 0.0;
      const double r_j = j + 1 == m ? traj.base.terminal_reward : 0.0;
      delta[j] = r_j + config.gamma * v_next - v_j;
    }
    std::vector<double> adv(m, 0.0);
    double acc = 0.0;
    for (size_t j = m; j-- > 0;) {
      acc = delta[j] + config.gamma * config.lambda * acc;
      adv[j] = acc;
    }

    size_t tok_cursor = 0;
    for (size_t si = 0; si < n_steps; ++si) {
      const auto& step = traj.base.steps[si];
      const auto& rich = traj.rich[si];
      const int n_tok = static_cast<int>(step.token_ids.size());
      const auto lp_new = policy.token_logprobs(params, rich.features,
                                                rich.mask, step.token_ids);
      const auto lp_old = policy.token_logprobs(old_params, rich.features,
                                                rich.mask, step.token_ids);
      std::vector<double> weights(n_tok, 0.0);
      double v_err_sum = 0.0;
      for (int j = 0; j < n_tok; ++j) {
        const size_t tj = tok_cursor + j;
        const double r = std::exp(lp_new[j] - lp_old[j]);
        auto [s, ds_dr] = clipped_surrogate(r, adv[tj], config.clip_eps);
        part.base.surrogate_sum += s;
        part.base.ratio_sum += r;
        part.base.clipped += (ds_dr == 0.0 && adv[tj] != 0.0) ? 1 : 0;
        weights[j] = -inv_m * ds_dr * r;

        const double ret = adv[tj] + v_step[si];
        const double v_err = v_step[si] - ret;
        part.value_loss_sum += v_err * v_err;
        v_err_sum += v_err;
        ++part.base.tokens;
      }
      // d/dw of value_coef * (1/M) * sum (v - ret)^2
      const double v_coef = config.value_coef * inv_m * 2.0 * v_err_sum;
      for (size_t k = 0; k < rich.features.size(); ++k)
        part.value_grad[k] += v_coef * rich.features[k];
      part.value_grad.back() += v_coef;

      policy.token_logprobs(params, rich.features, rich.mask, step.token_ids,
                            weights.data(), &part.base.grad);
      tok_cursor += n_tok;
      ++part.base.timesteps;
    }
  }

  PpoLossResult out;
  out.policy_grad.assign(params.size(), 0.0);
  out.value_grad.assign(value_params.flat.size(), 0.0);
  double surrogate = 0.0, value_loss = 0.0, ratio_sum = 0.0;
  int64_t clipped = 0, tokens = 0;
  for (const auto& part : partials) {
    for (size_t i = 0; i < out.policy_grad.size(); ++i)
      out.policy_grad[i] += part.base.grad[i];
    for (size_t i = 0; i < out.value_grad.size(); ++i)
      out.value_grad[i] += part.value_grad[i];
    surrogate += part.base.surrogate_sum;
    value_loss += part.value_loss_sum;
    ratio_sum += part.base.ratio_sum;
    clipped += part.base.clipped;
    tokens += part.base.tokens;
  }
  out.diag.policy_term = -inv_m * surrogate;
  out.diag.value_loss = config.value_coef * inv_m * value_loss;
  out.diag.loss = out.diag.policy_term + out.diag.value_loss;
  out.diag.clip_fraction =
      tokens > 0 ? static_cast<double>(clipped) / tokens : 0.0;
  out.diag.mean_ratio = tokens > 0 ? ratio_sum / tokens : 1.0;
  return out;
}

}  // namespace appgym
