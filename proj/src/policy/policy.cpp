#include "appgym/policy/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace appgym {

json PolicyConfig::to_json() const {
  return json{{"hidden", hidden},
              {"init_seed", init_seed},
              {"vocab", vocab.to_json()},
              {"features", features.to_json()}};
}

PolicyConfig PolicyConfig::from_json(const json& j) {
  PolicyConfig c;
  c.hidden = j.value("hidden", 64);
  c.init_seed = j.value("init_seed", uint64_t{1});
  if (j.contains("vocab")) c.vocab = VocabConfig::from_json(j.at("vocab"));
  if (j.contains("features"))
    c.features = FeatureConfig::from_json(j.at("features"));
  return c;
}

json PolicyParams::to_json() const {
  return json{{"flat", flat},
              {"n_features", n_features},
              {"hidden", hidden},
              {"vocab", vocab},
              {"version", version}};
}

PolicyParams PolicyParams::from_json(const json& j) {
  PolicyParams p;
  p.flat = j.at("flat").get<std::vector<double>>();
  p.n_features = j.at("n_features").get<int>();
  p.hidden = j.at("hidden").get<int>();
  p.vocab = j.at("vocab").get<int>();
  p.version = j.at("version").get<int64_t>();
  return p;
}

Policy::Policy(PolicyConfig config)
    : config_(std::move(config)),
      vocab_(config_.vocab),
      features_(config_.features) {}

PolicyParams Policy::init_params() const {
  PolicyParams p;
  p.n_features = features_.dim();
  p.hidden = config_.hidden;
  p.vocab = vocab_.size();
  p.version = 0;
  const size_t total = static_cast<size_t>(p.hidden) * p.n_features + p.hidden +
                       kMaxTokenPositions *
                           (static_cast<size_t>(p.vocab) * p.hidden + p.vocab);
  p.flat.assign(total, 0.0);
  Rng rng(Rng::mix(config_.init_seed, 0x1b17));
  const double scale = 1.0 / std::sqrt(static_cast<double>(p.n_features));
  for (int j = 0; j < p.hidden; ++j)
    for (int k = 0; k < p.n_features; ++k)
      p.flat[p.w1_at(j, k)] = rng.uniform(-scale, scale);
  return p;
}

MaskContext Policy::mask_context(const Observation& obs) const {
  MaskContext ctx;
  if (obs.candidates)
    ctx.n_candidates = std::min<int>(
        static_cast<int>(obs.candidates->size()), config_.vocab.max_candidates);
  return ctx;
}

namespace {

void forward_hidden(const PolicyParams& p, std::span<const double> x,
                    std::vector<double>& h) {
  h.assign(p.hidden, 0.0);
  for (int j = 0; j < p.hidden; ++j) {
    double z = p.flat[p.b1_at(j)];
    const double* row = &p.flat[p.w1_at(j, 0)];
    for (int k = 0; k < p.n_features; ++k) z += row[k] * x[k];
    h[j] = std::tanh(z);
  }
}

void head_logits(const PolicyParams& p, int pos, const std::vector<double>& h,
                 std::vector<double>& logits) {
  logits.assign(p.vocab, 0.0);
  for (int t = 0; t < p.vocab; ++t) {
    double z = p.flat[p.bout_at(pos, t)];
    const double* row = &p.flat[p.wout_at(pos, t, 0)];
    for (int j = 0; j < p.hidden; ++j) z += row[j] * h[j];
    logits[t] = z;
  }
}

// log-softmax over the allowed subset at the given temperature; returns the
// log-sum-exp baseline so probabilities can be recovered.
double masked_lse(const std::vector<double>& logits,
                  const std::vector<bool>& allowed, double temperature) {
  double mx = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < logits.size(); ++i)
    if (allowed[i]) mx = std::max(mx, logits[i] / temperature);
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i)
    if (allowed[i]) sum += std::exp(logits[i] / temperature - mx);
  return mx + std::log(sum);
}

}  // namespace

Policy::Sampled Policy::decode_sampled(const PolicyParams& params,
                                       std::span<const double> feats,
                                       const MaskContext& ctx,
                                       double temperature, Rng* rng) const {
  std::vector<double> h;
  forward_hidden(params, feats, h);

  Sampled out;
  std::vector<double> logits;
  std::vector<bool> allowed;
  ActionKind kind = ActionKind::PressHome;
  int n_positions = 1;
  for (int pos = 0; pos < n_positions; ++pos) {
    head_logits(params, pos, h, logits);
    vocab_.mask(pos, kind, ctx, allowed);
    const double lse = masked_lse(logits, allowed, temperature);
    int chosen = -1;
    if (rng == nullptr) {
      double best = -std::numeric_limits<double>::infinity();
      for (int t = 0; t < params.vocab; ++t)
        if (allowed[t] && logits[t] > best) {
          best = logits[t];
          chosen = t;
        }
    } else {
      const double u = rng->uniform();
      double acc = 0.0;
      for (int t = 0; t < params.vocab; ++t) {
        if (!allowed[t]) continue;
        acc += std::exp(logits[t] / temperature - lse);
        if (u < acc) {
          chosen = t;
          break;
        }
      }
      if (chosen < 0)  // numeric tail; take the last allowed token
        for (int t = params.vocab - 1; t >= 0; --t)
          if (allowed[t]) {
            chosen = t;
            break;
          }
    }
    out.tokens.push_back(chosen);
    out.logprobs.push_back(logits[chosen] / temperature - lse);
    if (pos == 0) {
      kind = static_cast<ActionKind>(chosen);
      n_positions = vocab_.positions_for(kind);
    }
  }
  out.action = vocab_.decode(out.tokens);
  return out;
}

Policy::Sampled Policy::sample(const PolicyParams& params,
                               const AgentState& state, double temperature,
                               Rng& rng) const {
  if (temperature <= 0) throw std::invalid_argument("temperature must be > 0");
  const auto feats = features_.extract(state);
  return decode_sampled(params, feats, mask_context(state.observation),
                        temperature, &rng);
}

Policy::Sampled Policy::greedy(const PolicyParams& params,
                               const AgentState& state) const {
  const auto feats = features_.extract(state);
  return decode_sampled(params, feats, mask_context(state.observation), 1.0,
                        nullptr);
}

std::vector<double> Policy::token_logprobs(const PolicyParams& params,
                                           std::span<const double> feats,
                                           const MaskContext& ctx,
                                           std::span<const int> tokens,
                                           const double* weights,
                                           std::vector<double>* grad) const {
  std::vector<double> h;
  forward_hidden(params, feats, h);

  std::vector<double> out;
  std::vector<double> logits;
  std::vector<bool> allowed;
  std::vector<double> dh(params.hidden, 0.0);
  const bool want_grad = weights != nullptr && grad != nullptr;
  if (want_grad && grad->size() != params.size())
    grad->assign(params.size(), 0.0);

  ActionKind kind = static_cast<ActionKind>(tokens[0]);
  const int n_positions = vocab_.positions_for(kind);
  if (static_cast<int>(tokens.size()) != n_positions)
    throw MaskError("token sequence length mismatch for kind " +
                    to_string(kind));

  for (int pos = 0; pos < n_positions; ++pos) {
    const int token = tokens[pos];
    if (token < 0 || token >= params.vocab)
      throw MaskError("token id out of range");
    head_logits(params, pos, h, logits);
    vocab_.mask(pos, kind, ctx, allowed);
    if (!allowed[token])
      throw MaskError("token " + std::to_string(token) +
                      " is masked at position " + std::to_string(pos));
    const double lse = masked_lse(logits, allowed, 1.0);
    out.push_back(logits[token] - lse);

    if (want_grad) {
      const double w = weights[pos];
      if (w != 0.0) {
        for (int t = 0; t < params.vocab; ++t) {
          if (!allowed[t]) continue;
          const double p_t = std::exp(logits[t] - lse);
          const double dlogit = w * ((t == token ? 1.0 : 0.0) - p_t);
          if (dlogit == 0.0) continue;
          double* wrow = &(*grad)[params.wout_at(pos, t, 0)];
          const double* prow = &params.flat[params.wout_at(pos, t, 0)];
          for (int j = 0; j < params.hidden; ++j) {
            wrow[j] += dlogit * h[j];
            dh[j] += dlogit * prow[j];
          }
          (*grad)[params.bout_at(pos, t)] += dlogit;
        }
      }
    }
  }

  if (want_grad) {
    for (int j = 0; j < params.hidden; ++j) {
      const double dz = dh[j] * (1.0 - h[j] * h[j]);
      if (dz == 0.0) continue;
      double* wrow = &(*grad)[params.w1_at(j, 0)];
      for (int k = 0; k < params.n_features; ++k) wrow[k] += dz * feats[k];
      (*grad)[params.b1_at(j)] += dz;
    }
  }
  return out;
}

std::vector<double> Policy::token_logprobs(const PolicyParams& params,
                                           const AgentState& state,
                                           std::span<const int> tokens) const {
  const auto feats = features_.extract(state);
  return token_logprobs(params, feats, mask_context(state.observation), tokens);
}

std::vector<double> Policy::kl_tokens(const PolicyParams& params,
                                      const PolicyParams& ref,
                                      std::span<const double> feats,
                                      const MaskContext& ctx,
                                      std::span<const int> tokens) const {
  const auto lp = token_logprobs(params, feats, ctx, tokens);
  const auto lr = token_logprobs(ref, feats, ctx, tokens);
  std::vector<double> out(lp.size());
  for (size_t i = 0; i < lp.size(); ++i) {
    const double log_r = lr[i] - lp[i];
    out[i] = std::exp(log_r) - log_r - 1.0;
  }
  return out;
}

}  // namespace appgym
