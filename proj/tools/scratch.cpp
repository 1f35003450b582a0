#include <cstdio>
#include "appgym/env/episode.hpp"
#include "appgym/policy/policy.hpp"
#include "appgym/train/loss.hpp"
#include "appgym/train/optimizer.hpp"

using namespace appgym;

int main() {
  SuiteBundle suite = build_default_suite();
  std::printf("suite: apps=%zu templates=%d\n", suite.apps.size(),
              suite.catalog.total_templates());

  // solve every template under a few seeds
  int solved = 0, total = 0, max_len = 0;
  for (const auto& app : suite.catalog.apps) {
    for (const auto& tmpl : app.templates) {
      for (uint64_t seed : {30ull, 7ull, 123ull}) {
        Context ctx = make_context(app.app_id, tmpl, seed);
        Episode ep(suite, EnvConfig{});
        ep.reset(ctx, 99);
        auto plan = scripted_solution(suite, ctx);
        max_len = std::max(max_len, (int)plan.size());
        StepResult last;
        for (const auto& a : plan) last = ep.step(a);
        ++total;
        if (last.done && last.reward == 1) ++solved;
        else std::printf("UNSOLVED %s seed=%llu len=%zu done=%d r=%d\n",
                         tmpl.template_id.c_str(), (unsigned long long)seed,
                         plan.size(), (int)last.done, last.reward);
      }
    }
  }
  std::printf("solver: %d/%d solved, max plan len %d\n", solved, total, max_len);

  // policy smoke: sample a short episode
  std::vector<std::string> app_names;
  for (const auto& a : suite.catalog.apps) app_names.push_back(a.app_id);
  PolicyConfig pc;
  pc.vocab.app_names = app_names;
  Policy policy(pc);
  auto params = policy.init_params();
  std::printf("params: %zu\n", params.size());
  Context ctx = make_context(suite.catalog.apps[0].app_id,
                             suite.catalog.apps[0].templates[0], 30);
  Episode ep(suite, EnvConfig{});
  AgentState st{ep.reset(ctx, 1), {}, ctx.instruction};
  Rng rng(42);
  for (int i = 0; i < 20; ++i) {
    auto s = policy.sample(params, st, 1.0, rng);
    auto lp = policy.token_logprobs(params, st, s.tokens);
    double d = 0;
    for (size_t k = 0; k < lp.size(); ++k) d += std::abs(lp[k] - s.logprobs[k]);
    if (d > 1e-12) std::printf("LOGPROB MISMATCH %g\n", d);
    auto res = ep.step(s.action);
    push_history(st.history, {digest_state(st), s.action});
    st.observation = res.observation;
    if (res.done) { std::printf("episode done at %d r=%d\n", i + 1, res.reward); break; }
  }
  return 0;
}
