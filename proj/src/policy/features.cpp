#include "appgym/policy/features.hpp"

#include <array>
#include <cctype>

#include <nlohmann/json.hpp>

#include "appgym/util/rng.hpp"

namespace appgym {
namespace {

constexpr std::array<const char*, 5> kScreenKinds{"home", "items", "compose",
                                                  "form", "settings"};
constexpr int kScreenDims = kScreenKinds.size() + 1;  // + unknown
constexpr int kWidgetKinds = 5;
constexpr int kLastActionDims = kNumActionKinds + 1;  // + none

}  // namespace

json FeatureConfig::to_json() const {
  return json{{"instruction_hash_dims", instruction_hash_dims},
              {"t_max", t_max}};
}

FeatureConfig FeatureConfig::from_json(const json& j) {
  FeatureConfig c;
  c.instruction_hash_dims = j.value("instruction_hash_dims", 32);
  c.t_max = j.value("t_max", 20);
  return c;
}

FeatureExtractor::FeatureExtractor(FeatureConfig config)
    : config_(config),
      dim_(kScreenDims + kWidgetKinds + 1 + config.instruction_hash_dims + 1 +
           kLastActionDims) {}

std::vector<double> FeatureExtractor::extract(const AgentState& state) const {
  std::vector<double> f(dim_, 0.0);
  int at = 0;

  // screen one-hot; focus is appended to screen_id after '#'
  const std::string& sid = state.observation.screen_id;
  const std::string base = sid.substr(0, sid.find('#'));
  int screen_idx = static_cast<int>(kScreenKinds.size());
  for (size_t i = 0; i < kScreenKinds.size(); ++i)
    if (base == kScreenKinds[i]) screen_idx = static_cast<int>(i);
  f[at + screen_idx] = 1.0;
  at += kScreenDims;

  // widget-kind counts, order-free
  for (const auto& w : state.observation.widgets)
    f[at + static_cast<int>(w.kind)] += 1.0 / 8.0;
  at += kWidgetKinds;

  // focused-field flag
  f[at++] = sid.find('#') != std::string::npos ? 1.0 : 0.0;

  // signed feature hash of the instruction words
  const int hd = config_.instruction_hash_dims;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    uint64_t h = Rng::hash_str(word);
    int bucket = static_cast<int>(h % static_cast<uint64_t>(hd));
    double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
    f[at + bucket] += 0.25 * sign;
    word.clear();
  };
  for (char c : state.instruction) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    else
      flush();
  }
  flush();
  at += hd;

  // normalized step index
  f[at++] = static_cast<double>(state.observation.step_index) /
            static_cast<double>(config_.t_max);

  // last-action one-hot
  if (state.history.empty())
    f[at + kNumActionKinds] = 1.0;
  else
    f[at + static_cast<int>(state.history.back().action.kind)] = 1.0;
  return f;
}

}  // namespace appgym
