#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "appgym/env/latency.hpp"
#include "appgym/env/suite.hpp"

namespace appgym {

struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Raised by an in-process environment when the fault model fires.
struct EnvCrash : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mutable app state driven by the screen FSM.
struct AppStore {
  std::vector<std::string> items;
  std::map<std::string, std::string> fields;
  std::map<std::string, bool> toggles;
  std::string search_query;
  std::string compose_draft;
  std::optional<std::string> focused;  // focused TextField widget_id
  int list_offset = 0;
};

struct RewardInputs {
  const AppStore& store;
  const std::string& final_screen;
  std::optional<std::string> answer;     // Answer action content, if any
  ActionKind terminal_action;            // Finished, Answer, or the cap
  const TaskGoal& goal;
  uint64_t episode_key;                  // identifies the episode for judges
};

using RewardScript = std::function<int(const RewardInputs&)>;

// The deterministic rule-based script: every skill predicate must hold and
// the terminal action must match the task type.
RewardScript rule_based_script();

// Flips the wrapped script's verdict with the given false-positive /
// false-negative rates, deterministically in (episode identity, seed).
RewardScript wrap_noisy_judge(RewardScript script, double fp_rate,
                              double fn_rate, uint64_t seed);

struct JudgeConfig {
  bool enabled = false;
  double fp_rate = 0.0;
  double fn_rate = 0.0;
  uint64_t seed = 0;
};

struct EnvConfig {
  LatencyModel latency;
  FaultModel faults;
  JudgeConfig judge;
  int t_max = 20;
  bool simulated_clock = true;  // virtual latency; real mode sleeps it off
  bool crash_as_exit = false;   // worker process exits instead of erroring

  json to_json() const;
  static EnvConfig from_json(const json& j);
};

struct StepResult {
  Observation observation;
  bool done = false;
  bool truncated = false;
  int reward = 0;       // valid when done; judged source when enabled
  int true_reward = 0;  // valid when done; always the rule-based script
  double latency_ms = 0.0;
};

// One running episode of one mini-app. Single-threaded; the latency sampled
// for each action is returned and, on a real clock, slept off before the
// result is produced.
class Episode {
 public:
  Episode(const SuiteBundle& suite, EnvConfig config);

  Observation reset(const Context& context, uint64_t episode_seed);
  StepResult step(const Action& action);

  bool active() const { return active_; }
  bool done() const { return done_; }
  int step_count() const { return step_count_; }
  const TaskGoal& goal() const { return goal_; }
  const AppStore& store() const { return store_; }
  const std::string& screen() const { return screen_; }

 private:
  Observation render() const;
  bool apply(const Action& action);  // returns true if the screen changed

  const SuiteBundle& suite_;
  EnvConfig config_;
  RewardScript script_;

  const MiniAppDef* app_ = nullptr;
  Context context_;
  TaskGoal goal_;
  AppStore store_;
  std::string screen_ = "home";
  uint64_t episode_key_ = 0;
  Rng latency_rng_{0};
  Rng fault_rng_{0};
  int step_count_ = 0;
  bool active_ = false;
  bool done_ = false;
};

}  // namespace appgym
