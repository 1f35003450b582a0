#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace appgym {

using json = nlohmann::json;

// Virtual screen. Mirrors a phone screen resized for model input, landscape.
inline constexpr int kScreenW = 1120;
inline constexpr int kScreenH = 504;

enum class Difficulty : int { Easy = 1, Medium = 2, Hard = 3 };

enum class TaskType { TaskCompletion, InformationRetrieval };

enum class WidgetKind { Button, TextField, ListItem, Toggle, Label };

enum class ActionKind {
  Click,
  LongPress,
  Type,
  Scroll,
  PressHome,
  PressBack,
  OpenApp,
  Finished,
  Answer,
};
inline constexpr int kNumActionKinds = 9;

enum class ScrollDirection { Up, Down, Left, Right };

std::string to_string(Difficulty d);
std::string to_string(TaskType t);
std::string to_string(WidgetKind k);
std::string to_string(ActionKind k);
std::string to_string(ScrollDirection d);
Difficulty difficulty_from_int(int v);
TaskType task_type_from_string(const std::string& s);
WidgetKind widget_kind_from_string(const std::string& s);
ActionKind action_kind_from_string(const std::string& s);
ScrollDirection scroll_direction_from_string(const std::string& s);

// One episode's identity inside the contextual MDP: which app, which task
// template, and the seed that instantiated the template's parameters.
struct Context {
  std::string app_id;
  std::string template_id;
  uint64_t instance_seed = 0;
  Difficulty difficulty = Difficulty::Easy;
  TaskType task_type = TaskType::TaskCompletion;
  std::string instruction;

  bool operator==(const Context&) const = default;

  json to_json() const;
  static Context from_json(const json& j);
};

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool contains(int px, int py) const {
    return px >= x && px < x + w && py >= y && py < y + h;
  }
  bool operator==(const Rect&) const = default;
};

struct Widget {
  std::string widget_id;
  WidgetKind kind = WidgetKind::Label;
  std::string text;
  Rect bounds;

  bool operator==(const Widget&) const = default;
};

struct Observation {
  std::string screen_id;
  std::vector<Widget> widgets;
  int step_index = 0;
  // Typed-content vocabulary for the running task (index-addressed by Type /
  // Answer / Finished actions). Absent for tasks with no content slots.
  std::optional<std::vector<std::string>> candidates;

  bool operator==(const Observation&) const = default;

  json to_json() const;
  static Observation from_json(const json& j);
};

struct Action {
  ActionKind kind = ActionKind::PressHome;
  // Click / LongPress
  int x = 0;
  int y = 0;
  // Scroll
  ScrollDirection direction = ScrollDirection::Down;
  // Type / OpenApp / Finished / Answer: either a literal string or an index
  // into the observation's candidates. content wins when both are set.
  std::optional<std::string> content;
  std::optional<int> candidate;

  bool operator==(const Action&) const = default;

  json to_json() const;
  static Action from_json(const json& j);
};

// Bounded interaction history entry: the digest of the pre-action state plus
// the action taken from it.
struct HistoryEntry {
  std::string state_digest;
  Action action;
  bool operator==(const HistoryEntry&) const = default;
};

struct AgentState {
  Observation observation;
  std::vector<HistoryEntry> history;  // append-ordered, capped at window H
  std::string instruction;

  bool operator==(const AgentState&) const = default;
};

inline constexpr int kDefaultHistoryWindow = 8;

// Appends to the bounded history window, dropping the oldest entry when full.
void push_history(std::vector<HistoryEntry>& history, HistoryEntry entry,
                  int window = kDefaultHistoryWindow);

struct TrajectoryStep {
  std::string state_digest;
  std::vector<int> token_ids;
  std::vector<double> token_logprobs_behavior;
  Action action;

  json to_json() const;
  static TrajectoryStep from_json(const json& j);
};

struct Trajectory {
  Context context;
  std::vector<TrajectoryStep> steps;
  int terminal_reward = 0;  // in {0,1}; 0 whenever truncated
  bool truncated = false;
  std::vector<double> wall_times;  // per-step environment latency, ms

  json to_json() const;
  static Trajectory from_json(const json& j);
};

// Canonical digest of an agent state, used for trajectory storage and dedup.
std::string digest_state(const AgentState& state);

struct TemplateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace appgym
