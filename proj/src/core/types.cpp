#include "appgym/core/types.hpp"

#include <nlohmann/json.hpp>

#include "appgym/util/digest.hpp"

namespace appgym {

std::string to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy:
      return "easy";
    case Difficulty::Medium:
      return "medium";
    case Difficulty::Hard:
      return "hard";
  }
  return "easy";
}

Difficulty difficulty_from_int(int v) {
  if (v < 1 || v > 3) throw std::invalid_argument("difficulty must be 1..3");
  return static_cast<Difficulty>(v);
}

std::string to_string(TaskType t) {
  return t == TaskType::TaskCompletion ? "task_completion"
                                       : "information_retrieval";
}

TaskType task_type_from_string(const std::string& s) {
  if (s == "task_completion") return TaskType::TaskCompletion;
  if (s == "information_retrieval") return TaskType::InformationRetrieval;
  throw std::invalid_argument("unknown task_type: " + s);
}

std::string to_string(WidgetKind k) {
  switch (k) {
    case WidgetKind::Button:
      return "button";
    case WidgetKind::TextField:
      return "text_field";
    case WidgetKind::ListItem:
      return "list_item";
    case WidgetKind::Toggle:
      return "toggle";
    case WidgetKind::Label:
      return "label";
  }
  return "label";
}

WidgetKind widget_kind_from_string(const std::string& s) {
  if (s == "button") return WidgetKind::Button;
  if (s == "text_field") return WidgetKind::TextField;
  if (s == "list_item") return WidgetKind::ListItem;
  if (s == "toggle") return WidgetKind::Toggle;
  if (s == "label") return WidgetKind::Label;
  throw std::invalid_argument("unknown widget kind: " + s);
}

std::string to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Click:
      return "click";
    case ActionKind::LongPress:
      return "long_press";
    case ActionKind::Type:
      return "type";
    case ActionKind::Scroll:
      return "scroll";
    case ActionKind::PressHome:
      return "press_home";
    case ActionKind::PressBack:
      return "press_back";
    case ActionKind::OpenApp:
      return "open_app";
    case ActionKind::Finished:
      return "finished";
    case ActionKind::Answer:
      return "answer";
  }
  return "press_home";
}

ActionKind action_kind_from_string(const std::string& s) {
  if (s == "click") return ActionKind::Click;
  if (s == "long_press") return ActionKind::LongPress;
  if (s == "type") return ActionKind::Type;
  if (s == "scroll") return ActionKind::Scroll;
  if (s == "press_home") return ActionKind::PressHome;
  if (s == "press_back") return ActionKind::PressBack;
  if (s == "open_app") return ActionKind::OpenApp;
  if (s == "finished") return ActionKind::Finished;
  if (s == "answer") return ActionKind::Answer;
  throw std::invalid_argument("unknown action kind: " + s);
}

std::string to_string(ScrollDirection d) {
  switch (d) {
    case ScrollDirection::Up:
      return "up";
    case ScrollDirection::Down:
      return "down";
    case ScrollDirection::Left:
      return "left";
    case ScrollDirection::Right:
      return "right";
  }
  return "down";
}

ScrollDirection scroll_direction_from_string(const std::string& s) {
  if (s == "up") return ScrollDirection::Up;
  if (s == "down") return ScrollDirection::Down;
  if (s == "left") return ScrollDirection::Left;
  if (s == "right") return ScrollDirection::Right;
  throw std::invalid_argument("unknown scroll direction: " + s);
}

json Context::to_json() const {
  return json{{"app_id", app_id},
              {"template_id", template_id},
              {"instance_seed", instance_seed},
              {"difficulty", static_cast<int>(difficulty)},
              {"task_type", to_string(task_type)},
              {"instruction", instruction}};
}

Context Context::from_json(const json& j) {
  Context c;
  c.app_id = j.at("app_id").get<std::string>();
  c.template_id = j.at("template_id").get<std::string>();
  c.instance_seed = j.at("instance_seed").get<uint64_t>();
  c.difficulty = difficulty_from_int(j.at("difficulty").get<int>());
  c.task_type = task_type_from_string(j.at("task_type").get<std::string>());
  c.instruction = j.at("instruction").get<std::string>();
  return c;
}

json Observation::to_json() const {
  json ws = json::array();
  for (const auto& w : widgets) {
    ws.push_back(json{{"widget_id", w.widget_id},
                      {"kind", to_string(w.kind)},
                      {"text", w.text},
                      {"bounds", json{{"x", w.bounds.x},
                                      {"y", w.bounds.y},
                                      {"w", w.bounds.w},
                                      {"h", w.bounds.h}}}});
  }
  json j{{"screen_id", screen_id}, {"widgets", ws}, {"step_index", step_index}};
  if (candidates) j["candidates"] = *candidates;
  return j;
}

Observation Observation::from_json(const json& j) {
  Observation o;
  o.screen_id = j.at("screen_id").get<std::string>();
  for (const auto& wj : j.at("widgets")) {
    Widget w;
    w.widget_id = wj.at("widget_id").get<std::string>();
    w.kind = widget_kind_from_string(wj.at("kind").get<std::string>());
    w.text = wj.at("text").get<std::string>();
    const auto& b = wj.at("bounds");
    w.bounds = Rect{b.at("x").get<int>(), b.at("y").get<int>(),
                    b.at("w").get<int>(), b.at("h").get<int>()};
    o.widgets.push_back(std::move(w));
  }
  o.step_index = j.at("step_index").get<int>();
  if (j.contains("candidates"))
    o.candidates = j.at("candidates").get<std::vector<std::string>>();
  return o;
}

json Action::to_json() const {
  json j{{"kind", to_string(kind)}};
  switch (kind) {
    case ActionKind::Click:
    case ActionKind::LongPress:
      j["x"] = x;
      j["y"] = y;
      break;
    case ActionKind::Scroll:
      j["direction"] = to_string(direction);
      break;
    case ActionKind::Type:
    case ActionKind::OpenApp:
    case ActionKind::Finished:
    case ActionKind::Answer:
      if (content) j["content"] = *content;
      if (candidate) j["candidate"] = *candidate;
      break;
    default:
      break;
  }
  return j;
}

Action Action::from_json(const json& j) {
  Action a;
  a.kind = action_kind_from_string(j.at("kind").get<std::string>());
  switch (a.kind) {
    case ActionKind::Click:
    case ActionKind::LongPress:
      a.x = j.at("x").get<int>();
      a.y = j.at("y").get<int>();
      break;
    case ActionKind::Scroll:
      a.direction =
          scroll_direction_from_string(j.at("direction").get<std::string>());
      break;
    case ActionKind::Type:
    case ActionKind::OpenApp:
    case ActionKind::Finished:
    case ActionKind::Answer:
      if (j.contains("content")) a.content = j.at("content").get<std::string>();
      if (j.contains("candidate")) a.candidate = j.at("candidate").get<int>();
      break;
    default:
      break;
  }
  return a;
}

void push_history(std::vector<HistoryEntry>& history, HistoryEntry entry,
                  int window) {
  history.push_back(std::move(entry));
  while (static_cast<int>(history.size()) > window)
    history.erase(history.begin());
}

json TrajectoryStep::to_json() const {
  return json{{"state_digest", state_digest},
              {"token_ids", token_ids},
              {"token_logprobs_behavior", token_logprobs_behavior},
              {"action", action.to_json()}};
}

TrajectoryStep TrajectoryStep::from_json(const json& j) {
  TrajectoryStep s;
  s.state_digest = j.at("state_digest").get<std::string>();
  s.token_ids = j.at("token_ids").get<std::vector<int>>();
  s.token_logprobs_behavior =
      j.at("token_logprobs_behavior").get<std::vector<double>>();
  s.action = Action::from_json(j.at("action"));
  return s;
}

json Trajectory::to_json() const {
  json steps_j = json::array();
  for (const auto& s : steps) steps_j.push_back(s.to_json());
  return json{{"context", context.to_json()},
              {"steps", steps_j},
              {"terminal_reward", terminal_reward},
              {"truncated", truncated},
              {"wall_times", wall_times}};
}

Trajectory Trajectory::from_json(const json& j) {
  Trajectory t;
  t.context = Context::from_json(j.at("context"));
  for (const auto& sj : j.at("steps"))
    t.steps.push_back(TrajectoryStep::from_json(sj));
  t.terminal_reward = j.at("terminal_reward").get<int>();
  t.truncated = j.at("truncated").get<bool>();
  t.wall_times = j.at("wall_times").get<std::vector<double>>();
  return t;
}

std::string digest_state(const AgentState& state) {
  // nlohmann objects are key-sorted, so the dump is canonical.
  json j{{"observation", state.observation.to_json()},
         {"instruction", state.instruction}};
  json hist = json::array();
  for (const auto& h : state.history)
    hist.push_back(json{{"d", h.state_digest}, {"a", h.action.to_json()}});
  j["history"] = std::move(hist);
  return digest128_hex(j.dump());
}

}  // namespace appgym
