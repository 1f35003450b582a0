#include "appgym/env/episode.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <thread>

#include <nlohmann/json.hpp>

#include "appgym/env/layout.hpp"
#include "appgym/util/digest.hpp"

namespace appgym {
namespace {

std::string normalized(std::string s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c)))
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

std::vector<std::string> filtered_items(const AppStore& store) {
  std::vector<std::string> out;
  for (const auto& item : store.items)
    if (store.search_query.empty() ||
        item.find(store.search_query) != std::string::npos)
      out.push_back(item);
  return out;
}

}  // namespace

RewardScript rule_based_script() {
  return [](const RewardInputs& in) -> int {
    const TaskGoal& goal = in.goal;
    if (goal.type == TaskType::TaskCompletion &&
        in.terminal_action != ActionKind::Finished)
      return 0;
    if (goal.type == TaskType::InformationRetrieval &&
        in.terminal_action != ActionKind::Answer)
      return 0;
    for (const auto& name : goal.create_items)
      if (std::find(in.store.items.begin(), in.store.items.end(), name) ==
          in.store.items.end())
        return 0;
    for (const auto& name : goal.delete_items)
      if (std::find(in.store.items.begin(), in.store.items.end(), name) !=
          in.store.items.end())
        return 0;
    if (goal.search_query && in.store.search_query != *goal.search_query)
      return 0;
    for (const auto& [key, value] : goal.field_targets) {
      auto it = in.store.fields.find(key);
      if (it == in.store.fields.end() || it->second != value) return 0;
    }
    for (const auto& [key, on] : goal.toggle_targets) {
      auto it = in.store.toggles.find(key);
      if (it == in.store.toggles.end() || it->second != on) return 0;
    }
    if (goal.type == TaskType::InformationRetrieval) {
      if (!in.answer || !goal.answer_truth) return 0;
      if (normalized(*in.answer) != normalized(*goal.answer_truth)) return 0;
    }
    return 1;
  };
}

RewardScript wrap_noisy_judge(RewardScript script, double fp_rate,
                              double fn_rate, uint64_t seed) {
  if (fp_rate < 0 || fp_rate > 1 || fn_rate < 0 || fn_rate > 1)
    throw std::invalid_argument("judge rates must be in [0,1]");
  return [script = std::move(script), fp_rate, fn_rate,
          seed](const RewardInputs& in) -> int {
    int verdict = script(in);
    Rng rng(Rng::mix(in.episode_key, Rng::mix(seed, 0x0fuLL)));
    if (verdict == 0 && rng.bernoulli(fp_rate)) return 1;
    if (verdict == 1 && rng.bernoulli(fn_rate)) return 0;
    return verdict;
  };
}

Episode::Episode(const SuiteBundle& suite, EnvConfig config)
    : suite_(suite), config_(std::move(config)) {
  config_.latency.validate();
  config_.faults.validate();
  script_ = rule_based_script();
  if (config_.judge.enabled)
    script_ = wrap_noisy_judge(script_, config_.judge.fp_rate,
                               config_.judge.fn_rate, config_.judge.seed);
}

Observation Episode::reset(const Context& context, uint64_t episode_seed) {
  auto app_it = suite_.apps.find(context.app_id);
  if (app_it == suite_.apps.end())
    throw SetupError("unknown app: " + context.app_id);
  if (suite_.tasks.find(context.template_id) == suite_.tasks.end())
    throw SetupError("unknown template: " + context.template_id);
  if (suite_.catalog.app_of_template(context.template_id) != context.app_id)
    throw SetupError("template " + context.template_id + " does not belong to " +
                     context.app_id);

  app_ = &app_it->second;
  context_ = context;
  goal_ = resolve_goal(suite_, context);

  // The store fixture depends only on the instance seed: delete/search
  // targets exist, create targets do not, fill targets start elsewhere, and
  // toggle targets start in the opposite position.
  store_ = AppStore{};
  const uint64_t fixture_seed =
      Rng::mix(context.instance_seed, Rng::hash_str(context.app_id));
  Rng item_rng(Rng::mix(fixture_seed, Rng::hash_str("items")));
  for (const auto& name : app_->item_pool) {
    bool is_target =
        std::find(goal_.delete_items.begin(), goal_.delete_items.end(), name) !=
            goal_.delete_items.end() ||
        (goal_.search_query && *goal_.search_query == name);
    bool is_create =
        std::find(goal_.create_items.begin(), goal_.create_items.end(), name) !=
        goal_.create_items.end();
    if (is_target || (!is_create && item_rng.bernoulli(0.6)))
      store_.items.push_back(name);
  }
  for (const auto& key : app_->field_keys) {
    Rng field_rng(Rng::mix(Rng::mix(context.instance_seed,
                                    Rng::hash_str(context.app_id)),
                           Rng::hash_str("field:" + key)));
    std::string value = app_->value_pool[field_rng.below(app_->value_pool.size())];
    for (const auto& [fkey, fvalue] : goal_.field_targets)
      if (fkey == key && fvalue == value) {
        // fixture must not pre-satisfy the goal; rotate one value over
        size_t at = 0;
        while (app_->value_pool[at] != value) ++at;
        value = app_->value_pool[(at + 1) % app_->value_pool.size()];
      }
    store_.fields[key] = value;
  }
  for (const auto& key : app_->toggle_keys) {
    Rng toggle_rng(Rng::mix(fixture_seed, Rng::hash_str("toggle:" + key)));
    bool on = toggle_rng.bernoulli(0.5);
    for (const auto& [tkey, want] : goal_.toggle_targets)
      if (tkey == key) on = !want;
    store_.toggles[key] = on;
  }

  screen_ = "home";
  step_count_ = 0;
  active_ = true;
  done_ = false;
  episode_key_ = Rng::mix(
      Rng::mix(Rng::hash_str(context.app_id + "/" + context.template_id),
               context.instance_seed),
      episode_seed);
  latency_rng_ = Rng(Rng::mix(episode_key_, Rng::hash_str("latency")));
  fault_rng_ = Rng(Rng::mix(episode_key_, Rng::hash_str("fault")));

  if (!config_.simulated_clock)
    std::this_thread::sleep_for(
        std::chrono::duration<double, std::milli>(config_.latency.reset_ms));
  return render();
}

Observation Episode::render() const {
  Observation obs;
  // Focus is part of the UI state, so it is part of the screen identity.
  obs.screen_id = store_.focused ? screen_ + "#" + *store_.focused : screen_;
  obs.step_index = step_count_;
  if (!goal_.candidates.empty()) obs.candidates = goal_.candidates;
  auto add = [&](std::string id, WidgetKind kind, std::string text, Rect r) {
    obs.widgets.push_back(Widget{std::move(id), kind, std::move(text), r});
  };

  if (screen_ == "home") {
    add("title", WidgetKind::Label, app_->app_id, cell_rect(0, 0, 4));
    add("nav_items", WidgetKind::Button, app_->noun + "s",
        cell_rect(app_->nav_col, app_->nav_row, 2));
    add("nav_form", WidgetKind::Button, "options",
        cell_rect(app_->nav_col + 4, app_->nav_row, 2));
    add("nav_settings", WidgetKind::Button, "settings",
        cell_rect(app_->nav_col + 8, app_->nav_row, 2));
  } else if (screen_ == "items") {
    add("search_box", WidgetKind::TextField, store_.search_query,
        cell_rect(1, 0, 4));
    add("btn_add", WidgetKind::Button, "add", cell_rect(app_->add_col, 0));
    const auto visible = filtered_items(store_);
    for (int i = 0; i < kVisibleListRows; ++i) {
      size_t idx = store_.list_offset + i;
      if (idx >= visible.size()) break;
      add("list_" + std::to_string(i), WidgetKind::ListItem, visible[idx],
          cell_rect(2, 2 + i, 9));
    }
  } else if (screen_ == "compose") {
    add("compose_name", WidgetKind::TextField, store_.compose_draft,
        cell_rect(3, 2, 5));
    add("btn_save", WidgetKind::Button, "save", cell_rect(app_->save_col, 4));
    add("btn_cancel", WidgetKind::Button, "cancel",
        cell_rect(app_->save_col + 2, 6));
  } else if (screen_ == "form") {
    for (size_t i = 0; i < app_->field_keys.size(); ++i) {
      const auto& key = app_->field_keys[i];
      add("label_" + key, WidgetKind::Label,
          key + ": " + store_.fields.at(key), cell_rect(1, 1 + 2 * i, 3));
      add("field_" + key, WidgetKind::TextField, store_.fields.at(key),
          cell_rect(5, 1 + 2 * i, 4));
    }
  } else if (screen_ == "settings") {
    for (size_t i = 0; i < app_->toggle_keys.size(); ++i) {
      const auto& key = app_->toggle_keys[i];
      add("toggle_" + key, WidgetKind::Toggle,
          key + (store_.toggles.at(key) ? "=on" : "=off"),
          cell_rect(3, 1 + 2 * i, 2));
    }
  }
  return obs;
}

bool Episode::apply(const Action& action) {
  const std::string before = screen_;
  auto resolve_content = [&](const Action& a) -> std::string {
    if (a.content) return *a.content;
    if (a.candidate && *a.candidate >= 0 &&
        *a.candidate < static_cast<int>(goal_.candidates.size()))
      return goal_.candidates[*a.candidate];
    return "";
  };

  switch (action.kind) {
    case ActionKind::Click:
    case ActionKind::LongPress: {
      // topmost widget containing the point wins; misses are no-ops
      const Observation obs = render();
      const Widget* hit = nullptr;
      for (const auto& w : obs.widgets)
        if (w.bounds.contains(action.x, action.y)) hit = &w;
      if (hit == nullptr) break;
      const std::string& id = hit->widget_id;
      if (action.kind == ActionKind::LongPress) {
        if (id.rfind("list_", 0) == 0) {
          size_t row = std::stoul(id.substr(5));
          const auto visible = filtered_items(store_);
          size_t idx = store_.list_offset + row;
          if (idx < visible.size()) {
            auto it = std::find(store_.items.begin(), store_.items.end(),
                                visible[idx]);
            if (it != store_.items.end()) store_.items.erase(it);
          }
        }
        break;
      }
      if (id == "nav_items") {
        screen_ = "items";
        store_.focused.reset();
      } else if (id == "nav_form") {
        screen_ = "form";
        store_.focused.reset();
      } else if (id == "nav_settings") {
        screen_ = "settings";
        store_.focused.reset();
      } else if (id == "btn_add") {
        screen_ = "compose";
        store_.compose_draft.clear();
        store_.focused = "compose_name";
      } else if (id == "search_box" || id == "compose_name" ||
                 id.rfind("field_", 0) == 0) {
        store_.focused = id;
      } else if (id == "btn_save") {
        if (!store_.compose_draft.empty() &&
            std::find(store_.items.begin(), store_.items.end(),
                      store_.compose_draft) == store_.items.end())
          store_.items.push_back(store_.compose_draft);
        store_.compose_draft.clear();
        screen_ = "items";
        store_.focused.reset();
      } else if (id == "btn_cancel") {
        store_.compose_draft.clear();
        screen_ = "items";
        store_.focused.reset();
      } else if (id.rfind("toggle_", 0) == 0) {
        const std::string key = id.substr(7);
        store_.toggles[key] = !store_.toggles[key];
      }
      break;
    }
    case ActionKind::Type: {
      if (!store_.focused) break;
      const std::string content = resolve_content(action);
      if (content.empty()) break;
      const std::string& f = *store_.focused;
      if (f == "search_box") {
        store_.search_query = content;
        store_.list_offset = 0;
      } else if (f == "compose_name") {
        store_.compose_draft = content;
      } else if (f.rfind("field_", 0) == 0) {
        store_.fields[f.substr(6)] = content;
      }
      break;
    }
    case ActionKind::Scroll: {
      if (screen_ != "items") break;
      const int total = static_cast<int>(filtered_items(store_).size());
      const int max_offset = std::max(0, total - kVisibleListRows);
      if (action.direction == ScrollDirection::Down)
        store_.list_offset = std::min(store_.list_offset + 3, max_offset);
      else if (action.direction == ScrollDirection::Up)
        store_.list_offset = std::max(store_.list_offset - 3, 0);
      break;
    }
    case ActionKind::PressHome:
      screen_ = "home";
      store_.focused.reset();
      break;
    case ActionKind::PressBack:
      if (screen_ == "compose")
        screen_ = "items";
      else
        screen_ = "home";
      store_.focused.reset();
      break;
    case ActionKind::OpenApp: {
      const std::string content = resolve_content(action);
      if (content == app_->app_id) {
        screen_ = "home";
        store_.focused.reset();
      }
      break;
    }
    case ActionKind::Finished:
    case ActionKind::Answer:
      break;  // terminal; handled by step()
  }
  return screen_ != before;
}

StepResult Episode::step(const Action& action) {
  if (!active_) throw ProtocolError("step before reset");
  if (done_) throw ProtocolError("step after episode end");

  if (config_.faults.crash_prob > 0 &&
      fault_rng_.bernoulli(config_.faults.crash_prob))
    throw EnvCrash("injected environment crash");
  double hang_ms = 0.0;
  if (config_.faults.hang_prob > 0 &&
      fault_rng_.bernoulli(config_.faults.hang_prob))
    hang_ms = config_.faults.hang_ms;

  const bool screen_changed = apply(action);
  ++step_count_;

  StepResult result;
  result.latency_ms =
      config_.latency.sample(action.kind, screen_changed, latency_rng_) +
      hang_ms;

  const bool terminal_action = action.kind == ActionKind::Finished ||
                               action.kind == ActionKind::Answer;
  if (terminal_action || step_count_ >= config_.t_max) {
    done_ = true;
    result.done = true;
    result.truncated = !terminal_action;
    std::optional<std::string> answer;
    if (action.kind == ActionKind::Answer) {
      if (action.content)
        answer = *action.content;
      else if (action.candidate && *action.candidate >= 0 &&
               *action.candidate < static_cast<int>(goal_.candidates.size()))
        answer = goal_.candidates[*action.candidate];
      else
        answer = "";
    }
    RewardInputs inputs{store_,        screen_, answer,
                        action.kind,   goal_,   episode_key_};
    result.true_reward = result.truncated ? 0 : rule_based_script()(inputs);
    result.reward = config_.judge.enabled ? script_(inputs)
                    : result.truncated    ? 0
                                          : result.true_reward;
  }
  result.observation = render();

  if (!config_.simulated_clock)
    std::this_thread::sleep_for(
        std::chrono::duration<double, std::milli>(result.latency_ms));
  return result;
}

json EnvConfig::to_json() const {
  return json{{"latency", latency.to_json()},
              {"faults", faults.to_json()},
              {"judge",
               {{"enabled", judge.enabled},
                {"fp_rate", judge.fp_rate},
                {"fn_rate", judge.fn_rate},
                {"seed", judge.seed}}},
              {"t_max", t_max},
              {"simulated_clock", simulated_clock},
              {"crash_as_exit", crash_as_exit}};
}

EnvConfig EnvConfig::from_json(const json& j) {
  EnvConfig c;
  if (j.contains("latency")) c.latency = LatencyModel::from_json(j.at("latency"));
  if (j.contains("faults")) c.faults = FaultModel::from_json(j.at("faults"));
  if (j.contains("judge")) {
    const auto& g = j.at("judge");
    c.judge.enabled = g.value("enabled", false);
    c.judge.fp_rate = g.value("fp_rate", 0.0);
    c.judge.fn_rate = g.value("fn_rate", 0.0);
    c.judge.seed = g.value("seed", uint64_t{0});
  }
  c.t_max = j.value("t_max", 20);
  c.simulated_clock = j.value("simulated_clock", true);
  c.crash_as_exit = j.value("crash_as_exit", false);
  return c;
}

json LatencyModel::to_json() const {
  json base = json::object();
  for (const auto& [k, v] : base_ms) base[to_string(k)] = v;
  return json{{"base_ms", base},
              {"reset_ms", reset_ms},
              {"jitter_frac", jitter_frac},
              {"stabilization_ms", stabilization_ms}};
}

LatencyModel LatencyModel::from_json(const json& j) {
  LatencyModel m;
  if (j.contains("base_ms"))
    for (const auto& [k, v] : j.at("base_ms").items())
      m.base_ms[action_kind_from_string(k)] = v.get<double>();
  m.reset_ms = j.value("reset_ms", m.reset_ms);
  m.jitter_frac = j.value("jitter_frac", m.jitter_frac);
  m.stabilization_ms = j.value("stabilization_ms", m.stabilization_ms);
  m.validate();
  return m;
}

json FaultModel::to_json() const {
  return json{{"crash_prob", crash_prob},
              {"hang_prob", hang_prob},
              {"hang_ms", hang_ms}};
}

FaultModel FaultModel::from_json(const json& j) {
  FaultModel f;
  f.crash_prob = j.value("crash_prob", 0.0);
  f.hang_prob = j.value("hang_prob", 0.0);
  f.hang_ms = j.value("hang_ms", 50.0);
  f.validate();
  return f;
}

}  // namespace appgym
