#include "appgym/env/suite.hpp"

#include <algorithm>
#include <array>

#include <nlohmann/json.hpp>

#include "appgym/env/layout.hpp"
#include "appgym/util/rng.hpp"

namespace appgym {

std::string to_string(Skill s) {
  switch (s) {
    case Skill::SearchItem:
      return "search_item";
    case Skill::CreateItem:
      return "create_item";
    case Skill::DeleteItem:
      return "delete_item";
    case Skill::ToggleSetting:
      return "toggle_setting";
    case Skill::FillForm:
      return "fill_form";
    case Skill::ReadFieldAnswer:
      return "read_field_and_answer";
  }
  return "create_item";
}

Skill skill_from_string(const std::string& s) {
  if (s == "search_item") return Skill::SearchItem;
  if (s == "create_item") return Skill::CreateItem;
  if (s == "delete_item") return Skill::DeleteItem;
  if (s == "toggle_setting") return Skill::ToggleSetting;
  if (s == "fill_form") return Skill::FillForm;
  if (s == "read_field_and_answer") return Skill::ReadFieldAnswer;
  throw std::invalid_argument("unknown skill: " + s);
}

json MiniAppDef::to_json() const {
  return json{{"app_id", app_id},         {"noun", noun},
              {"item_pool", item_pool},   {"value_pool", value_pool},
              {"field_keys", field_keys}, {"toggle_keys", toggle_keys},
              {"nav_row", nav_row},       {"nav_col", nav_col},
              {"add_col", add_col},       {"save_col", save_col}};
}

MiniAppDef MiniAppDef::from_json(const json& j) {
  MiniAppDef d;
  d.app_id = j.at("app_id").get<std::string>();
  d.noun = j.at("noun").get<std::string>();
  d.item_pool = j.at("item_pool").get<std::vector<std::string>>();
  d.value_pool = j.at("value_pool").get<std::vector<std::string>>();
  d.field_keys = j.at("field_keys").get<std::vector<std::string>>();
  d.toggle_keys = j.at("toggle_keys").get<std::vector<std::string>>();
  d.nav_row = j.at("nav_row").get<int>();
  d.nav_col = j.at("nav_col").get<int>();
  d.add_col = j.at("add_col").get<int>();
  d.save_col = j.at("save_col").get<int>();
  return d;
}

json TaskSpec::to_json() const {
  std::vector<std::string> names;
  for (Skill s : skills) names.push_back(to_string(s));
  return json{{"template_id", template_id}, {"skills", names}};
}

TaskSpec TaskSpec::from_json(const json& j) {
  TaskSpec t;
  t.template_id = j.at("template_id").get<std::string>();
  for (const auto& s : j.at("skills"))
    t.skills.push_back(skill_from_string(s.get<std::string>()));
  return t;
}

const MiniAppDef& SuiteBundle::app(const std::string& app_id) const {
  auto it = apps.find(app_id);
  if (it == apps.end())
    throw std::out_of_range("unknown app in suite: " + app_id);
  return it->second;
}

const TaskSpec& SuiteBundle::task(const std::string& template_id) const {
  auto it = tasks.find(template_id);
  if (it == tasks.end())
    throw std::out_of_range("unknown task in suite: " + template_id);
  return it->second;
}

json SuiteBundle::to_json() const {
  json apps_j = json::object();
  for (const auto& [id, def] : apps) apps_j[id] = def.to_json();
  json tasks_j = json::object();
  for (const auto& [id, spec] : tasks) tasks_j[id] = spec.to_json();
  return json{{"catalog", catalog.to_json()},
              {"apps", apps_j},
              {"tasks", tasks_j}};
}

SuiteBundle SuiteBundle::from_json(const json& j) {
  SuiteBundle s;
  s.catalog = TaskCatalog::from_json(j.at("catalog"));
  for (const auto& [id, dj] : j.at("apps").items())
    s.apps.emplace(id, MiniAppDef::from_json(dj));
  for (const auto& [id, tj] : j.at("tasks").items())
    s.tasks.emplace(id, TaskSpec::from_json(tj));
  return s;
}

namespace {

const std::array<const char*, 17> kAppNames{
    "notes",   "calendar", "messages", "recipes",  "files",  "contacts",
    "music",   "gallery",  "tasks",    "fitness",  "expenses", "podcasts",
    "alarms",  "maps",     "recorder", "clock",    "weather"};

const std::array<const char*, 17> kNouns{
    "note",    "event",  "message", "recipe", "file",   "contact",
    "playlist", "album",  "task",    "workout", "expense", "episode",
    "alarm",   "place",  "clip",    "timer",  "city"};

const std::array<const char*, 20> kItemBank{
    "aurora", "basil",  "cedar",   "dahlia", "ember",   "fennel", "garnet",
    "harbor", "indigo", "juniper", "kestrel", "lumen",  "maple",  "nutmeg",
    "onyx",   "poppy",  "quartz",  "rowan",  "saffron", "tundra"};

const std::array<const char*, 12> kValueBank{
    "red",    "orange", "yellow", "green", "teal",  "blue",
    "violet", "gray",   "black",  "white", "amber", "coral"};

const std::array<const char*, 8> kFieldBank{
    "theme", "font", "layout", "language", "backup", "region", "sort", "view"};

const std::array<const char*, 8> kToggleBank{
    "dark_mode", "notifications", "auto_sync", "location",
    "sound",     "wifi_only",     "backup",    "compact"};

template <size_t N>
std::vector<std::string> window(const std::array<const char*, N>& bank,
                                uint64_t offset, int count) {
  std::vector<std::string> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i)
    out.push_back(bank[(offset + i) % bank.size()]);
  return out;
}

struct Pattern {
  std::vector<Skill> skills;
  TaskType type;
};

const std::vector<Pattern> kPatterns{
    {{Skill::CreateItem}, TaskType::TaskCompletion},
    {{Skill::ToggleSetting}, TaskType::TaskCompletion},
    {{Skill::ReadFieldAnswer}, TaskType::InformationRetrieval},
    {{Skill::SearchItem, Skill::DeleteItem}, TaskType::TaskCompletion},
    {{Skill::FillForm, Skill::ToggleSetting}, TaskType::TaskCompletion},
    {{Skill::CreateItem, Skill::FillForm, Skill::ToggleSetting},
     TaskType::TaskCompletion},
    {{Skill::FillForm, Skill::ToggleSetting, Skill::ReadFieldAnswer},
     TaskType::InformationRetrieval},
};

std::string body_for(const Pattern& pattern, const MiniAppDef& app) {
  std::string b = "In " + app.app_id + ", ";
  std::vector<std::string> parts;
  for (Skill s : pattern.skills) {
    switch (s) {
      case Skill::CreateItem:
        parts.push_back("create a new " + app.noun + " named {item}");
        break;
      case Skill::SearchItem:
        parts.push_back("find the " + app.noun + " named {target}");
        break;
      case Skill::DeleteItem:
        parts.push_back("delete it");
        break;
      case Skill::ToggleSetting:
        parts.push_back("turn {state} the {setting} setting");
        break;
      case Skill::FillForm:
        parts.push_back("set {field} to {value}");
        break;
      case Skill::ReadFieldAnswer:
        parts.push_back("report the current {rfield} value");
        break;
    }
  }
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) b += i + 1 == parts.size() ? (parts.size() > 2 ? ", then " : " and ") : ", ";
    b += parts[i];
  }
  b += ".";
  return b;
}

void add_slot_pools(TaskTemplate& t, const Pattern& pattern,
                    const MiniAppDef& app) {
  for (Skill s : pattern.skills) {
    switch (s) {
      case Skill::CreateItem:
        t.slot_pools["item"] = app.item_pool;
        break;
      case Skill::SearchItem:
        t.slot_pools["target"] = app.item_pool;
        break;
      case Skill::DeleteItem:
        break;  // shares {target}
      case Skill::ToggleSetting:
        t.slot_pools["setting"] = app.toggle_keys;
        t.slot_pools["state"] = {"on", "off"};
        break;
      case Skill::FillForm:
        t.slot_pools["field"] = app.field_keys;
        t.slot_pools["value"] = app.value_pool;
        break;
      case Skill::ReadFieldAnswer:
        t.slot_pools["rfield"] = app.field_keys;
        break;
    }
  }
}

}  // namespace

SuiteBundle build_default_suite(const SuiteConfig& config) {
  SuiteBundle suite;
  Rng seed_rng(Rng::mix(config.suite_seed, 0xa66));
  for (int ai = 0; ai < config.n_apps; ++ai) {
    MiniAppDef def;
    def.app_id = ai < static_cast<int>(kAppNames.size())
                     ? kAppNames[ai]
                     : "app" + std::to_string(ai);
    def.noun = ai < static_cast<int>(kNouns.size()) ? kNouns[ai] : "entry";
    Rng app_rng = seed_rng.derive(Rng::hash_str(def.app_id));
    def.item_pool = window(kItemBank, app_rng.below(kItemBank.size()), 8);
    def.value_pool = window(kValueBank, app_rng.below(kValueBank.size()), 6);
    def.field_keys = window(kFieldBank, app_rng.below(kFieldBank.size()), 3);
    def.toggle_keys = window(kToggleBank, app_rng.below(kToggleBank.size()), 3);
    def.nav_row = 2 + static_cast<int>(app_rng.below(2));
    def.nav_col = 2 + static_cast<int>(app_rng.below(2));
    def.add_col = 12 + static_cast<int>(app_rng.below(3));
    def.save_col = 9 + static_cast<int>(app_rng.below(2));

    CatalogApp cat_app;
    cat_app.app_id = def.app_id;
    for (int ti = 0; ti < config.templates_per_app; ++ti) {
      const Pattern& pattern = kPatterns[ti % kPatterns.size()];
      TaskTemplate t;
      t.template_id = def.app_id + "_t" + std::to_string(ti);
      t.body = body_for(pattern, def);
      add_slot_pools(t, pattern, def);
      t.difficulty = difficulty_from_int(static_cast<int>(pattern.skills.size()));
      t.task_type = pattern.type;
      t.parameterizable = true;
      cat_app.templates.push_back(t);

      TaskSpec spec;
      spec.template_id = t.template_id;
      spec.skills = pattern.skills;
      suite.tasks.emplace(t.template_id, std::move(spec));
    }
    suite.catalog.apps.push_back(std::move(cat_app));
    suite.apps.emplace(def.app_id, std::move(def));
  }
  suite.catalog.validate();
  return suite;
}

TaskGoal resolve_goal(const SuiteBundle& suite, const Context& context) {
  const MiniAppDef& app = suite.app(context.app_id);
  const TaskSpec& spec = suite.task(context.template_id);
  const TaskTemplate* tmpl = suite.catalog.find_template(context.template_id);
  if (tmpl == nullptr)
    throw SetupError("template missing from catalog: " + context.template_id);

  TaskGoal goal;
  goal.type = tmpl->task_type;
  const uint64_t seed = context.instance_seed;
  bool wants_items = false;
  bool wants_values = false;
  for (Skill s : spec.skills) {
    switch (s) {
      case Skill::CreateItem:
        goal.create_items.push_back(slot_value(*tmpl, "item", seed));
        wants_items = true;
        break;
      case Skill::SearchItem:
        goal.search_query = slot_value(*tmpl, "target", seed);
        wants_items = true;
        break;
      case Skill::DeleteItem:
        goal.delete_items.push_back(slot_value(*tmpl, "target", seed));
        wants_items = true;
        break;
      case Skill::ToggleSetting:
        goal.toggle_targets.emplace_back(
            slot_value(*tmpl, "setting", seed),
            slot_value(*tmpl, "state", seed) == "on");
        break;
      case Skill::FillForm:
        goal.field_targets.emplace_back(slot_value(*tmpl, "field", seed),
                                        slot_value(*tmpl, "value", seed));
        wants_values = true;
        break;
      case Skill::ReadFieldAnswer:
        wants_values = true;
        break;
    }
  }
  // Answer truth: the value the read field holds at task end. Filled fields
  // report their target; untouched fields report their seeded initial value.
  for (Skill s : spec.skills) {
    if (s != Skill::ReadFieldAnswer) continue;
    std::string rfield = slot_value(*tmpl, "rfield", seed);
    std::string truth;
    bool filled = false;
    for (const auto& [f, v] : goal.field_targets)
      if (f == rfield) {
        truth = v;
        filled = true;
      }
    if (!filled) {
      // mirrors the initial-store draw in Episode::reset
      Rng field_rng(Rng::mix(Rng::mix(seed, Rng::hash_str(context.app_id)),
                             Rng::hash_str("field:" + rfield)));
      truth = app.value_pool[field_rng.below(app.value_pool.size())];
    }
    goal.answer_truth = truth;
  }

  if (wants_items)
    goal.candidates.insert(goal.candidates.end(), app.item_pool.begin(),
                           app.item_pool.end());
  if (wants_values)
    goal.candidates.insert(goal.candidates.end(), app.value_pool.begin(),
                           app.value_pool.end());
  return goal;
}

namespace {

int candidate_index(const TaskGoal& goal, const std::string& value) {
  for (size_t i = 0; i < goal.candidates.size(); ++i)
    if (goal.candidates[i] == value) return static_cast<int>(i);
  throw std::logic_error("value missing from candidates: " + value);
}

Action click_cell(int col, int row) {
  auto [x, y] = cell_center(col, row);
  Action a;
  a.kind = ActionKind::Click;
  a.x = x;
  a.y = y;
  return a;
}

Action long_press_cell(int col, int row) {
  Action a = click_cell(col, row);
  a.kind = ActionKind::LongPress;
  return a;
}

Action type_candidate(int index) {
  Action a;
  a.kind = ActionKind::Type;
  a.candidate = index;
  return a;
}

int key_index(const std::vector<std::string>& keys, const std::string& key) {
  for (size_t i = 0; i < keys.size(); ++i)
    if (keys[i] == key) return static_cast<int>(i);
  throw std::logic_error("unknown key: " + key);
}

}  // namespace

std::vector<Action> scripted_solution(const SuiteBundle& suite,
                                      const Context& context) {
  const MiniAppDef& app = suite.app(context.app_id);
  const TaskSpec& spec = suite.task(context.template_id);
  const TaskGoal goal = resolve_goal(suite, context);

  std::vector<Action> plan;
  auto home = [&] {
    Action a;
    a.kind = ActionKind::PressHome;
    plan.push_back(a);
  };

  size_t fill_cursor = 0;
  size_t toggle_cursor = 0;
  for (size_t si = 0; si < spec.skills.size(); ++si) {
    Skill s = spec.skills[si];
    switch (s) {
      case Skill::CreateItem:
        home();
        plan.push_back(click_cell(app.nav_col, app.nav_row));
        plan.push_back(click_cell(app.add_col, 0));
        plan.push_back(type_candidate(candidate_index(goal, goal.create_items.back())));
        plan.push_back(click_cell(app.save_col, 4));
        break;
      case Skill::SearchItem:
        home();
        plan.push_back(click_cell(app.nav_col, app.nav_row));
        plan.push_back(click_cell(1, 0));
        plan.push_back(type_candidate(candidate_index(goal, *goal.search_query)));
        break;
      case Skill::DeleteItem: {
        const std::string& target = goal.delete_items.back();
        bool searched = si > 0 && spec.skills[si - 1] == Skill::SearchItem &&
                        goal.search_query == target;
        if (!searched) {
          home();
          plan.push_back(click_cell(app.nav_col, app.nav_row));
          plan.push_back(click_cell(1, 0));
          plan.push_back(type_candidate(candidate_index(goal, target)));
        }
        plan.push_back(long_press_cell(2, 2));  // filtered list, first row
        break;
      }
      case Skill::ToggleSetting: {
        home();
        plan.push_back(click_cell(app.nav_col + 8, app.nav_row));
        const auto& [key, _] = goal.toggle_targets[toggle_cursor++];
        plan.push_back(click_cell(3, 1 + 2 * key_index(app.toggle_keys, key)));
        break;
      }
      case Skill::FillForm: {
        home();
        plan.push_back(click_cell(app.nav_col + 4, app.nav_row));
        const auto& [key, value] = goal.field_targets[fill_cursor++];
        plan.push_back(click_cell(5, 1 + 2 * key_index(app.field_keys, key)));
        plan.push_back(type_candidate(candidate_index(goal, value)));
        break;
      }
      case Skill::ReadFieldAnswer: {
        Action a;
        a.kind = ActionKind::Answer;
        a.candidate = candidate_index(goal, *goal.answer_truth);
        plan.push_back(a);
        break;
      }
    }
  }
  if (goal.type == TaskType::TaskCompletion) {
    Action fin;
    fin.kind = ActionKind::Finished;
    fin.candidate = 0;
    plan.push_back(fin);
  }
  return plan;
}

}  // namespace appgym
