#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "appgym/bench/catalog.hpp"
#include "appgym/core/types.hpp"

namespace appgym {

struct SetupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reusable interaction skills; a task template composes one to three of them
// and its difficulty is the number of composed skills.
enum class Skill {
  SearchItem,
  CreateItem,
  DeleteItem,
  ToggleSetting,
  FillForm,
  ReadFieldAnswer,
};

std::string to_string(Skill s);
Skill skill_from_string(const std::string& s);

// Static definition of one mini-app: its content pools and the layout
// variations that move a few widgets to different grid cells.
struct MiniAppDef {
  std::string app_id;
  std::string noun;                      // what list items are called
  std::vector<std::string> item_pool;    // 8 names
  std::vector<std::string> value_pool;   // 6 values
  std::vector<std::string> field_keys;   // form fields
  std::vector<std::string> toggle_keys;  // settings switches
  int nav_row = 2;
  int nav_col = 2;
  int add_col = 13;
  int save_col = 9;

  json to_json() const;
  static MiniAppDef from_json(const json& j);
};

struct TaskSpec {
  std::string template_id;
  std::vector<Skill> skills;

  json to_json() const;
  static TaskSpec from_json(const json& j);
};

// Everything the environment family needs: the catalog consumed by split
// generation plus the per-app and per-template mechanics behind it.
struct SuiteBundle {
  TaskCatalog catalog;
  std::map<std::string, MiniAppDef> apps;
  std::map<std::string, TaskSpec> tasks;

  const MiniAppDef& app(const std::string& app_id) const;
  const TaskSpec& task(const std::string& template_id) const;

  json to_json() const;
  static SuiteBundle from_json(const json& j);
};

struct SuiteConfig {
  int n_apps = 17;
  int templates_per_app = 7;  // 7 while apps remain, then 6
  uint64_t suite_seed = 2029;
  std::vector<Skill> skill_library{Skill::SearchItem,    Skill::CreateItem,
                                   Skill::DeleteItem,    Skill::ToggleSetting,
                                   Skill::FillForm,      Skill::ReadFieldAnswer};
};

// Generates the default environment family: each template composes 1-3
// library skills, skills recur within and across apps, difficulty equals the
// composition length.
SuiteBundle build_default_suite(const SuiteConfig& config = {});

// Concrete goal of one task instance, resolved from the template's slots
// under its instance seed.
struct TaskGoal {
  TaskType type = TaskType::TaskCompletion;
  std::vector<std::string> create_items;
  std::vector<std::string> delete_items;
  std::optional<std::string> search_query;
  std::vector<std::pair<std::string, std::string>> field_targets;
  std::vector<std::pair<std::string, bool>> toggle_targets;
  std::optional<std::string> answer_truth;
  std::vector<std::string> candidates;  // typed-content vocabulary
};

TaskGoal resolve_goal(const SuiteBundle& suite, const Context& context);

// Ground-truth action sequence solving the instance within the step cap.
std::vector<Action> scripted_solution(const SuiteBundle& suite,
                                      const Context& context);

}  // namespace appgym
