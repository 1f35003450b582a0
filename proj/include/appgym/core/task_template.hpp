#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "appgym/core/types.hpp"

namespace appgym {

// A parameterized task description. Slots appear in the body as {name} and
// draw from the declared value pools; instantiating with a seed yields a
// concrete task instance.
struct TaskTemplate {
  std::string template_id;
  std::string body;
  std::map<std::string, std::vector<std::string>> slot_pools;
  Difficulty difficulty = Difficulty::Easy;
  TaskType task_type = TaskType::TaskCompletion;
  bool parameterizable = false;

  json to_json() const;
  static TaskTemplate from_json(const json& j);
};

// Slot names in order of first appearance in the body.
std::vector<std::string> template_slots(const std::string& body);

// Deterministic value for one slot under one seed.
std::string slot_value(const TaskTemplate& tmpl, const std::string& slot,
                       uint64_t seed);

// Renders the template body with all slots substituted. Pure in
// (template_id, seed). Throws TemplateError for slots without a pool.
std::string render_instruction(const TaskTemplate& tmpl, uint64_t seed);

}  // namespace appgym
