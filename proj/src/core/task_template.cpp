#include "appgym/core/task_template.hpp"

#include <nlohmann/json.hpp>

#include "appgym/util/rng.hpp"

namespace appgym {

json TaskTemplate::to_json() const {
  json pools = json::object();
  for (const auto& [name, values] : slot_pools) pools[name] = values;
  return json{{"template_id", template_id},
              {"body", body},
              {"slot_pools", pools},
              {"difficulty", static_cast<int>(difficulty)},
              {"task_type", to_string(task_type)},
              {"parameterizable", parameterizable}};
}

TaskTemplate TaskTemplate::from_json(const json& j) {
  TaskTemplate t;
  t.template_id = j.at("template_id").get<std::string>();
  t.body = j.at("body").get<std::string>();
  for (const auto& [name, values] : j.at("slot_pools").items())
    t.slot_pools[name] = values.get<std::vector<std::string>>();
  t.difficulty = difficulty_from_int(j.at("difficulty").get<int>());
  t.task_type = task_type_from_string(j.at("task_type").get<std::string>());
  t.parameterizable = j.at("parameterizable").get<bool>();
  return t;
}

std::vector<std::string> template_slots(const std::string& body) {
  std::vector<std::string> slots;
  for (size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '{') continue;
    size_t close = body.find('}', i + 1);
    if (close == std::string::npos) break;
    std::string name = body.substr(i + 1, close - i - 1);
    bool seen = false;
    for (const auto& s : slots) seen = seen || s == name;
    if (!seen) slots.push_back(std::move(name));
    i = close;
  }
  return slots;
}

std::string slot_value(const TaskTemplate& tmpl, const std::string& slot,
                       uint64_t seed) {
  auto it = tmpl.slot_pools.find(slot);
  if (it == tmpl.slot_pools.end() || it->second.empty())
    throw TemplateError("template " + tmpl.template_id +
                        ": no value pool for slot {" + slot + "}");
  // Each slot gets its own stream so values vary independently across slots.
  Rng rng(Rng::mix(Rng::mix(Rng::hash_str(tmpl.template_id), seed),
                   Rng::hash_str(slot)));
  return it->second[rng.below(it->second.size())];
}

std::string render_instruction(const TaskTemplate& tmpl, uint64_t seed) {
  std::string out;
  out.reserve(tmpl.body.size());
  for (size_t i = 0; i < tmpl.body.size(); ++i) {
    if (tmpl.body[i] != '{') {
      out.push_back(tmpl.body[i]);
      continue;
    }
    size_t close = tmpl.body.find('}', i + 1);
    if (close == std::string::npos) {
      out.append(tmpl.body.substr(i));
      break;
    }
    out += slot_value(tmpl, tmpl.body.substr(i + 1, close - i - 1), seed);
    i = close;
  }
  return out;
}

}  // namespace appgym
