#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "appgym/core/task_template.hpp"
#include "appgym/core/types.hpp"

namespace appgym {

struct CatalogApp {
  std::string app_id;
  std::vector<TaskTemplate> templates;
};

struct CatalogError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TaskCatalog {
  std::vector<CatalogApp> apps;

  const CatalogApp* find_app(const std::string& app_id) const;
  const TaskTemplate* find_template(const std::string& template_id) const;
  const std::string& app_of_template(const std::string& template_id) const;

  int total_templates() const;

  // Throws CatalogError on duplicate ids or on a parameterizable flag that
  // contradicts the slot pools (parameterizable <=> some slot can vary).
  void validate() const;

  json to_json() const;
  static TaskCatalog from_json(const json& j);
};

// Builds one Context per (template, seed) with the instruction rendered.
Context make_context(const std::string& app_id, const TaskTemplate& tmpl,
                     uint64_t seed);

// A fixed catalog sized like a production mobile task suite: 20 apps, 116
// templates of which 38 cannot produce distinct instances from seeds. Used by
// tests and as a ready-made input for split generation.
TaskCatalog reference_catalog();

}  // namespace appgym
