#include "appgym/bench/catalog.hpp"

#include <set>

#include <nlohmann/json.hpp>

namespace appgym {

const CatalogApp* TaskCatalog::find_app(const std::string& app_id) const {
  for (const auto& a : apps)
    if (a.app_id == app_id) return &a;
  return nullptr;
}

const TaskTemplate* TaskCatalog::find_template(
    const std::string& template_id) const {
  for (const auto& a : apps)
    for (const auto& t : a.templates)
      if (t.template_id == template_id) return &t;
  return nullptr;
}

const std::string& TaskCatalog::app_of_template(
    const std::string& template_id) const {
  for (const auto& a : apps)
    for (const auto& t : a.templates)
      if (t.template_id == template_id) return a.app_id;
  throw CatalogError("unknown template: " + template_id);
}

int TaskCatalog::total_templates() const {
  int n = 0;
  for (const auto& a : apps) n += static_cast<int>(a.templates.size());
  return n;
}

void TaskCatalog::validate() const {
  std::set<std::string> app_ids;
  std::set<std::string> template_ids;
  for (const auto& app : apps) {
    if (!app_ids.insert(app.app_id).second)
      throw CatalogError("duplicate app_id: " + app.app_id);
    for (const auto& t : app.templates) {
      if (!template_ids.insert(t.template_id).second)
        throw CatalogError("duplicate template_id: " + t.template_id);
      bool can_vary = false;
      for (const auto& slot : template_slots(t.body)) {
        auto it = t.slot_pools.find(slot);
        if (it == t.slot_pools.end() || it->second.empty())
          throw CatalogError("template " + t.template_id +
                             " has slot {" + slot + "} without a pool");
        can_vary = can_vary || it->second.size() > 1;
      }
      if (t.parameterizable != can_vary)
        throw CatalogError("template " + t.template_id +
                           ": parameterizable flag contradicts slot pools");
    }
  }
}

json TaskCatalog::to_json() const {
  json apps_j = json::array();
  for (const auto& a : apps) {
    json ts = json::array();
    for (const auto& t : a.templates) ts.push_back(t.to_json());
    apps_j.push_back(json{{"app_id", a.app_id}, {"templates", ts}});
  }
  return json{{"apps", apps_j}};
}

TaskCatalog TaskCatalog::from_json(const json& j) {
  TaskCatalog c;
  for (const auto& aj : j.at("apps")) {
    CatalogApp app;
    app.app_id = aj.at("app_id").get<std::string>();
    for (const auto& tj : aj.at("templates"))
      app.templates.push_back(TaskTemplate::from_json(tj));
    c.apps.push_back(std::move(app));
  }
  return c;
}

Context make_context(const std::string& app_id, const TaskTemplate& tmpl,
                     uint64_t seed) {
  Context c;
  c.app_id = app_id;
  c.template_id = tmpl.template_id;
  c.instance_seed = seed;
  c.difficulty = tmpl.difficulty;
  c.task_type = tmpl.task_type;
  c.instruction = render_instruction(tmpl, seed);
  return c;
}

}  // namespace appgym
