#include <array>
#include <string>
#include <vector>

#include "appgym/bench/catalog.hpp"

namespace appgym {
namespace {

// Per-app usable-template difficulty layout plus the number of additional
// fixed-text templates that render identically under every seed.
struct AppLayout {
  const char* app_id;
  int easy;
  int medium;
  int hard;
  int fixed_text;
};

// 20 apps, 116 templates, 78 of them seed-parameterizable across 17 apps.
constexpr std::array<AppLayout, 20> kLayout{{
    {"notes", 0, 0, 8, 3},    {"calendar", 0, 7, 1, 3},
    {"messages", 4, 2, 2, 2}, {"recipes", 3, 3, 2, 2},
    {"files", 7, 0, 0, 2},    {"contacts", 3, 3, 0, 2},
    {"music", 1, 4, 0, 2},    {"gallery", 1, 4, 0, 2},
    {"tasks", 2, 1, 1, 1},    {"fitness", 4, 0, 0, 1},
    {"expenses", 4, 0, 0, 1}, {"podcasts", 3, 0, 0, 1},
    {"alarms", 3, 0, 0, 1},   {"maps", 1, 1, 0, 1},
    {"recorder", 1, 0, 0, 1}, {"clock", 1, 0, 0, 1},
    {"weather", 1, 0, 0, 0},  {"browser", 0, 0, 0, 5},
    {"translator", 0, 0, 0, 4}, {"scanner", 0, 0, 0, 3},
}};

const std::vector<std::string> kNameBank{
    "aurora", "basil",  "cedar",  "dahlia", "ember",  "fennel",
    "garnet", "harbor", "indigo", "juniper", "kestrel", "lumen",
    "maple",  "nutmeg", "onyx",   "poppy",  "quartz", "rowan"};

const std::vector<std::string> kValueBank{
    "red",    "orange", "yellow", "green", "teal",  "blue",
    "violet", "gray",   "black",  "white", "amber", "coral"};

const std::vector<std::string> kTagBank{"urgent",   "later",  "weekly",
                                        "personal", "shared", "draft",
                                        "pinned",   "archived"};

const std::vector<std::string> kDayBank{"monday", "tuesday", "wednesday",
                                        "thursday", "friday", "saturday",
                                        "sunday"};

std::vector<std::string> rotated(const std::vector<std::string>& bank,
                                 int offset, int count) {
  std::vector<std::string> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i)
    out.push_back(bank[(offset + i) % bank.size()]);
  return out;
}

const std::vector<std::string> kFixedBodies{
    "Open the app and archive the newest entry.",
    "Clear all notifications from the status panel.",
    "Export the current view as a report.",
    "Undo the most recent change.",
    "Sort the main list alphabetically.",
};

}  // namespace

TaskCatalog reference_catalog() {
  TaskCatalog catalog;
  int serial = 0;
  for (size_t ai = 0; ai < kLayout.size(); ++ai) {
    const AppLayout& lay = kLayout[ai];
    CatalogApp app;
    app.app_id = lay.app_id;

    std::vector<Difficulty> difficulties;
    for (int i = 0; i < lay.easy; ++i) difficulties.push_back(Difficulty::Easy);
    for (int i = 0; i < lay.medium; ++i)
      difficulties.push_back(Difficulty::Medium);
    for (int i = 0; i < lay.hard; ++i) difficulties.push_back(Difficulty::Hard);

    for (size_t ti = 0; ti < difficulties.size(); ++ti) {
      TaskTemplate t;
      t.template_id = std::string(lay.app_id) + "_t" + std::to_string(ti);
      t.difficulty = difficulties[ti];
      t.parameterizable = true;
      const int off = static_cast<int>(ai * 5 + ti * 3);
      switch (serial++ % 4) {
        case 0:
          t.body = std::string("Create a new ") + lay.app_id +
                   " entry named {name} tagged {tag}.";
          t.slot_pools["name"] = rotated(kNameBank, off, 12);
          t.slot_pools["tag"] = rotated(kTagBank, off, 6);
          t.task_type = TaskType::TaskCompletion;
          break;
        case 1:
          t.body = std::string("Delete the ") + lay.app_id +
                   " entry named {name} created on {day}.";
          t.slot_pools["name"] = rotated(kNameBank, off + 1, 12);
          t.slot_pools["day"] = rotated(kDayBank, off, 5);
          t.task_type = TaskType::TaskCompletion;
          break;
        case 2:
          t.body = "Set the {field} option to {value} in " +
                   std::string(lay.app_id) + ".";
          t.slot_pools["field"] = rotated(kTagBank, off, 5);
          t.slot_pools["value"] = rotated(kValueBank, off, 9);
          t.task_type = TaskType::TaskCompletion;
          break;
        default:
          t.body = std::string("In ") + lay.app_id +
                   ", what is the {field} of the entry named {name}?";
          t.slot_pools["field"] = rotated(kTagBank, off + 2, 5);
          t.slot_pools["name"] = rotated(kNameBank, off + 2, 9);
          t.task_type = TaskType::InformationRetrieval;
          break;
      }
      app.templates.push_back(std::move(t));
    }

    for (int fi = 0; fi < lay.fixed_text; ++fi) {
      TaskTemplate t;
      t.template_id = std::string(lay.app_id) + "_f" + std::to_string(fi);
      t.body = kFixedBodies[fi % kFixedBodies.size()];
      t.difficulty = fi % 2 == 0 ? Difficulty::Easy : Difficulty::Medium;
      t.task_type = TaskType::TaskCompletion;
      t.parameterizable = false;
      app.templates.push_back(std::move(t));
    }

    catalog.apps.push_back(std::move(app));
  }
  return catalog;
}

}  // namespace appgym
