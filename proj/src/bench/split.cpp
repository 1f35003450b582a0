#include "appgym/bench/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "appgym/util/rng.hpp"

namespace appgym {
namespace {

struct UsableApp {
  std::string app_id;
  std::vector<const TaskTemplate*> templates;  // parameterizable only
};

std::vector<UsableApp> usable_apps(const TaskCatalog& catalog) {
  std::vector<UsableApp> out;
  for (const auto& app : catalog.apps) {
    UsableApp u{app.app_id, {}};
    for (const auto& t : app.templates)
      if (t.parameterizable) u.templates.push_back(&t);
    if (!u.templates.empty()) out.push_back(std::move(u));
  }
  return out;
}

void check_seed_lists(const SplitOptions& opts) {
  std::set<uint64_t> eval(opts.eval_seeds.begin(), opts.eval_seeds.end());
  for (uint64_t s : opts.train_seeds)
    if (eval.count(s))
      throw SeedError("seed " + std::to_string(s) +
                      " appears in both eval and train lists");
  if (opts.eval_seeds.empty() || opts.train_seeds.empty())
    throw SeedError("seed lists must be non-empty");
}

using TemplateRef = std::pair<std::string, const TaskTemplate*>;  // app, tmpl

double mean_difficulty(const std::vector<TemplateRef>& templates) {
  if (templates.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [app, t] : templates)
    sum += static_cast<double>(t->difficulty);
  return sum / static_cast<double>(templates.size());
}

SideStats side_stats(const std::vector<Context>& instances,
                     const std::vector<TemplateRef>& templates) {
  SideStats s;
  s.instances = static_cast<int>(instances.size());
  s.templates = static_cast<int>(templates.size());
  std::set<std::string> apps;
  for (const auto& [app, t] : templates) apps.insert(app);
  s.apps = static_cast<int>(apps.size());
  s.mean_difficulty = mean_difficulty(templates);
  return s;
}

// Test instances are kept verbatim (one per template x eval seed); train
// instances are deduped by rendered instruction, both within the train side
// and against the test side.
void generate_instances(SplitSpec& spec,
                        const std::vector<TemplateRef>& train_templates,
                        const std::vector<TemplateRef>& test_templates,
                        const SplitOptions& opts) {
  std::set<std::string> seen;
  for (const auto& [app, tmpl] : test_templates) {
    for (uint64_t seed : opts.eval_seeds) {
      Context c = make_context(app, *tmpl, seed);
      seen.insert(c.instruction);
      spec.test.push_back(std::move(c));
    }
  }
  int pre_dedup = 0;
  for (const auto& [app, tmpl] : train_templates) {
    for (uint64_t seed : opts.train_seeds) {
      Context c = make_context(app, *tmpl, seed);
      ++pre_dedup;
      if (seen.insert(c.instruction).second) spec.train.push_back(std::move(c));
    }
  }
  spec.eval_seeds = opts.eval_seeds;
  spec.train_seeds = opts.train_seeds;
  spec.report.pre_dedup_train_instances = pre_dedup;
  spec.report.train = side_stats(spec.train, train_templates);
  spec.report.test = side_stats(spec.test, test_templates);
}

// Difficulty-level counts (easy, medium, hard).
using DiffCounts = std::array<int, 3>;

DiffCounts count_difficulties(const std::vector<const TaskTemplate*>& ts) {
  DiffCounts c{0, 0, 0};
  for (const auto* t : ts) c[static_cast<int>(t->difficulty) - 1]++;
  return c;
}

double proportion_distance(const DiffCounts& a, const DiffCounts& b) {
  int na = a[0] + a[1] + a[2];
  int nb = b[0] + b[1] + b[2];
  if (na == 0 || nb == 0) return 2.0;
  double d = 0.0;
  for (int i = 0; i < 3; ++i)
    d += std::abs(static_cast<double>(a[i]) / na -
                  static_cast<double>(b[i]) / nb);
  return d;
}

double mean_of(const DiffCounts& c) {
  int n = c[0] + c[1] + c[2];
  if (n == 0) return 0.0;
  return (c[0] + 2.0 * c[1] + 3.0 * c[2]) / n;
}

}  // namespace

std::string to_string(SplitRegime r) {
  switch (r) {
    case SplitRegime::UnseenInstance:
      return "unseen_instance";
    case SplitRegime::UnseenTemplate:
      return "unseen_template";
    case SplitRegime::UnseenApp:
      return "unseen_app";
  }
  return "unseen_instance";
}

SplitRegime split_regime_from_string(const std::string& s) {
  if (s == "unseen_instance" || s == "unseen-instance")
    return SplitRegime::UnseenInstance;
  if (s == "unseen_template" || s == "unseen-template")
    return SplitRegime::UnseenTemplate;
  if (s == "unseen_app" || s == "unseen-app") return SplitRegime::UnseenApp;
  throw std::invalid_argument("unknown split regime: " + s);
}

SplitSpec split_unseen_instance(const TaskCatalog& catalog,
                                const SplitOptions& opts) {
  check_seed_lists(opts);
  std::vector<TemplateRef> usable;
  for (const auto& app : usable_apps(catalog))
    for (const auto* t : app.templates) usable.emplace_back(app.app_id, t);
  if (usable.empty())
    throw CatalogError("no parameterizable templates in catalog");

  SplitSpec spec;
  spec.regime = SplitRegime::UnseenInstance;
  generate_instances(spec, usable, usable, opts);
  return spec;
}

SplitSpec split_unseen_template(const TaskCatalog& catalog,
                                const SplitOptions& opts) {
  check_seed_lists(opts);
  SplitSpec spec;
  spec.regime = SplitRegime::UnseenTemplate;

  struct AppChoice {
    const UsableApp* app;
    int test_count;
    // Each candidate is a guard-satisfying test subset (template indices)
    // with its difficulty sum.
    std::vector<std::pair<std::vector<int>, int>> candidates;
  };

  const std::vector<UsableApp> apps = usable_apps(catalog);
  std::vector<AppChoice> choices;
  for (const auto& app : apps) {
    const int n = static_cast<int>(app.templates.size());
    if (n < 2) {
      spec.report.excluded_apps.push_back(app.app_id + " (single template)");
      continue;
    }
    AppChoice choice;
    choice.app = &app;
    choice.test_count = std::max(
        1, static_cast<int>(n / (opts.ratio + 1.0)));
    // Enumerate all test subsets of the required size, lexicographically.
    std::vector<int> idx(choice.test_count);
    for (int i = 0; i < choice.test_count; ++i) idx[i] = i;
    while (true) {
      std::vector<bool> in_test(n, false);
      for (int i : idx) in_test[i] = true;
      bool guard_ok = true;
      for (int i : idx) {
        const auto di = app.templates[i]->difficulty;
        if (di == Difficulty::Easy) continue;
        bool retained = false;
        for (int j = 0; j < n && !retained; ++j)
          retained = !in_test[j] && app.templates[j]->difficulty <= di;
        guard_ok = guard_ok && retained;
      }
      if (guard_ok) {
        int sum = 0;
        for (int i : idx) sum += static_cast<int>(app.templates[i]->difficulty);
        choice.candidates.emplace_back(idx, sum);
      }
      // next combination
      int k = choice.test_count - 1;
      while (k >= 0 && idx[k] == n - choice.test_count + k) --k;
      if (k < 0) break;
      ++idx[k];
      for (int j = k + 1; j < choice.test_count; ++j) idx[j] = idx[j - 1] + 1;
    }
    if (choice.candidates.empty()) {
      spec.report.excluded_apps.push_back(app.app_id +
                                          " (no guard-satisfying assignment)");
      continue;
    }
    choices.push_back(std::move(choice));
  }
  if (choices.empty())
    throw CatalogError("no app with at least two parameterizable templates");

  // Totals, then pick the achievable test-difficulty sum that best balances
  // the two sides' mean difficulties.
  int total_templates = 0;
  int total_sum = 0;
  int total_test = 0;
  for (const auto& c : choices) {
    total_test += c.test_count;
    for (const auto* t : c.app->templates) {
      ++total_templates;
      total_sum += static_cast<int>(t->difficulty);
    }
  }
  const int max_sum = 3 * total_test;
  // dp[i][s]: candidate index used at app i to reach partial sum s, or -1.
  std::vector<std::vector<int>> parent(choices.size(),
                                       std::vector<int>(max_sum + 1, -1));
  std::vector<bool> reachable(max_sum + 1, false);
  reachable[0] = true;
  for (size_t i = 0; i < choices.size(); ++i) {
    std::vector<bool> next(max_sum + 1, false);
    for (int s = 0; s <= max_sum; ++s) {
      if (!reachable[s]) continue;
      for (size_t ci = 0; ci < choices[i].candidates.size(); ++ci) {
        int ns = s + choices[i].candidates[ci].second;
        if (ns <= max_sum && !next[ns]) {
          next[ns] = true;
          parent[i][ns] = static_cast<int>(ci);
        }
      }
    }
    reachable = std::move(next);
  }

  const int train_count = total_templates - total_test;
  int best_sum = -1;
  double best_gap = 0.0;
  for (int s = 0; s <= max_sum; ++s) {
    if (!reachable[s]) continue;
    double gap = std::abs(static_cast<double>(s) / total_test -
                          static_cast<double>(total_sum - s) / train_count);
    if (best_sum < 0 || gap < best_gap - 1e-12) {
      best_sum = s;
      best_gap = gap;
    }
  }

  // Backtrack the chosen assignment.
  std::vector<int> chosen(choices.size());
  {
    int s = best_sum;
    for (int i = static_cast<int>(choices.size()) - 1; i >= 0; --i) {
      int ci = parent[i][s];
      chosen[i] = ci;
      s -= choices[i].candidates[ci].second;
    }
  }

  std::vector<TemplateRef> train_templates;
  std::vector<TemplateRef> test_templates;
  for (size_t i = 0; i < choices.size(); ++i) {
    const auto& app = *choices[i].app;
    const auto& idx = choices[i].candidates[chosen[i]].first;
    std::vector<bool> in_test(app.templates.size(), false);
    for (int k : idx) in_test[k] = true;
    for (size_t t = 0; t < app.templates.size(); ++t)
      (in_test[t] ? test_templates : train_templates)
          .emplace_back(app.app_id, app.templates[t]);
  }

  generate_instances(spec, train_templates, test_templates, opts);
  return spec;
}

SplitSpec split_unseen_app(const TaskCatalog& catalog,
                           const SplitOptions& opts) {
  check_seed_lists(opts);
  const std::vector<UsableApp> stable = usable_apps(catalog);
  const int n = static_cast<int>(stable.size());
  if (n < 2)
    throw CatalogError("unseen-app split needs at least two usable apps");

  const int k_test = std::clamp(
      static_cast<int>(std::ceil(n / (opts.ratio + 1.0))), 1, n - 1);

  std::vector<DiffCounts> per_app(n);
  DiffCounts total{0, 0, 0};
  for (int i = 0; i < n; ++i) {
    per_app[i] = count_difficulties(stable[i].templates);
    for (int d = 0; d < 3; ++d) total[d] += per_app[i][d];
  }

  auto score = [&](const std::vector<int>& subset) {
    DiffCounts te{0, 0, 0};
    for (int i : subset)
      for (int d = 0; d < 3; ++d) te[d] += per_app[i][d];
    DiffCounts tr{total[0] - te[0], total[1] - te[1], total[2] - te[2]};
    return std::make_pair(proportion_distance(te, tr),
                          std::abs(mean_of(te) - mean_of(tr)));
  };

  std::vector<int> best;
  std::pair<double, double> best_score{1e9, 1e9};
  auto consider = [&](const std::vector<int>& subset) {
    auto s = score(subset);
    if (s.first < best_score.first - 1e-12 ||
        (std::abs(s.first - best_score.first) <= 1e-12 &&
         s.second < best_score.second - 1e-12)) {
      best_score = s;
      best = subset;
    }
  };

  if (n <= 20) {
    std::vector<int> idx(k_test);
    for (int i = 0; i < k_test; ++i) idx[i] = i;
    while (true) {
      consider(idx);
      int k = k_test - 1;
      while (k >= 0 && idx[k] == n - k_test + k) --k;
      if (k < 0) break;
      ++idx[k];
      for (int j = k + 1; j < k_test; ++j) idx[j] = idx[j - 1] + 1;
    }
  } else {
    Rng rng(Rng::mix(opts.search_seed, 0x5eedu));
    for (int restart = 0; restart < 32; ++restart) {
      std::vector<int> pool(n);
      for (int i = 0; i < n; ++i) pool[i] = i;
      // seeded partial shuffle
      for (int i = 0; i < k_test; ++i) {
        int j = i + static_cast<int>(rng.below(n - i));
        std::swap(pool[i], pool[j]);
      }
      std::vector<int> cur(pool.begin(), pool.begin() + k_test);
      std::sort(cur.begin(), cur.end());
      bool improved = true;
      while (improved) {
        improved = false;
        auto cur_score = score(cur);
        for (int a = 0; a < k_test && !improved; ++a) {
          for (int b = 0; b < n && !improved; ++b) {
            if (std::find(cur.begin(), cur.end(), b) != cur.end()) continue;
            std::vector<int> cand = cur;
            cand[a] = b;
            std::sort(cand.begin(), cand.end());
            if (score(cand) < cur_score) {
              cur = cand;
              improved = true;
            }
          }
        }
      }
      consider(cur);
    }
  }

  SplitSpec spec;
  spec.regime = SplitRegime::UnseenApp;
  spec.report.balance_warning = best_score.second > opts.tolerance;

  std::vector<bool> in_test(n, false);
  for (int i : best) in_test[i] = true;
  std::vector<TemplateRef> train_templates;
  std::vector<TemplateRef> test_templates;
  for (int i = 0; i < n; ++i)
    for (const auto* t : stable[i].templates)
      (in_test[i] ? test_templates : train_templates)
          .emplace_back(stable[i].app_id, t);

  generate_instances(spec, train_templates, test_templates, opts);
  return spec;
}

SplitSpec make_split(const TaskCatalog& catalog, SplitRegime regime,
                     const SplitOptions& opts) {
  switch (regime) {
    case SplitRegime::UnseenInstance:
      return split_unseen_instance(catalog, opts);
    case SplitRegime::UnseenTemplate:
      return split_unseen_template(catalog, opts);
    case SplitRegime::UnseenApp:
      return split_unseen_app(catalog, opts);
  }
  throw std::invalid_argument("bad regime");
}

std::vector<Context> make_adaptation_set(const TaskCatalog& catalog,
                                         const SplitSpec& split, int k_per_app,
                                         const std::vector<uint64_t>& seeds) {
  if (split.regime != SplitRegime::UnseenApp)
    throw AdaptationSetError("adaptation sets require an unseen-app split");
  std::set<uint64_t> used(split.eval_seeds.begin(), split.eval_seeds.end());
  used.insert(split.train_seeds.begin(), split.train_seeds.end());
  for (uint64_t s : seeds)
    if (used.count(s))
      throw SeedError("adaptation seed " + std::to_string(s) +
                      " overlaps the split's seed lists");

  // Test templates per app, in catalog order.
  std::map<std::string, std::vector<std::string>> app_templates;
  std::set<std::string> seen_templates;
  std::set<std::string> test_instructions;
  for (const auto& c : split.test) {
    if (seen_templates.insert(c.template_id).second)
      app_templates[c.app_id].push_back(c.template_id);
    test_instructions.insert(c.instruction);
  }

  std::vector<Context> out;
  std::set<std::string> collected_instructions;
  for (const auto& [app_id, template_ids] : app_templates) {
    const int n = static_cast<int>(template_ids.size());
    const int base = k_per_app / n;
    const int extra = k_per_app % n;
    for (int ti = 0; ti < n; ++ti) {
      const int want = base + (ti < extra ? 1 : 0);
      const TaskTemplate* tmpl = catalog.find_template(template_ids[ti]);
      if (tmpl == nullptr)
        throw AdaptationSetError("split references unknown template " +
                                 template_ids[ti]);
      int got = 0;
      for (uint64_t seed : seeds) {
        if (got == want) break;
        Context c = make_context(app_id, *tmpl, seed);
        if (test_instructions.count(c.instruction)) continue;
        if (!collected_instructions.insert(c.instruction).second) continue;
        out.push_back(std::move(c));
        ++got;
      }
      if (got != want)
        throw AdaptationSetError(
            "app " + app_id + ": only " + std::to_string(got) + " of " +
            std::to_string(want) + " distinct instances for template " +
            template_ids[ti]);
    }
  }
  return out;
}

VerifyReport verify_split(const SplitSpec& split, double tolerance) {
  VerifyReport report;
  auto violate = [&](std::string msg) {
    report.violations.push_back(std::move(msg));
  };

  std::map<std::string, const Context*> test_by_instruction;
  for (const auto& c : split.test) test_by_instruction.emplace(c.instruction, &c);
  std::set<std::string> train_instructions;
  for (const auto& c : split.train) {
    auto it = test_by_instruction.find(c.instruction);
    if (it != test_by_instruction.end())
      violate("instruction leak: train " + c.template_id + "#" +
              std::to_string(c.instance_seed) + " duplicates test " +
              it->second->template_id + "#" +
              std::to_string(it->second->instance_seed) + " (\"" +
              c.instruction + "\")");
    if (!train_instructions.insert(c.instruction).second)
      violate("duplicate train instruction: " + c.instruction);
  }

  std::set<uint64_t> eval_seeds(split.eval_seeds.begin(),
                                split.eval_seeds.end());
  std::set<uint64_t> train_seeds(split.train_seeds.begin(),
                                 split.train_seeds.end());
  for (uint64_t s : eval_seeds)
    if (train_seeds.count(s))
      violate("seed " + std::to_string(s) + " in both eval and train lists");
  for (const auto& c : split.test)
    if (!eval_seeds.count(c.instance_seed))
      violate("test instance " + c.template_id + " uses undeclared seed " +
              std::to_string(c.instance_seed));
  for (const auto& c : split.train)
    if (!train_seeds.count(c.instance_seed))
      violate("train instance " + c.template_id + " uses undeclared seed " +
              std::to_string(c.instance_seed));

  std::set<std::string> train_templates, test_templates, train_apps, test_apps;
  for (const auto& c : split.train) {
    train_templates.insert(c.template_id);
    train_apps.insert(c.app_id);
  }
  for (const auto& c : split.test) {
    test_templates.insert(c.template_id);
    test_apps.insert(c.app_id);
  }

  if (split.regime == SplitRegime::UnseenTemplate) {
    for (const auto& t : test_templates)
      if (train_templates.count(t))
        violate("template " + t + " appears on both sides");
    if (train_apps != test_apps) violate("app sets differ between sides");
  }
  if (split.regime == SplitRegime::UnseenApp) {
    for (const auto& a : test_apps)
      if (train_apps.count(a)) violate("app " + a + " appears on both sides");
  }

  double gap = std::abs(split.report.train.mean_difficulty -
                        split.report.test.mean_difficulty);
  if (gap > tolerance) {
    std::ostringstream os;
    os << "difficulty imbalance: |" << split.report.train.mean_difficulty
       << " - " << split.report.test.mean_difficulty << "| = " << gap << " > "
       << tolerance;
    violate(os.str());
  }
  return report;
}

std::string format_split_table(const SplitSpec& split) {
  const auto& r = split.report;
  auto flag = [](bool b) { return b ? "yes" : "no "; };
  bool template_overlap = split.regime == SplitRegime::UnseenInstance;
  bool app_overlap = split.regime != SplitRegime::UnseenApp;
  std::ostringstream os;
  os << "Regime           Overlap I/T/A   Train I/T/A        Diff.  "
        "Test I/T/A       Diff.\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%-16s %s/%s/%s     %5d/%3d/%3d      %.2f   %5d/%3d/%3d    "
                "%.2f\n",
                to_string(split.regime).c_str(), flag(false),
                flag(template_overlap), flag(app_overlap), r.train.instances,
                r.train.templates, r.train.apps, r.train.mean_difficulty,
                r.test.instances, r.test.templates, r.test.apps,
                r.test.mean_difficulty);
  os << buf;
  if (r.balance_warning) os << "warning: no partition met the tolerance\n";
  for (const auto& a : r.excluded_apps) os << "excluded: " << a << "\n";
  return os.str();
}

json SplitReport::to_json() const {
  return json{{"train",
               {{"instances", train.instances},
                {"templates", train.templates},
                {"apps", train.apps},
                {"mean_difficulty", train.mean_difficulty}}},
              {"test",
               {{"instances", test.instances},
                {"templates", test.templates},
                {"apps", test.apps},
                {"mean_difficulty", test.mean_difficulty}}},
              {"pre_dedup_train_instances", pre_dedup_train_instances},
              {"balance_warning", balance_warning},
              {"excluded_apps", excluded_apps}};
}

SplitReport SplitReport::from_json(const json& j) {
  SplitReport r;
  auto side = [](const json& s) {
    SideStats out;
    out.instances = s.at("instances").get<int>();
    out.templates = s.at("templates").get<int>();
    out.apps = s.at("apps").get<int>();
    out.mean_difficulty = s.at("mean_difficulty").get<double>();
    return out;
  };
  r.train = side(j.at("train"));
  r.test = side(j.at("test"));
  r.pre_dedup_train_instances = j.at("pre_dedup_train_instances").get<int>();
  r.balance_warning = j.at("balance_warning").get<bool>();
  r.excluded_apps = j.at("excluded_apps").get<std::vector<std::string>>();
  return r;
}

json SplitSpec::to_json() const {
  json train_j = json::array();
  for (const auto& c : train) train_j.push_back(c.to_json());
  json test_j = json::array();
  for (const auto& c : test) test_j.push_back(c.to_json());
  return json{{"regime", to_string(regime)},   {"train", train_j},
              {"test", test_j},                {"eval_seeds", eval_seeds},
              {"train_seeds", train_seeds},    {"report", report.to_json()}};
}

SplitSpec SplitSpec::from_json(const json& j) {
  SplitSpec s;
  s.regime = split_regime_from_string(j.at("regime").get<std::string>());
  for (const auto& cj : j.at("train")) s.train.push_back(Context::from_json(cj));
  for (const auto& cj : j.at("test")) s.test.push_back(Context::from_json(cj));
  s.eval_seeds = j.at("eval_seeds").get<std::vector<uint64_t>>();
  s.train_seeds = j.at("train_seeds").get<std::vector<uint64_t>>();
  s.report = SplitReport::from_json(j.at("report"));
  return s;
}

json VerifyReport::to_json() const { return json{{"violations", violations}}; }

}  // namespace appgym
