#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "appgym/bench/catalog.hpp"
#include "appgym/core/types.hpp"

namespace appgym {

enum class SplitRegime { UnseenInstance, UnseenTemplate, UnseenApp };

std::string to_string(SplitRegime r);
SplitRegime split_regime_from_string(const std::string& s);

struct SeedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AdaptationSetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SplitOptions {
  double ratio = 3.0;       // train : test
  double tolerance = 0.05;  // max |mean difficulty gap|
  std::vector<uint64_t> eval_seeds{30, 7, 1234};
  std::vector<uint64_t> train_seeds{1,      2,       3,        4,
                                    5,      6,       8,        9,
                                    12,     123,     12345,    123456,
                                    1234567, 12345678, 123456789, 1234567890};
  uint64_t search_seed = 0;  // greedy app-partition restarts (> 20 apps)
};

struct SideStats {
  int instances = 0;
  int templates = 0;
  int apps = 0;
  double mean_difficulty = 0.0;  // over the side's distinct templates
};

struct SplitReport {
  SideStats train;
  SideStats test;
  int pre_dedup_train_instances = 0;
  bool balance_warning = false;  // no app partition met the tolerance
  std::vector<std::string> excluded_apps;  // dropped by filters or the guard

  json to_json() const;
  static SplitReport from_json(const json& j);
};

struct SplitSpec {
  SplitRegime regime = SplitRegime::UnseenInstance;
  std::vector<Context> train;
  std::vector<Context> test;
  std::vector<uint64_t> eval_seeds;
  std::vector<uint64_t> train_seeds;
  SplitReport report;

  json to_json() const;
  static SplitSpec from_json(const json& j);
};

// Same templates and apps on both sides; test instances come from the eval
// seeds, train instances from the train seeds with duplicates (by rendered
// instruction, within train and against test) removed. Templates that cannot
// produce distinct instances are excluded entirely.
SplitSpec split_unseen_instance(const TaskCatalog& catalog,
                                const SplitOptions& opts = {});

// Disjoint template sets over a shared app set. Apps with fewer than two
// usable templates are filtered out; per-app test counts follow the ratio and
// the assignment is searched so mean difficulties balance, subject to the
// guard that a medium/hard test template leaves an equal-or-easier template
// in its app's train side.
SplitSpec split_unseen_template(const TaskCatalog& catalog,
                                const SplitOptions& opts = {});

// Disjoint app sets. The test-side app count targets the ratio; the partition
// is chosen by search (exhaustive up to 20 apps, seeded greedy beyond) to
// minimize the distance between the two sides' difficulty distributions.
SplitSpec split_unseen_app(const TaskCatalog& catalog,
                           const SplitOptions& opts = {});

SplitSpec make_split(const TaskCatalog& catalog, SplitRegime regime,
                     const SplitOptions& opts = {});

// Per unseen app, k distinct instances balanced over that app's test
// templates, generated from seeds disjoint from the split's and never
// colliding with test instances by rendered instruction.
std::vector<Context> make_adaptation_set(const TaskCatalog& catalog,
                                         const SplitSpec& split, int k_per_app,
                                         const std::vector<uint64_t>& seeds);

struct VerifyReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }

  json to_json() const;
};

// Machine-checkable conformance report: instruction disjointness, seed
// bookkeeping, regime-specific set relations, difficulty balance.
VerifyReport verify_split(const SplitSpec& split, double tolerance = 0.05);

// Human-readable statistics block (regime, overlap flags, I/T/A, difficulty).
std::string format_split_table(const SplitSpec& split);

}  // namespace appgym
