#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "appgym/core/types.hpp"

namespace appgym {

struct MaskError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// What the current observation allows: how many typed-content candidates are
// addressable. App tokens are fixed by the vocabulary itself.
struct MaskContext {
  int n_candidates = 0;
};

struct VocabConfig {
  int coord_bins_x = 16;
  int coord_bins_y = 8;
  int max_candidates = 16;
  std::vector<std::string> app_names;

  json to_json() const;
  static VocabConfig from_json(const json& j);
};

// Dense, stable token ids: [action kinds][x bins][y bins][directions]
// [candidate indices][app names]. An action is one kind token followed by
// zero, one, or two argument tokens.
class TokenVocab {
 public:
  explicit TokenVocab(VocabConfig config);

  int size() const { return size_; }
  const VocabConfig& config() const { return config_; }

  int kind_token(ActionKind k) const { return static_cast<int>(k); }
  int x_token(int bin) const { return x_off_ + bin; }
  int y_token(int bin) const { return y_off_ + bin; }
  int dir_token(ScrollDirection d) const {
    return dir_off_ + static_cast<int>(d);
  }
  int candidate_token(int index) const { return cand_off_ + index; }
  int app_token(int index) const { return app_off_ + index; }

  // Number of tokens an action of this kind occupies (1..3).
  int positions_for(ActionKind k) const;

  std::vector<int> encode(const Action& action) const;
  Action decode(std::span<const int> tokens) const;

  // Fills `allowed` (size() entries) for the given position. Position 0 is
  // the kind; later positions depend on the already-chosen kind.
  void mask(int position, ActionKind kind_so_far, const MaskContext& ctx,
            std::vector<bool>& allowed) const;

 private:
  VocabConfig config_;
  int x_off_, y_off_, dir_off_, cand_off_, app_off_, size_;
};

}  // namespace appgym
