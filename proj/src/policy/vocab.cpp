#include "appgym/policy/vocab.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace appgym {

json VocabConfig::to_json() const {
  return json{{"coord_bins_x", coord_bins_x},
              {"coord_bins_y", coord_bins_y},
              {"max_candidates", max_candidates},
              {"app_names", app_names}};
}

VocabConfig VocabConfig::from_json(const json& j) {
  VocabConfig c;
  c.coord_bins_x = j.value("coord_bins_x", 16);
  c.coord_bins_y = j.value("coord_bins_y", 8);
  c.max_candidates = j.value("max_candidates", 16);
  c.app_names = j.value("app_names", std::vector<std::string>{});
  return c;
}

TokenVocab::TokenVocab(VocabConfig config) : config_(std::move(config)) {
  x_off_ = kNumActionKinds;
  y_off_ = x_off_ + config_.coord_bins_x;
  dir_off_ = y_off_ + config_.coord_bins_y;
  cand_off_ = dir_off_ + 4;
  app_off_ = cand_off_ + config_.max_candidates;
  size_ = app_off_ + static_cast<int>(config_.app_names.size());
}

int TokenVocab::positions_for(ActionKind k) const {
  switch (k) {
    case ActionKind::Click:
    case ActionKind::LongPress:
      return 3;
    case ActionKind::Type:
    case ActionKind::Scroll:
    case ActionKind::OpenApp:
    case ActionKind::Answer:
      return 2;
    case ActionKind::PressHome:
    case ActionKind::PressBack:
    case ActionKind::Finished:
      return 1;
  }
  return 1;
}

std::vector<int> TokenVocab::encode(const Action& action) const {
  std::vector<int> t{kind_token(action.kind)};
  const int bin_w = kScreenW / config_.coord_bins_x;
  const int bin_h = kScreenH / config_.coord_bins_y;
  switch (action.kind) {
    case ActionKind::Click:
    case ActionKind::LongPress:
      t.push_back(x_token(std::clamp(action.x / bin_w, 0,
                                     config_.coord_bins_x - 1)));
      t.push_back(y_token(std::clamp(action.y / bin_h, 0,
                                     config_.coord_bins_y - 1)));
      break;
    case ActionKind::Scroll:
      t.push_back(dir_token(action.direction));
      break;
    case ActionKind::Type:
    case ActionKind::Answer:
      t.push_back(candidate_token(
          std::clamp(action.candidate.value_or(0), 0,
                     config_.max_candidates - 1)));
      break;
    case ActionKind::OpenApp: {
      int idx = 0;
      if (action.content) {
        auto it = std::find(config_.app_names.begin(), config_.app_names.end(),
                            *action.content);
        if (it != config_.app_names.end())
          idx = static_cast<int>(it - config_.app_names.begin());
      } else if (action.candidate) {
        idx = *action.candidate;
      }
      t.push_back(app_token(idx));
      break;
    }
    default:
      break;
  }
  return t;
}

Action TokenVocab::decode(std::span<const int> tokens) const {
  if (tokens.empty()) throw MaskError("empty token sequence");
  auto arg = [&](size_t i) {
    if (i >= tokens.size()) throw MaskError("token sequence too short");
    return tokens[i];
  };
  Action a;
  a.kind = static_cast<ActionKind>(tokens[0]);
  const int bin_w = kScreenW / config_.coord_bins_x;
  const int bin_h = kScreenH / config_.coord_bins_y;
  switch (a.kind) {
    case ActionKind::Click:
    case ActionKind::LongPress:
      a.x = (arg(1) - x_off_) * bin_w + bin_w / 2;
      a.y = (arg(2) - y_off_) * bin_h + bin_h / 2;
      break;
    case ActionKind::Scroll:
      a.direction = static_cast<ScrollDirection>(arg(1) - dir_off_);
      break;
    case ActionKind::Type:
    case ActionKind::Answer:
      a.candidate = arg(1) - cand_off_;
      break;
    case ActionKind::OpenApp:
      a.content = config_.app_names.at(arg(1) - app_off_);
      break;
    case ActionKind::Finished:
      a.candidate = 0;
      break;
    default:
      break;
  }
  return a;
}

void TokenVocab::mask(int position, ActionKind kind_so_far,
                      const MaskContext& ctx,
                      std::vector<bool>& allowed) const {
  allowed.assign(size_, false);
  if (position == 0) {
    for (int k = 0; k < kNumActionKinds; ++k) {
      auto kind = static_cast<ActionKind>(k);
      bool ok = true;
      if (kind == ActionKind::Type || kind == ActionKind::Answer)
        ok = ctx.n_candidates > 0;
      if (kind == ActionKind::OpenApp) ok = !config_.app_names.empty();
      allowed[k] = ok;
    }
    return;
  }
  switch (kind_so_far) {
    case ActionKind::Click:
    case ActionKind::LongPress:
      if (position == 1)
        for (int i = 0; i < config_.coord_bins_x; ++i) allowed[x_off_ + i] = true;
      else
        for (int i = 0; i < config_.coord_bins_y; ++i) allowed[y_off_ + i] = true;
      break;
    case ActionKind::Scroll:
      for (int i = 0; i < 4; ++i) allowed[dir_off_ + i] = true;
      break;
    case ActionKind::Type:
    case ActionKind::Answer: {
      int n = std::min(ctx.n_candidates, config_.max_candidates);
      for (int i = 0; i < n; ++i) allowed[cand_off_ + i] = true;
      break;
    }
    case ActionKind::OpenApp:
      for (size_t i = 0; i < config_.app_names.size(); ++i)
        allowed[app_off_ + static_cast<int>(i)] = true;
      break;
    default:
      throw MaskError("kind " + to_string(kind_so_far) +
                      " takes no argument tokens");
  }
}

}  // namespace appgym
