#pragma once

#include <utility>

#include "appgym/core/types.hpp"

namespace appgym {

// The virtual screen is addressed on a 16x8 grid; widgets are placed on
// whole cells so coarse coordinate bins always land inside their target.
inline constexpr int kGridCols = 16;
inline constexpr int kGridRows = 8;
inline constexpr int kBinW = kScreenW / kGridCols;  // 70
inline constexpr int kBinH = kScreenH / kGridRows;  // 63

inline Rect cell_rect(int col, int row, int span_cols = 1) {
  return Rect{col * kBinW, row * kBinH, span_cols * kBinW, kBinH};
}

inline std::pair<int, int> cell_center(int col, int row) {
  return {col * kBinW + kBinW / 2, row * kBinH + kBinH / 2};
}

inline int col_of_x(int x) { return std::clamp(x / kBinW, 0, kGridCols - 1); }
inline int row_of_y(int y) { return std::clamp(y / kBinH, 0, kGridRows - 1); }

inline constexpr int kVisibleListRows = 5;

}  // namespace appgym
