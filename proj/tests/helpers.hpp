#pragma once

#include <array>
#include <vector>

#include "tsr/table.hpp"

namespace helpers {

/// Table from logical tuples (sr, er, sc, ec) with quads laid on a uniform
/// 100px grid; image size derived from the grid.
inline tsr::Table make_table(int n_rows, int n_cols,
                             const std::vector<std::array<int, 4>>& logicals) {
  tsr::Table t;
  t.n_rows = n_rows;
  t.n_cols = n_cols;
  t.image_width = 100.0 * n_cols + 20.0;
  t.image_height = 100.0 * n_rows + 20.0;
  int id = 0;
  for (const auto& l : logicals) {
    tsr::Cell c;
    c.id = id++;
    c.logical = {l[0], l[1], l[2], l[3]};
    tsr::Rect r{10.0 + 100.0 * l[2] + 2.0, 10.0 + 100.0 * l[0] + 2.0,
                10.0 + 100.0 * (l[3] + 1) - 2.0,
                10.0 + 100.0 * (l[1] + 1) - 2.0};
    c.quad = tsr::SpatialQuad::from_rect(r);
    t.cells.push_back(c);
  }
  return t;
}

/// Full grid of 1x1 cells, row-major ids.
inline tsr::Table grid_table(int n_rows, int n_cols) {
  std::vector<std::array<int, 4>> logicals;
  for (int r = 0; r < n_rows; ++r)
    for (int c = 0; c < n_cols; ++c)
      logicals.push_back({r, r, c, c});
  return make_table(n_rows, n_cols, logicals);
}

}  // namespace helpers
