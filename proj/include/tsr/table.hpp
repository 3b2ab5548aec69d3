#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsr/geometry.hpp"

namespace tsr {

/// 0-based grid indices, inclusive on both ends of each axis.
struct LogicalLocation {
  int start_row = 0;
  int end_row = 0;
  int start_col = 0;
  int end_col = 0;

  int row_span() const { return end_row - start_row + 1; }
  int col_span() const { return end_col - start_col + 1; }
  bool is_spanning() const { return end_row > start_row || end_col > start_col; }
  bool is_valid() const {
    return start_row >= 0 && start_col >= 0 && start_row <= end_row &&
           start_col <= end_col;
  }

  bool operator==(const LogicalLocation&) const = default;
};

struct Cell {
  int id = 0;
  SpatialQuad quad;
  LogicalLocation logical;
  std::optional<std::string> text;
};

struct Table {
  std::vector<Cell> cells;
  int n_rows = 1;
  int n_cols = 1;
  double image_width = 0.0;
  double image_height = 0.0;
};

struct Violation {
  std::string rule;
  std::vector<int> cell_ids;
  std::string detail;
};

/// Checks all Table invariants; returns one Violation per broken rule.
/// Never throws.
std::vector<Violation> validate_table(const Table& t);

}  // namespace tsr
