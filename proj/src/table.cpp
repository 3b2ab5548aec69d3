#include "tsr/table.hpp"

#include <set>
#include <sstream>

namespace tsr {

namespace {

bool logical_overlap(const LogicalLocation& a, const LogicalLocation& b) {
  bool rows = a.start_row <= b.end_row && b.start_row <= a.end_row;
  bool cols = a.start_col <= b.end_col && b.start_col <= a.end_col;
  return rows && cols;
}

}  // namespace

std::vector<Violation> validate_table(const Table& t) {
  std::vector<Violation> out;
  if (t.n_rows < 1 || t.n_cols < 1) {
    std::ostringstream os;
    os << "grid is " << t.n_rows << "x" << t.n_cols;
    out.push_back({"grid_size", {}, os.str()});
  }

  std::set<int> seen_ids;
  for (const Cell& c : t.cells) {
    if (!seen_ids.insert(c.id).second) {
      out.push_back({"duplicate_id", {c.id}, "cell id used more than once"});
    }
    if (!c.logical.is_valid()) {
      std::ostringstream os;
      os << "logical (" << c.logical.start_row << "," << c.logical.end_row
         << "," << c.logical.start_col << "," << c.logical.end_col << ")";
      out.push_back({"logical_invariant", {c.id}, os.str()});
      continue;
    }
    if (c.logical.end_row >= t.n_rows || c.logical.end_col >= t.n_cols) {
      std::ostringstream os;
      os << "cell extends to (" << c.logical.end_row << ","
         << c.logical.end_col << ") outside " << t.n_rows << "x" << t.n_cols;
      out.push_back({"range", {c.id}, os.str()});
    }
    if (!c.quad.is_finite()) {
      out.push_back({"quad_finite", {c.id}, "non-finite corner coordinate"});
    } else if (!c.quad.is_simple()) {
      out.push_back({"quad_simple", {c.id}, "self-intersecting quad"});
    }
  }

  for (size_t i = 0; i < t.cells.size(); ++i) {
    for (size_t j = i + 1; j < t.cells.size(); ++j) {
      const Cell& a = t.cells[i];
      const Cell& b = t.cells[j];
      if (!a.logical.is_valid() || !b.logical.is_valid()) continue;
      if (logical_overlap(a.logical, b.logical)) {
        out.push_back(
            {"overlap", {a.id, b.id}, "logical rectangles intersect"});
      }
    }
  }
  return out;
}

}  // namespace tsr
