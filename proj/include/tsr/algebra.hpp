#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsr/table.hpp"

namespace tsr {

enum class Axis { horizontal, vertical };

struct AdjacencyTriplet {
  int id_a = 0;  // always < id_b
  int id_b = 0;
  Axis axis = Axis::horizontal;

  bool operator==(const AdjacencyTriplet&) const = default;
  auto operator<=>(const AdjacencyTriplet&) const = default;
};

/// Two cells are adjacent when their row intervals intersect and their column
/// spans sit in consecutive columns, or the transposed condition holds.
/// Symmetric in its arguments.
bool adjacency_relation(const LogicalLocation& a, const LogicalLocation& b);

/// One triplet per unordered adjacent pair, id_a < id_b, sorted by
/// (id_a, id_b).
std::vector<AdjacencyTriplet> adjacency_triplets(const Table& t);

/// Row sets C_0..C_{n_rows-1}: C_k holds the ids of cells with
/// start_row == k, ordered by ascending start_col. Rows fully covered by
/// spans from above come out empty.
std::vector<std::vector<int>> rows_partition(const Table& t);

/// Emits one <tr> per grid row with <td rowspan="R" colspan="C"></td> per
/// cell. With with_text, the cell text (escaped) goes between the td tags.
std::string to_markup(const Table& t, bool with_text = false);

class MarkupError : public std::runtime_error {
 public:
  MarkupError(const std::string& what, size_t offset)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) +
                           ")"),
        offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

struct ParsedCell {
  int rowspan = 1;
  int colspan = 1;
  std::string text;
  LogicalLocation logical;
};

struct ParsedMarkup {
  std::vector<ParsedCell> cells;            // document order
  std::vector<std::vector<int>> tr_groups;  // cell indices per <tr>
  int n_rows = 0;                           // includes trailing rowspan reach
  int n_cols = 0;
};

/// Inverse of to_markup on the <tr>/<td rowspan colspan> subset. Standard
/// grid filling: each td goes to the leftmost free slot of its row and marks
/// its R x C footprint occupied. Throws MarkupError with the byte offset on
/// malformed tags, spans < 1, or colliding footprints.
ParsedMarkup parse_markup_full(const std::string& s);

/// Logical locations only, in document order.
std::vector<LogicalLocation> parse_markup(const std::string& s);

std::string escape_text(const std::string& s);
std::string unescape_text(const std::string& s);

}  // namespace tsr
