#include "tsr/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace tsr {

namespace {

bool rows_intersect(const LogicalLocation& a, const LogicalLocation& b) {
  return a.start_row <= b.end_row && b.start_row <= a.end_row;
}

bool cols_intersect(const LogicalLocation& a, const LogicalLocation& b) {
  return a.start_col <= b.end_col && b.start_col <= a.end_col;
}

bool cols_consecutive(const LogicalLocation& a, const LogicalLocation& b) {
  return a.start_col - b.end_col == 1 || b.start_col - a.end_col == 1;
}

bool rows_consecutive(const LogicalLocation& a, const LogicalLocation& b) {
  return a.start_row - b.end_row == 1 || b.start_row - a.end_row == 1;
}

}  // namespace

bool adjacency_relation(const LogicalLocation& a, const LogicalLocation& b) {
  bool horizontal = rows_intersect(a, b) && cols_consecutive(a, b);
  bool vertical = cols_intersect(a, b) && rows_consecutive(a, b);
  return horizontal || vertical;
}

std::vector<AdjacencyTriplet> adjacency_triplets(const Table& t) {
  std::vector<AdjacencyTriplet> out;
  for (size_t i = 0; i < t.cells.size(); ++i) {
    for (size_t j = i + 1; j < t.cells.size(); ++j) {
      const LogicalLocation& a = t.cells[i].logical;
      const LogicalLocation& b = t.cells[j].logical;
      bool horizontal = rows_intersect(a, b) && cols_consecutive(a, b);
      bool vertical = cols_intersect(a, b) && rows_consecutive(a, b);
      if (!horizontal && !vertical) continue;
      int lo = std::min(t.cells[i].id, t.cells[j].id);
      int hi = std::max(t.cells[i].id, t.cells[j].id);
      out.push_back(
          {lo, hi, horizontal ? Axis::horizontal : Axis::vertical});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<int>> rows_partition(const Table& t) {
  std::vector<std::vector<int>> rows(std::max(t.n_rows, 0));
  std::vector<size_t> order(t.cells.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return t.cells[a].logical.start_col < t.cells[b].logical.start_col;
  });
  for (size_t idx : order) {
    const Cell& c = t.cells[idx];
    if (c.logical.start_row >= 0 &&
        c.logical.start_row < static_cast<int>(rows.size())) {
      rows[c.logical.start_row].push_back(c.id);
    }
  }
  return rows;
}

std::string escape_text(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string unescape_text(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size();) {
    if (s[i] == '&') {
      if (s.compare(i, 5, "&amp;") == 0) { out += '&'; i += 5; continue; }
      if (s.compare(i, 4, "&lt;") == 0) { out += '<'; i += 4; continue; }
      if (s.compare(i, 4, "&gt;") == 0) { out += '>'; i += 4; continue; }
    }
    out += s[i++];
  }
  return out;
}

std::string to_markup(const Table& t, bool with_text) {
  std::ostringstream os;
  auto rows = rows_partition(t);
  // id -> cell lookup
  std::vector<std::pair<int, const Cell*>> index;
  index.reserve(t.cells.size());
  for (const Cell& c : t.cells) index.emplace_back(c.id, &c);
  std::sort(index.begin(), index.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  auto find_cell = [&](int id) -> const Cell* {
    auto it = std::lower_bound(
        index.begin(), index.end(), id,
        [](const auto& p, int v) { return p.first < v; });
    return (it != index.end() && it->first == id) ? it->second : nullptr;
  };

  if (t.cells.empty()) return "";
  for (const auto& row : rows) {
    os << "<tr>";
    for (int id : row) {
      const Cell* c = find_cell(id);
      if (!c) continue;
      os << "<td rowspan=\"" << c->logical.row_span() << "\" colspan=\""
         << c->logical.col_span() << "\">";
      if (with_text && c->text) os << escape_text(*c->text);
      os << "</td>";
    }
    os << "</tr>";
  }
  return os.str();
}

namespace {

class Scanner {
 public:
  explicit Scanner(const std::string& s) : s_(s) {}

  size_t pos() const { return pos_; }
  bool done() const { return pos_ >= s_.size(); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool try_consume(const std::string& lit) {
    if (s_.compare(pos_, lit.size(), lit) == 0) {
      pos_ += lit.size();
      return true;
    }
    return false;
  }

  bool peek_is(const std::string& lit) const {
    return s_.compare(pos_, lit.size(), lit) == 0;
  }

  // Scans text content up to the next '<'.
  std::string scan_text() {
    size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != '<') ++pos_;
    return s_.substr(start, pos_ - start);
  }

  // Parses attributes of an already-opened <td tag, up to and including '>'.
  // Accepts rowspan/colspan in either order; missing attributes default to 1.
  void scan_td_attrs(int& rowspan, int& colspan) {
    rowspan = 1;
    colspan = 1;
    while (true) {
      skip_ws();
      if (done()) throw MarkupError("unterminated <td tag", pos_);
      if (try_consume(">")) return;
      std::string name;
      if (peek_is("rowspan")) {
        pos_ += 7;
        name = "rowspan";
      } else if (peek_is("colspan")) {
        pos_ += 7;
        name = "colspan";
      } else {
        throw MarkupError("unknown attribute in <td> tag", pos_);
      }
      skip_ws();
      if (!try_consume("=")) throw MarkupError("expected '=' after " + name, pos_);
      skip_ws();
      bool quoted = try_consume("\"");
      size_t vstart = pos_;
      while (pos_ < s_.size() &&
             std::isdigit(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
      if (pos_ == vstart)
        throw MarkupError("expected integer value for " + name, pos_);
      long v = std::stol(s_.substr(vstart, pos_ - vstart));
      if (quoted && !try_consume("\""))
        throw MarkupError("unterminated attribute value", pos_);
      if (name == "rowspan") rowspan = static_cast<int>(v);
      else colspan = static_cast<int>(v);
    }
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;
};

// Occupancy grid that grows on demand, storing -1 for free slots.
class Grid {
 public:
  int at(int r, int c) const {
    if (r >= static_cast<int>(rows_.size())) return -1;
    const auto& row = rows_[r];
    if (c >= static_cast<int>(row.size())) return -1;
    return row[c];
  }

  void set(int r, int c, int v) {
    if (r >= static_cast<int>(rows_.size())) rows_.resize(r + 1);
    auto& row = rows_[r];
    if (c >= static_cast<int>(row.size())) row.resize(c + 1, -1);
    row[c] = v;
  }

 private:
  std::vector<std::vector<int>> rows_;
};

}  // namespace

ParsedMarkup parse_markup_full(const std::string& s) {
  ParsedMarkup out;
  Scanner sc(s);
  Grid grid;
  int row = 0;
  int max_col = -1;

  sc.skip_ws();
  while (!sc.done()) {
    size_t tr_pos = sc.pos();
    if (!sc.try_consume("<tr>"))
      throw MarkupError("expected <tr>", tr_pos);
    out.tr_groups.emplace_back();
    int col = 0;
    sc.skip_ws();
    while (!sc.peek_is("</tr>")) {
      size_t td_pos = sc.pos();
      if (!sc.try_consume("<td"))
        throw MarkupError("expected <td or </tr>", td_pos);
      int rowspan = 1, colspan = 1;
      sc.scan_td_attrs(rowspan, colspan);
      if (rowspan < 1) throw MarkupError("rowspan < 1", td_pos);
      if (colspan < 1) throw MarkupError("colspan < 1", td_pos);
      std::string text = unescape_text(sc.scan_text());
      if (!sc.try_consume("</td>"))
        throw MarkupError("expected </td>", sc.pos());

      while (grid.at(row, col) != -1) ++col;
      // Mark the R x C footprint, rejecting collisions with earlier spans.
      for (int r = row; r < row + rowspan; ++r) {
        for (int c = col; c < col + colspan; ++c) {
          if (grid.at(r, c) != -1)
            throw MarkupError("overlapping footprint", td_pos);
          grid.set(r, c, static_cast<int>(out.cells.size()));
        }
      }
      ParsedCell cell;
      cell.rowspan = rowspan;
      cell.colspan = colspan;
      cell.text = std::move(text);
      cell.logical = {row, row + rowspan - 1, col, col + colspan - 1};
      max_col = std::max(max_col, cell.logical.end_col);
      out.tr_groups.back().push_back(static_cast<int>(out.cells.size()));
      out.cells.push_back(std::move(cell));
      col += colspan;
      sc.skip_ws();
      if (sc.done()) throw MarkupError("unterminated row", sc.pos());
    }
    sc.try_consume("</tr>");
    ++row;
    sc.skip_ws();
  }
  out.n_rows = row;
  for (const ParsedCell& c : out.cells)
    out.n_rows = std::max(out.n_rows, c.logical.end_row + 1);
  out.n_cols = max_col + 1;
  return out;
}

std::vector<LogicalLocation> parse_markup(const std::string& s) {
  ParsedMarkup parsed = parse_markup_full(s);
  std::vector<LogicalLocation> out;
  out.reserve(parsed.cells.size());
  for (const ParsedCell& c : parsed.cells) out.push_back(c.logical);
  return out;
}

}  // namespace tsr
