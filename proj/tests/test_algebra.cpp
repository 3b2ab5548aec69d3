#include <algorithm>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "tsr/algebra.hpp"
#include "tsr/synth.hpp"

using namespace tsr;
using helpers::make_table;

TEST_CASE("adjacency_relation basic cases") {
  CHECK(adjacency_relation({0, 0, 0, 0}, {0, 0, 1, 1}));
  CHECK_FALSE(adjacency_relation({0, 0, 0, 0}, {2, 2, 0, 0}));
  CHECK(adjacency_relation({0, 1, 0, 0}, {1, 1, 1, 2}));
  // vertical neighbors
  CHECK(adjacency_relation({0, 0, 0, 0}, {1, 1, 0, 0}));
  // diagonal only: not adjacent
  CHECK_FALSE(adjacency_relation({0, 0, 0, 0}, {1, 1, 1, 1}));
  // column gap
  CHECK_FALSE(adjacency_relation({0, 0, 0, 0}, {0, 0, 2, 2}));
}

TEST_CASE("adjacency_relation is symmetric and irreflexive on valid tables") {
  GenConfig cfg;
  cfg.seed = 11;
  cfg.span_prob = 0.3;
  for (int idx = 0; idx < 50; ++idx) {
    Table t = generate_table(cfg, idx);
    for (size_t i = 0; i < t.cells.size(); ++i) {
      CHECK_FALSE(adjacency_relation(t.cells[i].logical, t.cells[i].logical));
      for (size_t j = i + 1; j < t.cells.size(); ++j) {
        CHECK(adjacency_relation(t.cells[i].logical, t.cells[j].logical) ==
              adjacency_relation(t.cells[j].logical, t.cells[i].logical));
      }
    }
  }
}

TEST_CASE("adjacency_triplets simple tables") {
  Table row2 = helpers::grid_table(1, 2);
  auto trips = adjacency_triplets(row2);
  REQUIRE(trips.size() == 1);
  CHECK(trips[0] == AdjacencyTriplet{0, 1, Axis::horizontal});

  Table single = helpers::grid_table(1, 1);
  CHECK(adjacency_triplets(single).empty());

  Table col2 = helpers::grid_table(2, 1);
  trips = adjacency_triplets(col2);
  REQUIRE(trips.size() == 1);
  CHECK(trips[0].axis == Axis::vertical);
}

TEST_CASE("adjacency_triplets equals rasterization oracle on random tables") {
  GenConfig cfg;
  cfg.seed = 7;
  for (double span_prob : {0.0, 0.15, 0.3}) {
    cfg.span_prob = span_prob;
    for (int idx = 0; idx < 120; ++idx) {
      Table t = generate_table(cfg, idx);
      auto got = adjacency_triplets(t);
      auto expected = oracles::rasterized_adjacency(t);
      CHECK(got == expected);
    }
  }
}

TEST_CASE("rows_partition by start_row ordered by start_col") {
  Table t = make_table(2, 2, {{0, 0, 0, 1}, {1, 1, 0, 0}, {1, 1, 1, 1}});
  auto rows = rows_partition(t);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<int>{0});
  CHECK(rows[1] == std::vector<int>{1, 2});
}

TEST_CASE("rows_partition: row-spanning cell appears only in its start row") {
  Table t = make_table(3, 2, {{0, 2, 0, 0},
                              {0, 0, 1, 1},
                              {1, 1, 1, 1},
                              {2, 2, 1, 1}});
  auto rows = rows_partition(t);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<int>{0, 1});
  CHECK(rows[1] == std::vector<int>{2});
  CHECK(rows[2] == std::vector<int>{3});
}

TEST_CASE("rows_partition matches sorting oracle and partitions all cells") {
  GenConfig cfg;
  cfg.seed = 23;
  cfg.span_prob = 0.25;
  for (int idx = 0; idx < 60; ++idx) {
    Table t = generate_table(cfg, idx);
    auto rows = rows_partition(t);
    CHECK(rows == oracles::partition_by_sorting(t));
    std::set<int> seen;
    for (const auto& r : rows)
      for (int id : r) CHECK(seen.insert(id).second);
    CHECK(seen.size() == t.cells.size());
  }
}

TEST_CASE("to_markup matches the worked example") {
  Table t = make_table(2, 2, {{0, 0, 0, 1}, {1, 1, 0, 0}, {1, 1, 1, 1}});
  CHECK(to_markup(t) ==
        "<tr><td rowspan=\"1\" colspan=\"2\"></td></tr>"
        "<tr><td rowspan=\"1\" colspan=\"1\"></td>"
        "<td rowspan=\"1\" colspan=\"1\"></td></tr>");
}

TEST_CASE("to_markup of empty table is empty") {
  Table t;
  t.cells.clear();
  CHECK(to_markup(t).empty());
}

TEST_CASE("to_markup emits text in text mode") {
  Table t = make_table(1, 1, {{0, 0, 0, 0}});
  t.cells[0].text = "a <b> & c";
  CHECK(to_markup(t, true) ==
        "<tr><td rowspan=\"1\" colspan=\"1\">a &lt;b&gt; &amp; c</td></tr>");
  auto parsed = parse_markup_full(to_markup(t, true));
  REQUIRE(parsed.cells.size() == 1);
  CHECK(parsed.cells[0].text == "a <b> & c");
}

TEST_CASE("parse_markup grid filling with rowspan") {
  auto locs = parse_markup(
      "<tr><td rowspan=\"2\" colspan=\"1\"></td>"
      "<td rowspan=\"1\" colspan=\"1\"></td></tr>"
      "<tr><td rowspan=\"1\" colspan=\"1\"></td></tr>");
  REQUIRE(locs.size() == 3);
  CHECK(locs[0] == LogicalLocation{0, 1, 0, 0});
  CHECK(locs[1] == LogicalLocation{0, 0, 1, 1});
  CHECK(locs[2] == LogicalLocation{1, 1, 1, 1});
}

TEST_CASE("parse_markup error cases carry positions") {
  CHECK_THROWS_WITH_AS(
      parse_markup("<tr><td rowspan=\"0\" colspan=\"1\"></td></tr>"),
      doctest::Contains("rowspan < 1"), MarkupError);
  CHECK_THROWS_AS(parse_markup("<table>"), MarkupError);
  CHECK_THROWS_AS(parse_markup("<tr><td rowspan=\"1\""), MarkupError);
  // second row's wide cell collides with the rowspan from above
  CHECK_THROWS_WITH_AS(
      parse_markup("<tr><td rowspan=\"1\" colspan=\"1\"></td>"
                   "<td rowspan=\"2\" colspan=\"1\"></td></tr>"
                   "<tr><td rowspan=\"1\" colspan=\"2\"></td></tr>"),
      doctest::Contains("overlapping footprint"), MarkupError);
}

TEST_CASE("markup round-trip is identity on logical structure") {
  GenConfig cfg;
  cfg.seed = 5;
  cfg.span_prob = 0.25;
  for (int idx = 0; idx < 150; ++idx) {
    Table t = generate_table(cfg, idx);
    std::string markup = t.cells.empty() ? "" : to_markup(t);
    auto locs = parse_markup(markup);
    // document order = rows_partition order
    std::vector<LogicalLocation> expected;
    for (const auto& row : rows_partition(t))
      for (int id : row)
        for (const Cell& c : t.cells)
          if (c.id == id) expected.push_back(c.logical);
    CHECK(locs == expected);
    // td count equals cell count
    size_t td_count = 0;
    for (size_t p = markup.find("<td"); p != std::string::npos;
         p = markup.find("<td", p + 1))
      ++td_count;
    CHECK(td_count == t.cells.size());
  }
}

TEST_CASE("validate_table flags violations") {
  Table ok = helpers::grid_table(2, 2);
  CHECK(validate_table(ok).empty());

  Table overlap = make_table(1, 1, {{0, 0, 0, 0}, {0, 0, 0, 0}});
  auto v = validate_table(overlap);
  REQUIRE(v.size() == 1);
  CHECK(v[0].rule == "overlap");
  CHECK(v[0].cell_ids == std::vector<int>{0, 1});

  Table range = make_table(1, 1, {{0, 0, 0, 1}});
  v = validate_table(range);
  REQUIRE(v.size() == 1);
  CHECK(v[0].rule == "range");

  Table bad_logical = helpers::grid_table(1, 1);
  bad_logical.cells[0].logical = {1, 0, 0, 0};
  v = validate_table(bad_logical);
  REQUIRE(v.size() == 1);
  CHECK(v[0].rule == "logical_invariant");
}

TEST_CASE("empty grid slots are permitted") {
  // 2x2 grid with only 3 cells; slot (1,1) left empty.
  Table t = make_table(2, 2, {{0, 0, 0, 0}, {0, 0, 1, 1}, {1, 1, 0, 0}});
  CHECK(validate_table(t).empty());
  auto trips = adjacency_triplets(t);
  CHECK(trips == oracles::rasterized_adjacency(t));
}
