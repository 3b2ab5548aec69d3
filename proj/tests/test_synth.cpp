#include <cmath>
#include <set>

#include "doctest.h"
#include "tsr/dataset.hpp"
#include "tsr/metrics.hpp"
#include "tsr/synth.hpp"

using namespace tsr;

TEST_CASE("generate_table with span_prob 0 gives a full unit grid") {
  GenConfig cfg;
  cfg.span_prob = 0.0;
  cfg.seed = 3;
  for (int idx = 0; idx < 20; ++idx) {
    Table t = generate_table(cfg, idx);
    CHECK(t.cells.size() ==
          static_cast<size_t>(t.n_rows) * static_cast<size_t>(t.n_cols));
    for (const Cell& c : t.cells) {
      CHECK(c.logical.row_span() == 1);
      CHECK(c.logical.col_span() == 1);
    }
  }
}

TEST_CASE("generated tables always validate") {
  GenConfig cfg;
  cfg.seed = 17;
  for (double p : {0.0, 0.1, 0.3}) {
    cfg.span_prob = p;
    for (int idx = 0; idx < 100; ++idx) {
      Table t = generate_table(cfg, idx);
      CHECK(validate_table(t).empty());
    }
  }
}

TEST_CASE("generation is deterministic in (seed, index)") {
  GenConfig cfg;
  cfg.seed = 7;
  cfg.span_prob = 0.2;
  Table a = generate_table(cfg, 3);
  Table b = generate_table(cfg, 3);
  CHECK(table_to_json(a) == table_to_json(b));
  Table c = generate_table(cfg, 4);
  CHECK(table_to_json(a) != table_to_json(c));
}

TEST_CASE("perturb_quads: sigma 0 is identity, corners stay in bounds") {
  GenConfig cfg;
  cfg.seed = 9;
  Table t = generate_table(cfg, 0);
  Table same = perturb_quads(t, 0.0, 42);
  CHECK(table_to_json(same) == table_to_json(t));

  Table moved = perturb_quads(t, 5.0, 42);
  for (const Cell& c : moved.cells) {
    for (const Point& p : c.quad.corners) {
      CHECK(p.x >= 0.0);
      CHECK(p.x <= t.image_width);
      CHECK(p.y >= 0.0);
      CHECK(p.y <= t.image_height);
    }
  }
  for (size_t i = 0; i < t.cells.size(); ++i)
    CHECK(moved.cells[i].logical == t.cells[i].logical);
}

TEST_CASE("perturb_quads empirical std near sigma") {
  GenConfig cfg;
  cfg.seed = 21;
  cfg.rows_min = cfg.rows_max = 6;
  cfg.cols_min = cfg.cols_max = 6;
  double sum = 0.0, sum_sq = 0.0;
  int n = 0;
  for (int idx = 0; idx < 40; ++idx) {
    Table t = generate_table(cfg, idx);
    Table moved = perturb_quads(t, 2.0, 1000 + idx);
    for (size_t i = 0; i < t.cells.size(); ++i)
      for (int k = 0; k < 4; ++k) {
        double dx = moved.cells[i].quad.corners[k].x -
                    t.cells[i].quad.corners[k].x;
        double dy = moved.cells[i].quad.corners[k].y -
                    t.cells[i].quad.corners[k].y;
        sum += dx + dy;
        sum_sq += dx * dx + dy * dy;
        n += 2;
      }
  }
  double mean = sum / n;
  double std_dev = std::sqrt(sum_sq / n - mean * mean);
  CHECK(std_dev > 1.7);
  CHECK(std_dev < 2.3);
}

TEST_CASE("word boxes sit inside their cells and match token counts") {
  GenConfig cfg;
  cfg.seed = 13;
  cfg.words_min = 1;
  cfg.words_max = 3;
  Table t = generate_table(cfg, 2);
  auto words = generate_word_boxes(t, cfg, 555);
  CHECK(!words.empty());
  for (const WordBox& w : words) {
    const Cell* cell = nullptr;
    for (const Cell& c : t.cells)
      if (c.id == w.cell_id) cell = &c;
    REQUIRE(cell != nullptr);
    Rect cb = bounding_box(cell->quad);
    CHECK(w.box.x0 >= cb.x0 - 1e-9);
    CHECK(w.box.y0 >= cb.y0 - 1e-9);
    CHECK(w.box.x1 <= cb.x1 + 1e-9);
    CHECK(w.box.y1 <= cb.y1 + 1e-9);
    CHECK(w.grid_row == cell->logical.start_row);
    CHECK(w.grid_col == cell->logical.start_col);
  }
}

TEST_CASE("words_per_cell_range [1,1] gives exactly one word per cell") {
  GenConfig cfg;
  cfg.seed = 19;
  cfg.words_min = cfg.words_max = 1;
  Table t = generate_table(cfg, 0);
  auto words = generate_word_boxes(t, cfg, 0);
  CHECK(words.size() == t.cells.size());
}

TEST_CASE("cluster_to_grid basics") {
  CHECK(cluster_to_grid({10, 11, 50, 52}, 20.0) ==
        std::vector<int>{0, 0, 1, 1});
  CHECK(cluster_to_grid({42.0}, 5.0) == std::vector<int>{0});
  // input order preserved
  CHECK(cluster_to_grid({50, 10, 52, 11}, 20.0) ==
        std::vector<int>{1, 0, 1, 0});
}

TEST_CASE("cluster_to_grid labels are monotone in sorted position") {
  std::vector<double> centers{5, 1, 9, 2, 14, 13};
  auto labels = cluster_to_grid(centers, 2.5);
  for (size_t i = 0; i < centers.size(); ++i)
    for (size_t j = 0; j < centers.size(); ++j)
      if (centers[i] < centers[j]) CHECK(labels[i] <= labels[j]);
}

TEST_CASE("block clustering recovers generator grid labels on >= 99% of words") {
  GenConfig cfg;
  cfg.seed = 29;
  cfg.span_prob = 0.1;
  int total = 0, agree = 0;
  for (int idx = 0; idx < 100; ++idx) {
    Table t = generate_table(cfg, idx);
    auto words = generate_word_boxes(t, cfg, 7000 + idx);
    auto clustered = words;
    relabel_words_by_clustering(clustered);
    for (size_t i = 0; i < words.size(); ++i) {
      ++total;
      if (words[i].grid_row == clustered[i].grid_row &&
          words[i].grid_col == clustered[i].grid_col)
        ++agree;
    }
  }
  CHECK(static_cast<double>(agree) / total >= 0.99);
}

TEST_CASE("ldp labels are signed grid differences") {
  GenConfig cfg;
  cfg.seed = 37;
  Table t = generate_table(cfg, 1);
  auto words = generate_word_boxes(t, cfg, 99);
  auto labels = ldp_labels(words, 64, 123);
  CHECK(!labels.empty());
  CHECK(labels.size() <= 64);
  std::set<std::pair<int, int>> seen;
  for (const LdpPairLabel& l : labels) {
    CHECK(l.row_dist == words[l.a].grid_row - words[l.b].grid_row);
    CHECK(l.col_dist == words[l.a].grid_col - words[l.b].grid_col);
    CHECK(seen.insert({l.a, l.b}).second);  // without replacement
    if (l.a == l.b) {
      CHECK(l.row_dist == 0);
      CHECK(l.col_dist == 0);
    }
  }
}

TEST_CASE("small jitter keeps IoU matching exact at 0.5") {
  GenConfig cfg;
  cfg.seed = 41;
  for (int idx = 0; idx < 25; ++idx) {
    Table t = generate_table(cfg, idx);
    Table moved = perturb_quads(t, 2.0, 31 + idx);
    MatchResult m = match_tables(moved, t, 0.5);
    CHECK(m.pairs.size() == t.cells.size());
    for (const MatchPair& p : m.pairs) CHECK(p.pred_id == p.gt_id);
  }
}
