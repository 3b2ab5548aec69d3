#include "tsr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tsr/rng.hpp"

namespace tsr {

std::vector<std::string> GenConfig::validate() const {
  std::vector<std::string> out;
  if (rows_min < 1 || rows_min > rows_max) out.push_back("rows range empty");
  if (cols_min < 1 || cols_min > cols_max) out.push_back("cols range empty");
  if (span_prob < 0.0 || span_prob >= 1.0)
    out.push_back("span_prob outside [0,1)");
  if (max_span < 1) out.push_back("max_span < 1");
  if (jitter_sigma < 0.0) out.push_back("jitter_sigma < 0");
  if (image_width <= 0.0 || image_height <= 0.0)
    out.push_back("image size not positive");
  if (cell_pad < 0.0) out.push_back("cell_pad < 0");
  if (words_min < 1 || words_min > words_max)
    out.push_back("words range empty");
  return out;
}

namespace {

// Boundary positions for n segments with relative widths drawn from
// [0.6, 1.6], scaled to cover [margin, extent - margin].
std::vector<double> draw_boundaries(Rng& rng, int n, double extent,
                                    double margin) {
  std::vector<double> widths(n);
  double total = 0.0;
  for (double& w : widths) {
    w = rng.uniform(0.6, 1.6);
    total += w;
  }
  std::vector<double> bounds(n + 1);
  bounds[0] = margin;
  double usable = extent - 2.0 * margin;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += widths[i];
    bounds[i + 1] = margin + usable * (acc / total);
  }
  return bounds;
}

std::string random_token(Rng& rng) {
  int len = static_cast<int>(rng.uniform_int(3, 8));
  std::string tok(len, 'a');
  for (char& ch : tok)
    ch = static_cast<char>('a' + rng.uniform_int(0, 25));
  return tok;
}

}  // namespace

Table generate_table(const GenConfig& cfg, int64_t index) {
  Rng rng(cfg.seed, static_cast<uint64_t>(index));
  Table t;
  t.n_rows = static_cast<int>(rng.uniform_int(cfg.rows_min, cfg.rows_max));
  t.n_cols = static_cast<int>(rng.uniform_int(cfg.cols_min, cfg.cols_max));
  t.image_width = cfg.image_width;
  t.image_height = cfg.image_height;

  double margin_x = cfg.image_width * 0.04;
  double margin_y = cfg.image_height * 0.04;
  auto xs = draw_boundaries(rng, t.n_cols, cfg.image_width, margin_x);
  auto ys = draw_boundaries(rng, t.n_rows, cfg.image_height, margin_y);

  // Slot occupancy; spans grow right/down from their anchor slot and are
  // clipped against anything already taken.
  std::vector<std::vector<int>> grid(t.n_rows, std::vector<int>(t.n_cols, -1));
  int next_id = 0;
  for (int r = 0; r < t.n_rows; ++r) {
    for (int c = 0; c < t.n_cols; ++c) {
      if (grid[r][c] != -1) continue;
      int span_r = 1, span_c = 1;
      if (cfg.span_prob > 0.0 && rng.uniform() < cfg.span_prob) {
        span_r = static_cast<int>(rng.uniform_int(1, cfg.max_span));
        span_c = static_cast<int>(rng.uniform_int(1, cfg.max_span));
        span_r = std::min(span_r, t.n_rows - r);
        span_c = std::min(span_c, t.n_cols - c);
        // Shrink the column reach until the full footprint is free.
        for (int cc = c; cc < c + span_c; ++cc) {
          if (grid[r][cc] != -1) {
            span_c = cc - c;
            break;
          }
        }
        if (span_c < 1) span_c = 1;
        bool free_below = true;
        for (int rr = r; rr < r + span_r && free_below; ++rr)
          for (int cc = c; cc < c + span_c; ++cc)
            if (grid[rr][cc] != -1) {
              free_below = false;
              break;
            }
        if (!free_below) span_r = 1;
      }
      Cell cell;
      cell.id = next_id++;
      cell.logical = {r, r + span_r - 1, c, c + span_c - 1};
      Rect box{xs[c] + cfg.cell_pad, ys[r] + cfg.cell_pad,
               xs[c + span_c] - cfg.cell_pad, ys[r + span_r] - cfg.cell_pad};
      cell.quad = SpatialQuad::from_rect(box);
      for (int rr = r; rr < r + span_r; ++rr)
        for (int cc = c; cc < c + span_c; ++cc) grid[rr][cc] = cell.id;
      t.cells.push_back(std::move(cell));
    }
  }

  for (Cell& cell : t.cells) {
    int n_words = static_cast<int>(rng.uniform_int(cfg.words_min, cfg.words_max));
    std::ostringstream os;
    for (int w = 0; w < n_words; ++w) {
      if (w) os << ' ';
      os << random_token(rng);
    }
    cell.text = os.str();
  }
  return t;
}

Table perturb_quads(const Table& t, double sigma, uint64_t seed) {
  Table out = t;
  if (sigma == 0.0) return out;
  Rng rng(seed, 0xabcd1234ULL);
  for (Cell& c : out.cells) {
    for (Point& p : c.quad.corners) {
      p.x = std::clamp(p.x + rng.normal(0.0, sigma), 0.0, t.image_width);
      p.y = std::clamp(p.y + rng.normal(0.0, sigma), 0.0, t.image_height);
    }
  }
  return out;
}

std::vector<WordBox> generate_word_boxes(const Table& t, const GenConfig& cfg,
                                         uint64_t seed) {
  Rng rng(seed, 0x77a9f3ULL);
  std::vector<WordBox> out;
  for (const Cell& c : t.cells) {
    Rect cell_box = bounding_box(c.quad);
    int n_words;
    if (c.text && !c.text->empty()) {
      n_words = 1 + static_cast<int>(
                        std::count(c.text->begin(), c.text->end(), ' '));
    } else {
      n_words = static_cast<int>(rng.uniform_int(cfg.words_min, cfg.words_max));
    }
    double pad_x = std::max(1.0, cell_box.width() * 0.08);
    double pad_y = std::max(1.0, cell_box.height() * 0.2);
    Rect inner{cell_box.x0 + pad_x, cell_box.y0 + pad_y, cell_box.x1 - pad_x,
               cell_box.y1 - pad_y};
    if (inner.width() <= 0.0 || inner.height() <= 0.0) {
      inner = cell_box;
      n_words = 1;
    }
    double gap = inner.width() * 0.05;
    double slot_w = (inner.width() - gap * (n_words - 1)) / n_words;
    if (slot_w <= 0.0) {
      n_words = 1;
      slot_w = inner.width();
      gap = 0.0;
    }
    for (int w = 0; w < n_words; ++w) {
      WordBox wb;
      double x0 = inner.x0 + w * (slot_w + gap);
      double width = slot_w * rng.uniform(0.6, 1.0);
      wb.box = Rect{x0, inner.y0, x0 + width, inner.y1};
      wb.grid_row = c.logical.start_row;
      wb.grid_col = c.logical.start_col;
      wb.cell_id = c.id;
      out.push_back(wb);
    }
  }
  return out;
}

std::vector<int> cluster_to_grid(const std::vector<double>& centers,
                                 double gap_threshold) {
  std::vector<size_t> order(centers.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return centers[a] < centers[b]; });
  std::vector<int> labels(centers.size(), 0);
  int idx = 0;
  for (size_t k = 0; k < order.size(); ++k) {
    if (k > 0 && centers[order[k]] - centers[order[k - 1]] > gap_threshold)
      ++idx;
    labels[order[k]] = idx;
  }
  return labels;
}

void relabel_words_by_clustering(std::vector<WordBox>& words) {
  if (words.empty()) return;
  // One block per cell: the union box of its words.
  std::vector<int> cell_ids;
  for (const WordBox& w : words) cell_ids.push_back(w.cell_id);
  std::sort(cell_ids.begin(), cell_ids.end());
  cell_ids.erase(std::unique(cell_ids.begin(), cell_ids.end()), cell_ids.end());

  std::vector<Rect> blocks(cell_ids.size());
  std::vector<bool> started(cell_ids.size(), false);
  auto block_index = [&](int cell_id) {
    return static_cast<size_t>(
        std::lower_bound(cell_ids.begin(), cell_ids.end(), cell_id) -
        cell_ids.begin());
  };
  for (const WordBox& w : words) {
    size_t bi = block_index(w.cell_id);
    if (!started[bi]) {
      blocks[bi] = w.box;
      started[bi] = true;
    } else {
      blocks[bi].x0 = std::min(blocks[bi].x0, w.box.x0);
      blocks[bi].y0 = std::min(blocks[bi].y0, w.box.y0);
      blocks[bi].x1 = std::max(blocks[bi].x1, w.box.x1);
      blocks[bi].y1 = std::max(blocks[bi].y1, w.box.y1);
    }
  }

  std::vector<double> heights;
  for (const Rect& b : blocks) heights.push_back(b.height());
  std::sort(heights.begin(), heights.end());
  double median_h = heights[heights.size() / 2];
  double threshold = 0.6 * median_h;

  std::vector<double> ys, xs;
  for (const Rect& b : blocks) {
    ys.push_back((b.y0 + b.y1) * 0.5);
    xs.push_back(b.x0);
  }
  auto row_labels = cluster_to_grid(ys, threshold);
  auto col_labels = cluster_to_grid(xs, threshold);

  for (WordBox& w : words) {
    size_t bi = block_index(w.cell_id);
    w.grid_row = row_labels[bi];
    w.grid_col = col_labels[bi];
  }
}

std::vector<LdpPairLabel> ldp_labels(const std::vector<WordBox>& words,
                                     int max_pairs, uint64_t seed) {
  int64_t n = static_cast<int64_t>(words.size());
  int64_t total = n * n;
  std::vector<int64_t> chosen;
  if (total <= max_pairs) {
    chosen.resize(total);
    std::iota(chosen.begin(), chosen.end(), int64_t{0});
  } else {
    // Partial Fisher-Yates over pair codes, tracking displaced entries.
    Rng rng(seed, 0x1d91ULL);
    std::vector<std::pair<int64_t, int64_t>> moved;  // sparse permutation
    auto lookup = [&](int64_t i) {
      for (const auto& [k, v] : moved)
        if (k == i) return v;
      return i;
    };
    auto store = [&](int64_t i, int64_t v) {
      for (auto& [k, old] : moved)
        if (k == i) {
          old = v;
          return;
        }
      moved.emplace_back(i, v);
    };
    for (int k = 0; k < max_pairs; ++k) {
      int64_t j = rng.uniform_int(k, total - 1);
      int64_t vj = lookup(j);
      int64_t vk = lookup(k);
      store(j, vk);
      chosen.push_back(vj);
    }
  }
  std::vector<LdpPairLabel> out;
  out.reserve(chosen.size());
  for (int64_t code : chosen) {
    LdpPairLabel lbl;
    lbl.a = static_cast<int>(code / n);
    lbl.b = static_cast<int>(code % n);
    lbl.row_dist = words[lbl.a].grid_row - words[lbl.b].grid_row;
    lbl.col_dist = words[lbl.a].grid_col - words[lbl.b].grid_col;
    out.push_back(lbl);
  }
  return out;
}

}  // namespace tsr
