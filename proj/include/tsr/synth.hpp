#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsr/table.hpp"

namespace tsr {

struct GenConfig {
  int rows_min = 2, rows_max = 8;
  int cols_min = 2, cols_max = 8;
  double span_prob = 0.1;  // chance that a fresh slot starts a merged span
  int max_span = 3;
  double jitter_sigma = 0.0;  // px noise applied to the input quads
  double image_width = 640.0, image_height = 480.0;
  double cell_pad = 2.0;
  int words_min = 1, words_max = 3;
  uint64_t seed = 0;

  /// Empty when all invariants hold, otherwise one message per problem.
  std::vector<std::string> validate() const;
};

struct WordBox {
  Rect box;
  int grid_row = 0;
  int grid_col = 0;
  int cell_id = 0;
};

struct LdpPairLabel {
  int a = 0;
  int b = 0;
  int row_dist = 0;  // grid_row(a) - grid_row(b)
  int col_dist = 0;  // grid_col(a) - grid_col(b)
};

/// Deterministic function of (cfg.seed, index). Output always passes
/// validate_table; every grid slot is covered. Cell text is filled with
/// synthetic word tokens.
Table generate_table(const GenConfig& cfg, int64_t index);

/// Adds N(0, sigma^2) noise to every corner coordinate, clamped to image
/// bounds. Logical labels are untouched.
Table perturb_quads(const Table& t, double sigma, uint64_t seed);

/// Lays 1..k word rectangles left-to-right inside each cell quad. Word
/// labels inherit the cell's (start_row, start_col). Count matches the
/// cell's text tokens when text is present.
std::vector<WordBox> generate_word_boxes(const Table& t, const GenConfig& cfg,
                                         uint64_t seed);

/// 1-D gap clustering: sort the centers, bump the index whenever the gap to
/// the previous sorted center exceeds gap_threshold, return indices in the
/// original order.
std::vector<int> cluster_to_grid(const std::vector<double>& centers,
                                 double gap_threshold);

/// Reassigns word grid labels by clustering per-cell word blocks instead of
/// trusting the generator: block centers (y) give rows, block left edges (x)
/// give columns, threshold 0.6 x median block height.
void relabel_words_by_clustering(std::vector<WordBox>& words);

/// Up to max_pairs ordered pairs sampled uniformly without replacement
/// (all pairs when the total count fits). Labels are signed grid-index
/// differences a - b.
std::vector<LdpPairLabel> ldp_labels(const std::vector<WordBox>& words,
                                     int max_pairs, uint64_t seed);

}  // namespace tsr
