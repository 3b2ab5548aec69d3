#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace oracles {

std::vector<tsr::AdjacencyTriplet> rasterized_adjacency(const tsr::Table& t) {
  std::vector<std::vector<int>> grid(t.n_rows,
                                     std::vector<int>(t.n_cols, -1));
  for (const tsr::Cell& c : t.cells)
    for (int r = c.logical.start_row; r <= c.logical.end_row; ++r)
      for (int cc = c.logical.start_col; cc <= c.logical.end_col; ++cc)
        grid[r][cc] = c.id;

  std::set<tsr::AdjacencyTriplet> found;
  for (int r = 0; r < t.n_rows; ++r) {
    for (int c = 0; c < t.n_cols; ++c) {
      if (grid[r][c] == -1) continue;
      if (c + 1 < t.n_cols && grid[r][c + 1] != -1 &&
          grid[r][c + 1] != grid[r][c]) {
        found.insert({std::min(grid[r][c], grid[r][c + 1]),
                      std::max(grid[r][c], grid[r][c + 1]),
                      tsr::Axis::horizontal});
      }
      if (r + 1 < t.n_rows && grid[r + 1][c] != -1 &&
          grid[r + 1][c] != grid[r][c]) {
        found.insert({std::min(grid[r][c], grid[r + 1][c]),
                      std::max(grid[r][c], grid[r + 1][c]),
                      tsr::Axis::vertical});
      }
    }
  }
  return {found.begin(), found.end()};
}

std::vector<std::vector<int>> partition_by_sorting(const tsr::Table& t) {
  std::vector<std::vector<std::pair<int, int>>> buckets(t.n_rows);
  for (const tsr::Cell& c : t.cells)
    buckets[c.logical.start_row].push_back({c.logical.start_col, c.id});
  std::vector<std::vector<int>> out(t.n_rows);
  for (int r = 0; r < t.n_rows; ++r) {
    auto& b = buckets[r];
    // insertion sort by start_col
    for (size_t i = 1; i < b.size(); ++i) {
      auto key = b[i];
      size_t j = i;
      while (j > 0 && b[j - 1].first > key.first) {
        b[j] = b[j - 1];
        --j;
      }
      b[j] = key;
    }
    for (const auto& [col, id] : b) out[r].push_back(id);
  }
  return out;
}

std::vector<double> naive_matmul(const std::vector<double>& a,
                                 const std::vector<double>& b, int n, int k,
                                 int m) {
  std::vector<double> out(static_cast<size_t>(n) * m, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      double acc = 0.0;
      for (int p = 0; p < k; ++p) acc += a[i * k + p] * b[p * m + j];
      out[i * m + j] = acc;
    }
  return out;
}

namespace {

struct Forest {
  std::vector<int> roots;  // node ids, left to right
};

std::string forest_key(const Forest& f) {
  std::ostringstream os;
  for (int r : f.roots) os << r << ",";
  return os.str();
}

int subtree_size(const tsr::TedsTree& t, int node) {
  int n = 1;
  for (int c : t.nodes[node].children) n += subtree_size(t, c);
  return n;
}

int forest_size(const tsr::TedsTree& t, const Forest& f) {
  int n = 0;
  for (int r : f.roots) n += subtree_size(t, r);
  return n;
}

// Removes the rightmost root node, splicing its children in place.
Forest drop_rightmost_node(const tsr::TedsTree& t, const Forest& f) {
  Forest out;
  out.roots.assign(f.roots.begin(), f.roots.end() - 1);
  for (int c : t.nodes[f.roots.back()].children) out.roots.push_back(c);
  return out;
}

// Removes the whole rightmost subtree.
Forest drop_rightmost_tree(const Forest& f) {
  Forest out;
  out.roots.assign(f.roots.begin(), f.roots.end() - 1);
  return out;
}

double ted_rec(const tsr::TedsTree& ta, const tsr::TedsTree& tb,
               const Forest& fa, const Forest& fb, bool use_text,
               std::map<std::pair<std::string, std::string>, double>& memo) {
  if (fa.roots.empty()) return forest_size(tb, fb);
  if (fb.roots.empty()) return forest_size(ta, fa);
  auto key = std::make_pair(forest_key(fa), forest_key(fb));
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;

  int v = fa.roots.back();
  int w = fb.roots.back();
  double del =
      ted_rec(ta, tb, drop_rightmost_node(ta, fa), fb, use_text, memo) + 1.0;
  double ins =
      ted_rec(ta, tb, fa, drop_rightmost_node(tb, fb), use_text, memo) + 1.0;
  Forest va{ta.nodes[v].children};
  Forest wb{tb.nodes[w].children};
  double match =
      ted_rec(ta, tb, drop_rightmost_tree(fa), drop_rightmost_tree(fb),
              use_text, memo) +
      ted_rec(ta, tb, va, wb, use_text, memo) +
      tsr::substitution_cost(ta.nodes[v], tb.nodes[w], use_text);
  double best = std::min({del, ins, match});
  memo[key] = best;
  return best;
}

}  // namespace

double brute_force_ted(const tsr::TedsTree& a, const tsr::TedsTree& b,
                       bool use_text) {
  std::map<std::pair<std::string, std::string>, double> memo;
  Forest fa{{a.root}};
  Forest fb{{b.root}};
  return ted_rec(a, b, fa, fb, use_text, memo);
}

double reference_bleu(const std::vector<std::string>& candidate,
                      const std::vector<std::string>& reference) {
  if (candidate.empty()) return 0.0;
  std::vector<double> precisions;
  for (int order = 1; order <= 4; ++order) {
    std::map<std::string, int> ref_counts;
    for (int i = 0; i + order <= static_cast<int>(reference.size()); ++i) {
      std::string key;
      for (int k = 0; k < order; ++k) key += reference[i + k] + "\x01";
      ++ref_counts[key];
    }
    int total = 0, matched = 0;
    std::map<std::string, int> used;
    for (int i = 0; i + order <= static_cast<int>(candidate.size()); ++i) {
      std::string key;
      for (int k = 0; k < order; ++k) key += candidate[i + k] + "\x01";
      ++total;
      auto it = ref_counts.find(key);
      if (it != ref_counts.end() && used[key] < it->second) {
        ++used[key];
        ++matched;
      }
    }
    if (total == 0 || matched == 0) return 0.0;
    precisions.push_back(static_cast<double>(matched) / total);
  }
  double geo = 1.0;
  for (double p : precisions) geo *= p;
  geo = std::pow(geo, 0.25);
  double c = static_cast<double>(candidate.size());
  double r = static_cast<double>(reference.size());
  double bp = c >= r ? 1.0 : std::exp(1.0 - r / c);
  return bp * geo;
}

namespace {

void assign_rec(const std::vector<std::vector<double>>& iou_matrix,
                size_t pred_i, std::vector<int>& gt_used,
                std::vector<int>& current, double current_iou,
                size_t current_count, std::vector<int>& best,
                double& best_iou, size_t& best_count) {
  size_t n_pred = iou_matrix.size();
  if (pred_i == n_pred) {
    if (current_count > best_count ||
        (current_count == best_count && current_iou > best_iou)) {
      best = current;
      best_iou = current_iou;
      best_count = current_count;
    }
    return;
  }
  // skip this pred
  current[pred_i] = -1;
  assign_rec(iou_matrix, pred_i + 1, gt_used, current, current_iou,
             current_count, best, best_iou, best_count);
  for (size_t j = 0; j < iou_matrix[pred_i].size(); ++j) {
    if (gt_used[j] || iou_matrix[pred_i][j] <= 0.0) continue;
    gt_used[j] = 1;
    current[pred_i] = static_cast<int>(j);
    assign_rec(iou_matrix, pred_i + 1, gt_used, current,
               current_iou + iou_matrix[pred_i][j], current_count + 1, best,
               best_iou, best_count);
    gt_used[j] = 0;
    current[pred_i] = -1;
  }
}

}  // namespace

tsr::MatchResult best_assignment(const std::vector<tsr::SpatialQuad>& pred,
                                 const std::vector<tsr::SpatialQuad>& gt,
                                 double iou_threshold) {
  std::vector<std::vector<double>> iou_matrix(
      pred.size(), std::vector<double>(gt.size(), 0.0));
  for (size_t i = 0; i < pred.size(); ++i)
    for (size_t j = 0; j < gt.size(); ++j) {
      double v = tsr::iou(tsr::bounding_box(pred[i]), tsr::bounding_box(gt[j]));
      iou_matrix[i][j] = v > iou_threshold ? v : 0.0;
    }
  std::vector<int> gt_used(gt.size(), 0), current(pred.size(), -1), best;
  double best_iou = -1.0;
  size_t best_count = 0;
  assign_rec(iou_matrix, 0, gt_used, current, 0.0, 0, best, best_iou,
             best_count);

  tsr::MatchResult out;
  std::vector<bool> gt_matched(gt.size(), false);
  for (size_t i = 0; i < best.size(); ++i) {
    if (best[i] >= 0) {
      out.pairs.push_back({static_cast<int>(i), best[i],
                           iou_matrix[i][best[i]]});
      gt_matched[best[i]] = true;
    } else {
      out.unmatched_pred.push_back(static_cast<int>(i));
    }
  }
  for (size_t j = 0; j < gt.size(); ++j)
    if (!gt_matched[j]) out.unmatched_gt.push_back(static_cast<int>(j));
  return out;
}

}  // namespace oracles
