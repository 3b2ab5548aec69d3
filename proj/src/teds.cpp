#include "tsr/teds.hpp"

#include <algorithm>
#include <cstddef>

#include "tsr/algebra.hpp"

namespace tsr {

TedsTree markup_to_tree(const std::string& markup) {
  ParsedMarkup parsed = parse_markup_full(markup);
  TedsTree tree;
  tree.nodes.push_back({"table", 0, 0, "", {}});
  for (const auto& group : parsed.tr_groups) {
    int tr_idx = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({"tr", 0, 0, "", {}});
    tree.nodes[0].children.push_back(tr_idx);
    for (int cell_idx : group) {
      const ParsedCell& c = parsed.cells[cell_idx];
      int td_idx = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back({"td", c.rowspan, c.colspan, c.text, {}});
      tree.nodes[tr_idx].children.push_back(td_idx);
    }
  }
  return tree;
}

double normalized_edit_distance(const std::string& a, const std::string& b) {
  if (a.empty() && b.empty()) return 0.0;
  size_t n = a.size(), m = b.size();
  std::vector<size_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = j;
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= m; ++j) {
      size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[m]) / static_cast<double>(std::max(n, m));
}

double substitution_cost(const TedsNode& a, const TedsNode& b, bool use_text) {
  bool attrs_equal =
      a.tag == b.tag && a.rowspan == b.rowspan && a.colspan == b.colspan;
  if (!attrs_equal) return 1.0;
  if (use_text && a.tag == "td") return normalized_edit_distance(a.text, b.text);
  return 0.0;
}

namespace {

// Postorder view of a TedsTree: nodes renumbered 0..n-1 in postorder,
// leftmost-leaf indices and keyroots precomputed.
struct PostorderTree {
  std::vector<const TedsNode*> nodes;  // by postorder index
  std::vector<int> lml;                // leftmost leaf per postorder index
  std::vector<int> keyroots;           // ascending
};

void postorder_visit(const TedsTree& t, int node, PostorderTree& out,
                     std::vector<int>& lml_out) {
  int leftmost = -1;
  for (size_t k = 0; k < t.nodes[node].children.size(); ++k) {
    int child = t.nodes[node].children[k];
    postorder_visit(t, child, out, lml_out);
    if (k == 0) leftmost = lml_out[child];
  }
  int idx = static_cast<int>(out.nodes.size());
  out.nodes.push_back(&t.nodes[node]);
  lml_out[node] = leftmost == -1 ? idx : leftmost;
  out.lml.push_back(lml_out[node]);
}

PostorderTree build_postorder(const TedsTree& t) {
  PostorderTree out;
  std::vector<int> lml_by_node(t.nodes.size(), -1);
  postorder_visit(t, t.root, out, lml_by_node);
  int n = static_cast<int>(out.nodes.size());
  std::vector<bool> seen(n, false);
  for (int i = n - 1; i >= 0; --i) {
    if (!seen[out.lml[i]]) {
      seen[out.lml[i]] = true;
      out.keyroots.push_back(i);
    }
  }
  std::sort(out.keyroots.begin(), out.keyroots.end());
  return out;
}

}  // namespace

double tree_edit_distance(const TedsTree& ta, const TedsTree& tb,
                          bool use_text) {
  PostorderTree a = build_postorder(ta);
  PostorderTree b = build_postorder(tb);
  int n = static_cast<int>(a.nodes.size());
  int m = static_cast<int>(b.nodes.size());
  std::vector<std::vector<double>> td(n, std::vector<double>(m, 0.0));

  std::vector<std::vector<double>> fd;
  for (int i : a.keyroots) {
    for (int j : b.keyroots) {
      int ioff = a.lml[i];
      int joff = b.lml[j];
      int rows = i - ioff + 2;
      int cols = j - joff + 2;
      fd.assign(rows, std::vector<double>(cols, 0.0));
      for (int x = 1; x < rows; ++x) fd[x][0] = fd[x - 1][0] + 1.0;
      for (int y = 1; y < cols; ++y) fd[0][y] = fd[0][y - 1] + 1.0;
      for (int x = 1; x < rows; ++x) {
        int ai = x + ioff - 1;
        for (int y = 1; y < cols; ++y) {
          int bj = y + joff - 1;
          if (a.lml[ai] == ioff && b.lml[bj] == joff) {
            fd[x][y] = std::min(
                {fd[x - 1][y] + 1.0, fd[x][y - 1] + 1.0,
                 fd[x - 1][y - 1] +
                     substitution_cost(*a.nodes[ai], *b.nodes[bj], use_text)});
            td[ai][bj] = fd[x][y];
          } else {
            int p = a.lml[ai] - ioff;
            int q = b.lml[bj] - joff;
            fd[x][y] = std::min({fd[x - 1][y] + 1.0, fd[x][y - 1] + 1.0,
                                 fd[p][q] + td[ai][bj]});
          }
        }
      }
    }
  }
  return td[n - 1][m - 1];
}

double teds(const std::string& pred_markup, const std::string& gt_markup,
            bool use_text) {
  TedsTree a = markup_to_tree(pred_markup);
  TedsTree b = markup_to_tree(gt_markup);
  double ted = tree_edit_distance(a, b, use_text);
  double denom = static_cast<double>(std::max(a.size(), b.size()));
  if (denom == 0.0) return 1.0;
  double score = 1.0 - ted / denom;
  return std::clamp(score, 0.0, 1.0);
}

}  // namespace tsr
