#pragma once

#include <string>
#include <vector>

namespace tsr {

struct TedsNode {
  std::string tag;  // "table", "tr" or "td"
  int rowspan = 0;
  int colspan = 0;
  std::string text;
  std::vector<int> children;
};

struct TedsTree {
  std::vector<TedsNode> nodes;
  int root = 0;
  size_t size() const { return nodes.size(); }
};

/// root -> tr -> td tree of the markup subset; td nodes carry rowspan,
/// colspan and text. Throws MarkupError on parse failure.
TedsTree markup_to_tree(const std::string& markup);

/// Levenshtein distance divided by the longer length; 0 for two empty
/// strings.
double normalized_edit_distance(const std::string& a, const std::string& b);

/// Cost model shared by the Zhang-Shasha implementation and the test
/// oracle: insert/delete cost 1; substitution 0 for identical tag+attributes
/// and 1 otherwise. In text mode the substitution cost of two td nodes with
/// equal attributes is the normalized edit distance of their texts.
double substitution_cost(const TedsNode& a, const TedsNode& b, bool use_text);

/// Exact tree edit distance by the Zhang-Shasha keyroot dynamic program.
double tree_edit_distance(const TedsTree& a, const TedsTree& b, bool use_text);

/// 1 - TED / max(|pred|, |gt|), clamped to [0,1].
double teds(const std::string& pred_markup, const std::string& gt_markup,
            bool use_text = false);

}  // namespace tsr
