#pragma once

#include <string>
#include <vector>

namespace tsr {

/// BLEU-4 against a single reference: geometric mean of clipped 1..4-gram
/// precisions times the brevity penalty. No smoothing, so any zero n-gram
/// precision gives 0.
double bleu(const std::vector<std::string>& candidate,
            const std::vector<std::string>& reference);

/// Splits a markup string into comparison tokens: each tag becomes one
/// token, each whitespace-separated text word one token.
std::vector<std::string> tokenize_markup(const std::string& markup);

}  // namespace tsr
