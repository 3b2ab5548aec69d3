#include "tsr/bleu.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

namespace tsr {

namespace {

constexpr int kMaxOrder = 4;

std::map<std::vector<std::string>, int> ngram_counts(
    const std::vector<std::string>& tokens, int order) {
  std::map<std::vector<std::string>, int> counts;
  if (static_cast<int>(tokens.size()) < order) return counts;
  for (size_t i = 0; i + order <= tokens.size(); ++i) {
    std::vector<std::string> gram(tokens.begin() + i,
                                  tokens.begin() + i + order);
    ++counts[gram];
  }
  return counts;
}

}  // namespace

double bleu(const std::vector<std::string>& candidate,
            const std::vector<std::string>& reference) {
  if (candidate.empty()) return 0.0;
  double log_precision_sum = 0.0;
  for (int order = 1; order <= kMaxOrder; ++order) {
    auto cand = ngram_counts(candidate, order);
    auto ref = ngram_counts(reference, order);
    long total = 0, clipped = 0;
    for (const auto& [gram, count] : cand) {
      total += count;
      auto it = ref.find(gram);
      if (it != ref.end()) clipped += std::min(count, it->second);
    }
    if (total == 0 || clipped == 0) return 0.0;
    log_precision_sum += std::log(static_cast<double>(clipped) / total);
  }
  double c = static_cast<double>(candidate.size());
  double r = static_cast<double>(reference.size());
  double brevity = c >= r ? 1.0 : std::exp(1.0 - r / c);
  return brevity * std::exp(log_precision_sum / kMaxOrder);
}

std::vector<std::string> tokenize_markup(const std::string& markup) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < markup.size()) {
    if (markup[i] == '<') {
      size_t close = markup.find('>', i);
      if (close == std::string::npos) {
        tokens.push_back(markup.substr(i));
        break;
      }
      tokens.push_back(markup.substr(i, close - i + 1));
      i = close + 1;
    } else if (std::isspace(static_cast<unsigned char>(markup[i]))) {
      ++i;
    } else {
      size_t start = i;
      while (i < markup.size() && markup[i] != '<' &&
             !std::isspace(static_cast<unsigned char>(markup[i])))
        ++i;
      tokens.push_back(markup.substr(start, i - start));
    }
  }
  return tokens;
}

}  // namespace tsr
