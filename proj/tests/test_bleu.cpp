#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "tsr/bleu.hpp"
#include "tsr/rng.hpp"

using namespace tsr;

namespace {

std::vector<std::string> tokens(std::initializer_list<const char*> xs) {
  return {xs.begin(), xs.end()};
}

}  // namespace

TEST_CASE("bleu of identical sequences is 1") {
  auto seq = tokens({"a", "b", "c", "d", "e"});
  CHECK(bleu(seq, seq) == doctest::Approx(1.0));
}

TEST_CASE("bleu of empty candidate is 0") {
  CHECK(bleu({}, tokens({"a", "b"})) == 0.0);
}

TEST_CASE("bleu with zero n-gram precision is 0 (no smoothing)") {
  // 3-token candidate has no 4-grams at all.
  CHECK(bleu(tokens({"a", "b", "c"}), tokens({"a", "b", "c"})) == 0.0);
  // disjoint vocabulary
  CHECK(bleu(tokens({"x", "y", "z", "w", "v"}),
             tokens({"a", "b", "c", "d", "e"})) == 0.0);
}

TEST_CASE("bleu hand-computed: one substitution in 20 tokens") {
  std::vector<std::string> ref, cand;
  for (int i = 0; i < 20; ++i) {
    ref.push_back("t" + std::to_string(i));
    cand.push_back("t" + std::to_string(i));
  }
  cand[10] = "x";  // interior substitution
  // p1=19/20, p2=17/19, p3=15/18, p4=13/17, BP=1
  double expected = std::pow((19.0 / 20.0) * (17.0 / 19.0) * (15.0 / 18.0) *
                                 (13.0 / 17.0),
                             0.25);
  CHECK(bleu(cand, ref) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(bleu(cand, ref) ==
        doctest::Approx(oracles::reference_bleu(cand, ref)).epsilon(1e-12));
}

TEST_CASE("bleu brevity penalty on short candidates") {
  std::vector<std::string> ref, cand;
  for (int i = 0; i < 10; ++i) ref.push_back("t" + std::to_string(i));
  for (int i = 0; i < 8; ++i) cand.push_back("t" + std::to_string(i));
  double expected = std::exp(1.0 - 10.0 / 8.0);  // all precisions are 1
  CHECK(bleu(cand, ref) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("bleu matches reference implementation on random token noise") {
  Rng rng(55);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::string> ref, cand;
    int n = 5 + static_cast<int>(rng.uniform_int(0, 25));
    for (int i = 0; i < n; ++i)
      ref.push_back("w" + std::to_string(rng.uniform_int(0, 9)));
    cand = ref;
    int edits = static_cast<int>(rng.uniform_int(0, 4));
    for (int e = 0; e < edits && !cand.empty(); ++e) {
      size_t pos = static_cast<size_t>(rng.uniform_int(0, cand.size() - 1));
      cand[pos] = "w" + std::to_string(rng.uniform_int(0, 9));
    }
    CHECK(bleu(cand, ref) ==
          doctest::Approx(oracles::reference_bleu(cand, ref)).epsilon(1e-12));
  }
}

TEST_CASE("tokenize_markup splits tags and words") {
  auto toks = tokenize_markup(
      "<tr><td rowspan=\"1\" colspan=\"1\">hello world</td></tr>");
  REQUIRE(toks.size() == 6);
  CHECK(toks[0] == "<tr>");
  CHECK(toks[1] == "<td rowspan=\"1\" colspan=\"1\">");
  CHECK(toks[2] == "hello");
  CHECK(toks[3] == "world");
  CHECK(toks[4] == "</td>");
  CHECK(toks[5] == "</tr>");
}
