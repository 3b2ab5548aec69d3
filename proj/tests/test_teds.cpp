#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "tsr/algebra.hpp"
#include "tsr/rng.hpp"
#include "tsr/synth.hpp"
#include "tsr/teds.hpp"

using namespace tsr;

namespace {

// Random <tr>/<td> markup with <= max_nodes tree nodes (root included).
std::string random_markup(Rng& rng, int max_nodes) {
  int budget = max_nodes - 1;  // root taken
  std::string out;
  while (budget >= 2) {  // a tr plus at least one td
    --budget;            // tr node
    out += "<tr>";
    int tds = static_cast<int>(rng.uniform_int(1, std::max(1, budget)));
    for (int i = 0; i < tds && budget > 0; ++i) {
      --budget;
      int rs = static_cast<int>(rng.uniform_int(1, 2));
      int cs = static_cast<int>(rng.uniform_int(1, 2));
      out += "<td rowspan=\"" + std::to_string(rs) + "\" colspan=\"" +
             std::to_string(cs) + "\">";
      if (rng.uniform() < 0.5) out += "w" + std::to_string(rng.uniform_int(0, 4));
      out += "</td>";
    }
    out += "</tr>";
    if (rng.uniform() < 0.4) break;
  }
  if (out.empty()) out = "<tr><td rowspan=\"1\" colspan=\"1\"></td></tr>";
  return out;
}

}  // namespace

TEST_CASE("teds of identical markups is 1") {
  Table t = helpers::make_table(2, 2, {{0, 0, 0, 1}, {1, 1, 0, 0}, {1, 1, 1, 1}});
  std::string m = to_markup(t);
  CHECK(teds(m, m, false) == doctest::Approx(1.0));
  CHECK(teds(m, m, true) == doctest::Approx(1.0));
}

TEST_CASE("teds: one colspan change in a 7-node tree costs 1/7") {
  Table gt = helpers::grid_table(2, 2);  // 1 root + 2 tr + 4 td = 7 nodes
  std::string gt_markup = to_markup(gt);
  CHECK(markup_to_tree(gt_markup).size() == 7);

  std::string pred_markup = gt_markup;
  size_t pos = pred_markup.find("colspan=\"1\"");
  pred_markup.replace(pos, 11, "colspan=\"2\"");
  CHECK(teds(pred_markup, gt_markup, false) == doctest::Approx(1.0 - 1.0 / 7.0));
}

TEST_CASE("teds agrees with brute-force oracle on random tree pairs") {
  Rng rng(31);
  for (int trial = 0; trial < 120; ++trial) {
    std::string ma = random_markup(rng, 10);
    std::string mb = random_markup(rng, 10);
    TedsTree ta = markup_to_tree(ma);
    TedsTree tb = markup_to_tree(mb);
    for (bool use_text : {false, true}) {
      double zs = tree_edit_distance(ta, tb, use_text);
      double brute = oracles::brute_force_ted(ta, tb, use_text);
      CHECK(zs == doctest::Approx(brute).epsilon(1e-12));
    }
    CHECK(teds(ma, ma, false) == doctest::Approx(1.0));
  }
}

TEST_CASE("teds is symmetric and in [0,1]") {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    std::string ma = random_markup(rng, 10);
    std::string mb = random_markup(rng, 10);
    double ab = teds(ma, mb, false);
    double ba = teds(mb, ma, false);
    CHECK(ab == doctest::Approx(ba));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("teds text mode uses normalized text distance") {
  std::string a = "<tr><td rowspan=\"1\" colspan=\"1\">abcd</td></tr>";
  std::string b = "<tr><td rowspan=\"1\" colspan=\"1\">abcx</td></tr>";
  // Structure identical -> 1.0 without text.
  CHECK(teds(a, b, false) == doctest::Approx(1.0));
  // One of four chars differs: substitution cost 0.25 over 3 nodes.
  CHECK(teds(a, b, true) == doctest::Approx(1.0 - 0.25 / 3.0));
}

TEST_CASE("teds raises on unparsable input") {
  CHECK_THROWS_AS(teds("<tr><td>", "<tr></tr>", false), MarkupError);
}
