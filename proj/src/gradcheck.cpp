#include "tsr/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "tsr/rng.hpp"

namespace tsr::nn {

GradCheckReport finite_diff_check(ParameterStore& store,
                                  const std::function<Tensor()>& loss_fn,
                                  double h, int64_t max_coords,
                                  uint64_t subsample_seed) {
  GradCheckReport report;

  store.zero_grads();
  Tensor loss = loss_fn();
  backward(loss);

  struct Coord {
    std::string name;
    int64_t idx;
    double analytic;
  };
  std::vector<Coord> coords;
  for (const auto& [name, p] : store.entries()) {
    auto g = p.value.grad();
    for (int64_t i = 0; i < p.value.numel(); ++i)
      coords.push_back({name, i, g.empty() ? 0.0 : g[i]});
  }
  if (static_cast<int64_t>(coords.size()) > max_coords) {
    Rng rng(subsample_seed, 0x6a5dULL);
    rng.shuffle(coords);
    coords.resize(max_coords);
  }

  for (const Coord& c : coords) {
    auto vals = store.at(c.name).value.values_mut();
    double original = vals[c.idx];

    reset_kink_counter();
    vals[c.idx] = original + h;
    double f_plus = loss_fn().item();
    vals[c.idx] = original - h;
    double f_minus = loss_fn().item();
    vals[c.idx] = original;
    if (kink_proximity_count() > 0) {
      ++report.skipped_kink;
      continue;
    }

    double numeric = (f_plus - f_minus) / (2.0 * h);
    double denom = std::max({1.0, std::abs(c.analytic), std::abs(numeric)});
    double rel = std::abs(c.analytic - numeric) / denom;
    ++report.checked;
    if (rel > report.worst_rel_error) {
      report.worst_rel_error = rel;
      report.worst_param = c.name;
      report.worst_coord = c.idx;
    }
  }
  store.zero_grads();
  return report;
}

}  // namespace tsr::nn
