#pragma once

#include <functional>
#include <string>

#include "tsr/params.hpp"

namespace tsr::nn {

struct GradCheckReport {
  double worst_rel_error = 0.0;
  std::string worst_param;
  int64_t worst_coord = -1;
  int64_t checked = 0;
  int64_t skipped_kink = 0;

  bool passed(double tolerance) const { return worst_rel_error < tolerance; }
};

/// Central finite differences against the analytic gradient of loss_fn.
/// Every coordinate is perturbed by +-h; above max_coords coordinates a
/// seeded random subsample of that size is checked instead. Coordinates
/// whose perturbed evaluations pass within the kink epsilon of a relu /
/// hinge input are skipped. Relative error is |analytic - numeric| /
/// max(1, |analytic|, |numeric|).
GradCheckReport finite_diff_check(ParameterStore& store,
                                  const std::function<Tensor()>& loss_fn,
                                  double h = 1e-5, int64_t max_coords = 10000,
                                  uint64_t subsample_seed = 0);

}  // namespace tsr::nn
