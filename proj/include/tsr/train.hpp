#pragma once

#include <string>
#include <vector>

#include "tsr/dataset.hpp"
#include "tsr/model.hpp"

namespace tsr::model {

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(int epoch, double last_finite_loss)
      : std::runtime_error("training diverged (loss not finite) at epoch " +
                           std::to_string(epoch) + ", last finite loss " +
                           std::to_string(last_finite_loss)),
        epoch_(epoch),
        last_finite_loss_(last_finite_loss) {}
  int epoch() const { return epoch_; }
  double last_finite_loss() const { return last_finite_loss_; }

 private:
  int epoch_;
  double last_finite_loss_;
};

struct TrainOptions {
  uint64_t seed = 0;
  int eval_every = 1;  // holdout cadence in epochs; the last epoch always runs
  bool verbose = false;
  std::string metrics_path;  // per-epoch NDJSON when non-empty
};

struct EpochLog {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double holdout_acc = -1.0;  // -1 when not evaluated that epoch
};

struct TrainResult {
  std::vector<EpochLog> history;
  double final_holdout_acc = -1.0;
};

/// Pooled exact-match logical accuracy of rounded predictions over a record
/// set, matched cell-to-cell at IoU 0.5.
double evaluate_logical_accuracy(LogicalRegressor& model,
                                 const std::vector<DatasetRecord>& records);

/// Seeded per-epoch shuffle, one table per optimizer step, step-decay
/// learning rate from the model config. Throws TrainingDiverged on NaN.
TrainResult train(LogicalRegressor& model,
                  const std::vector<DatasetRecord>& train_set,
                  const std::vector<DatasetRecord>& holdout,
                  const TrainOptions& opts);

double lr_at_epoch(const ModelConfig& cfg, int epoch);

}  // namespace tsr::model
