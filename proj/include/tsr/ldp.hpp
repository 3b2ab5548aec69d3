#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tsr/dataset.hpp"
#include "tsr/model.hpp"

namespace tsr::model {

struct LdpConfig {
  int d = 64;
  int heads = 4;
  int layers = 3;  // must equal the fine-tune encoder depth
  int ffn_mult = 4;
  double pe_base = 10000.0;
  double lr = 1.5e-4;
  double warmup_frac = 0.05;  // linear warm-up share of total steps
  double adam_beta1 = 0.0;
  double adam_beta2 = 0.95;
  int epochs = 20;
  int max_pairs_per_table = 64;

  std::vector<std::string> validate() const;
  std::string to_json() const;
  static LdpConfig from_json(const std::string& s);
  std::vector<std::string> encoder_mismatches(const ModelConfig& fine) const;
};

/// Word-box featurizer + attention encoder + linear pair head predicting
/// signed (row, col) grid distances for ordered word pairs.
class LdpModel {
 public:
  LdpModel(const LdpConfig& cfg, uint64_t init_seed);
  static LdpModel from_checkpoint(const std::string& path);
  void save(const std::string& path) const;

  const LdpConfig& config() const { return cfg_; }
  nn::ParameterStore& params() { return store_; }

  /// Encoded features of each word pair concatenated and mapped to 2
  /// outputs; result is |pairs| x 2.
  nn::Tensor forward(const std::vector<WordBox>& words,
                     const std::vector<std::pair<int, int>>& pairs,
                     double img_w, double img_h);

 private:
  LdpModel(const LdpConfig& cfg, nn::ParameterStore&& store);
  void bind();

  LdpConfig cfg_;
  nn::ParameterStore store_;
  Featurizer featurizer_;
  nn::Encoder encoder_;
  nn::Tensor pair_w_, pair_b_;
};

/// Mean L1 over pairs and both axes.
nn::Tensor ldp_loss(const nn::Tensor& pred,
                    const std::vector<LdpPairLabel>& labels);

struct PretrainOptions {
  uint64_t seed = 0;
  bool verbose = false;
  std::string metrics_path;
};

struct PretrainResult {
  std::vector<double> epoch_losses;
};

/// Adam with the pre-training betas and linear warm-up; records must carry
/// word boxes and LDP labels. Throws TrainingDiverged on NaN.
PretrainResult pretrain(LdpModel& model,
                        const std::vector<DatasetRecord>& corpus,
                        const PretrainOptions& opts);

/// Mean absolute error per axis of the model on a record set.
std::pair<double, double> evaluate_ldp_mae(
    LdpModel& model, const std::vector<DatasetRecord>& records);

/// Fresh regressor whose featurizer and both encoder stacks are initialized
/// from the pre-trained checkpoint; heads and the stacking input projection
/// keep their fresh seed init. Throws on encoder config mismatch, listing
/// the differing fields.
LogicalRegressor transfer(const std::string& ldp_checkpoint_path,
                          const ModelConfig& fine_cfg,
                          uint64_t head_init_seed);

}  // namespace tsr::model
