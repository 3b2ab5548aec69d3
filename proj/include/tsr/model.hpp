#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tsr/attention.hpp"
#include "tsr/params.hpp"
#include "tsr/table.hpp"
#include "tsr/tensor.hpp"

namespace tsr::model {

struct ModelConfig {
  int d = 64;
  int heads = 4;
  int layers_base = 3;
  int layers_stack = 3;
  int ffn_mult = 4;
  double pe_base = 10000.0;
  bool enable_stacking = true;
  bool enable_inter = true;
  bool enable_intra = true;
  // Keeps the uncorrected axis choice of the inter-cell penalty available
  // for comparison; the corrected form vanishes on ground truth.
  bool literal_inter_axes = false;
  double lr_initial = 1e-4;
  std::vector<int> lr_decay_epochs{70, 90};
  std::vector<double> lr_decay_factors{0.1, 0.01};
  int epochs = 100;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;

  std::vector<std::string> validate() const;
  std::string to_json() const;
  static ModelConfig from_json(const std::string& s);

  /// Fields that must agree for encoder weights to be transferable.
  std::vector<std::string> encoder_mismatches(const ModelConfig& other) const;
};

/// Sinusoidal 2-D embedding: d/2 components for x then d/2 for y, each laid
/// out as (sin(v/B^{4k/d}), cos(v/B^{4k/d})) pairs with v the coordinate
/// normalized to [0,1] by the image extent. d must be divisible by 4.
std::vector<double> positional_embedding_2d(double x, double y, int d,
                                            double base, double img_w,
                                            double img_h);

struct Featurizer {
  nn::Tensor geo_w0, geo_b0, geo_w1, geo_b1;
  std::array<nn::Tensor, 4> corner_w;
  int d = 0;
  double pe_base = 10000.0;
};

Featurizer make_featurizer(nn::ParameterStore& store, int d, double pe_base,
                           Rng& rng);
Featurizer bind_featurizer(const nn::ParameterStore& store, int d,
                           double pe_base);

/// Geometry MLP over [cx, cy, w, h, corner offsets] plus the weighted sum of
/// the four corner position embeddings. Degenerate (zero-area) quads warn
/// and fall back to their center point.
nn::Tensor featurize_quads(const Featurizer& f,
                           const std::vector<SpatialQuad>& quads, double img_w,
                           double img_h);

struct RoundedPrediction {
  std::vector<LogicalLocation> locations;
  std::vector<bool> swapped;  // start/end repaired on some axis
};

/// Half-up rounding, clamp at 0, swap repair when start > end.
RoundedPrediction round_to_logical(std::span<const double> values, int n);

/// Ordered ground-truth adjacency: row_pairs hold (i, j) with cell i
/// immediately right of cell j; col_pairs (i, j) with i immediately below j.
/// Indices address Table::cells positions.
struct AdjacentPairs {
  std::vector<std::pair<int, int>> row_pairs;
  std::vector<std::pair<int, int>> col_pairs;
};

AdjacentPairs build_adjacent_pairs(const Table& gt);

/// Hinge penalty on the mutual-exclusivity constraint over adjacent pairs.
/// The corrected form penalizes the ordered axis (columns for row_pairs,
/// rows for col_pairs) and is 0 on ground truth; literal_axes reproduces the
/// uncorrected variant.
nn::Tensor loss_inter(const nn::Tensor& l_stack, const AdjacentPairs& pairs,
                      bool literal_axes = false);

/// L1 penalty between predicted and true span extents over the
/// ground-truth spanning cells.
nn::Tensor loss_intra(const nn::Tensor& l_stack, const Table& gt);

/// (1/N) sum of L1 errors of both regressor outputs.
nn::Tensor loss_log(const nn::Tensor& l_base, const nn::Tensor& l_stack,
                    const Table& gt);

struct LossBreakdown {
  nn::Tensor total, log, inter, intra;
};

LossBreakdown loss_total(const nn::Tensor& l_base, const nn::Tensor& l_stack,
                         const Table& gt, const AdjacentPairs& pairs,
                         const ModelConfig& cfg);

nn::Tensor logical_targets(const Table& gt);

class LogicalRegressor {
 public:
  LogicalRegressor(const ModelConfig& cfg, uint64_t init_seed);

  static LogicalRegressor from_checkpoint(const std::string& path);
  void save(const std::string& path) const;

  const ModelConfig& config() const { return cfg_; }
  nn::ParameterStore& params() { return store_; }
  const nn::ParameterStore& params() const { return store_; }

  struct Forward {
    nn::Tensor h;        // fused cell features
    nn::Tensor h_tilde;  // base encoder output
    nn::Tensor l_base;   // N x 4
    nn::Tensor l_stack;  // N x 4 (== l_base without stacking)
  };

  Forward forward(const std::vector<SpatialQuad>& quads, double img_w,
                  double img_h);

  struct Prediction {
    RoundedPrediction rounded;
    std::vector<double> raw_stack;  // N x 4 row-major
  };

  Prediction predict(const std::vector<SpatialQuad>& quads, double img_w,
                     double img_h);

 private:
  LogicalRegressor(const ModelConfig& cfg, nn::ParameterStore&& store);
  void bind();

  ModelConfig cfg_;
  nn::ParameterStore store_;
  Featurizer featurizer_;
  nn::Encoder base_enc_, stack_enc_;
  nn::Tensor base_head_w_, base_head_b_;
  nn::Tensor stack_ws_, stack_head_w_, stack_head_b_;
};

}  // namespace tsr::model
