#include "tsr/model.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace tsr::model {

namespace {
using nn::Tensor;
using namespace nn::ops;
}  // namespace

std::vector<std::string> ModelConfig::validate() const {
  std::vector<std::string> out;
  if (d < 4 || d % 4 != 0) out.push_back("d must be a positive multiple of 4");
  if (heads < 1 || d % heads != 0)
    out.push_back("d must be divisible by heads");
  if (layers_base < 1) out.push_back("layers_base must be >= 1");
  if (layers_stack < 1) out.push_back("layers_stack must be >= 1");
  if (ffn_mult < 1) out.push_back("ffn_mult must be >= 1");
  if (pe_base <= 1.0) out.push_back("pe_base must exceed 1");
  if (lr_initial <= 0.0) out.push_back("lr_initial must be positive");
  if (epochs < 1) out.push_back("epochs must be >= 1");
  if (lr_decay_epochs.size() != lr_decay_factors.size())
    out.push_back("lr decay epochs/factors length mismatch");
  return out;
}

std::string ModelConfig::to_json() const {
  nlohmann::ordered_json j;
  j["d"] = d;
  j["heads"] = heads;
  j["layers_base"] = layers_base;
  j["layers_stack"] = layers_stack;
  j["ffn_mult"] = ffn_mult;
  j["pe_base"] = pe_base;
  j["enable_stacking"] = enable_stacking;
  j["enable_inter"] = enable_inter;
  j["enable_intra"] = enable_intra;
  j["literal_inter_axes"] = literal_inter_axes;
  j["lr_initial"] = lr_initial;
  j["lr_decay_epochs"] = lr_decay_epochs;
  j["lr_decay_factors"] = lr_decay_factors;
  j["epochs"] = epochs;
  j["adam_beta1"] = adam_beta1;
  j["adam_beta2"] = adam_beta2;
  return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& s) {
  nlohmann::json j = nlohmann::json::parse(s);
  ModelConfig c;
  c.d = j.value("d", c.d);
  c.heads = j.value("heads", c.heads);
  c.layers_base = j.value("layers_base", c.layers_base);
  c.layers_stack = j.value("layers_stack", c.layers_stack);
  c.ffn_mult = j.value("ffn_mult", c.ffn_mult);
  c.pe_base = j.value("pe_base", c.pe_base);
  c.enable_stacking = j.value("enable_stacking", c.enable_stacking);
  c.enable_inter = j.value("enable_inter", c.enable_inter);
  c.enable_intra = j.value("enable_intra", c.enable_intra);
  c.literal_inter_axes = j.value("literal_inter_axes", c.literal_inter_axes);
  c.lr_initial = j.value("lr_initial", c.lr_initial);
  if (j.contains("lr_decay_epochs"))
    c.lr_decay_epochs = j["lr_decay_epochs"].get<std::vector<int>>();
  if (j.contains("lr_decay_factors"))
    c.lr_decay_factors = j["lr_decay_factors"].get<std::vector<double>>();
  c.epochs = j.value("epochs", c.epochs);
  c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
  return c;
}

std::vector<std::string> ModelConfig::encoder_mismatches(
    const ModelConfig& other) const {
  std::vector<std::string> out;
  if (d != other.d) out.push_back("d");
  if (heads != other.heads) out.push_back("heads");
  if (layers_base != other.layers_base) out.push_back("layers_base");
  if (ffn_mult != other.ffn_mult) out.push_back("ffn_mult");
  if (pe_base != other.pe_base) out.push_back("pe_base");
  return out;
}

std::vector<double> positional_embedding_2d(double x, double y, int d,
                                            double base, double img_w,
                                            double img_h) {
  if (d % 4 != 0)
    throw nn::TensorShapeError("positional_embedding_2d: d=" +
                               std::to_string(d) + " not divisible by 4");
  std::vector<double> out(d);
  int pairs = d / 4;  // (sin,cos) pairs per coordinate
  double vx = img_w > 0.0 ? x / img_w : x;
  double vy = img_h > 0.0 ? y / img_h : y;
  for (int k = 0; k < pairs; ++k) {
    double divisor = std::pow(base, 4.0 * k / d);
    out[2 * k] = std::sin(vx / divisor);
    out[2 * k + 1] = std::cos(vx / divisor);
    out[d / 2 + 2 * k] = std::sin(vy / divisor);
    out[d / 2 + 2 * k + 1] = std::cos(vy / divisor);
  }
  return out;
}

Featurizer make_featurizer(nn::ParameterStore& store, int d, double pe_base,
                           Rng& rng) {
  Featurizer f;
  f.d = d;
  f.pe_base = pe_base;
  f.geo_w0 = store.add("feat.geo.w0", {12, d}, rng);
  f.geo_b0 = store.add_constant("feat.geo.b0", {d}, 0.0);
  f.geo_w1 = store.add("feat.geo.w1", {d, d}, rng);
  f.geo_b1 = store.add_constant("feat.geo.b1", {d}, 0.0);
  for (int k = 0; k < 4; ++k)
    f.corner_w[k] = store.add_constant(
        "feat.corner_w." + std::to_string(k), {1}, 0.25);
  return f;
}

Featurizer bind_featurizer(const nn::ParameterStore& store, int d,
                           double pe_base) {
  Featurizer f;
  f.d = d;
  f.pe_base = pe_base;
  f.geo_w0 = store.tensor("feat.geo.w0");
  f.geo_b0 = store.tensor("feat.geo.b0");
  f.geo_w1 = store.tensor("feat.geo.w1");
  f.geo_b1 = store.tensor("feat.geo.b1");
  for (int k = 0; k < 4; ++k)
    f.corner_w[k] = store.tensor("feat.corner_w." + std::to_string(k));
  return f;
}

nn::Tensor featurize_quads(const Featurizer& f,
                           const std::vector<SpatialQuad>& quads, double img_w,
                           double img_h) {
  int n = static_cast<int>(quads.size());
  if (n < 1)
    throw nn::TensorShapeError("featurize_quads: need at least one quad");
  double inv_w = img_w > 0.0 ? 1.0 / img_w : 1.0;
  double inv_h = img_h > 0.0 ? 1.0 / img_h : 1.0;

  std::vector<double> geo(n * 12);
  std::array<std::vector<double>, 4> pe;
  for (auto& p : pe) p.resize(static_cast<size_t>(n) * f.d);

  for (int i = 0; i < n; ++i) {
    const SpatialQuad& q = quads[i];
    Rect box = bounding_box(q);
    if (box.area() == 0.0)
      std::cerr << "featurize: degenerate quad " << i
                << ", using center only\n";
    Point c = q.center();
    double* row = geo.data() + i * 12;
    row[0] = c.x * inv_w;
    row[1] = c.y * inv_h;
    row[2] = box.width() * inv_w;
    row[3] = box.height() * inv_h;
    for (int k = 0; k < 4; ++k) {
      row[4 + 2 * k] = (q.corners[k].x - c.x) * inv_w;
      row[5 + 2 * k] = (q.corners[k].y - c.y) * inv_h;
      auto emb = positional_embedding_2d(q.corners[k].x, q.corners[k].y, f.d,
                                         f.pe_base, img_w, img_h);
      std::copy(emb.begin(), emb.end(), pe[k].begin() + static_cast<size_t>(i) * f.d);
    }
  }

  Tensor geo_in = Tensor::from_values({n, 12}, std::move(geo));
  Tensor hidden = relu(add(matmul(geo_in, f.geo_w0), f.geo_b0));
  Tensor feat = add(matmul(hidden, f.geo_w1), f.geo_b1);
  for (int k = 0; k < 4; ++k) {
    Tensor corner = Tensor::from_values({n, f.d}, std::move(pe[k]));
    feat = add(feat, scale(corner, f.corner_w[k]));
  }
  return feat;
}

RoundedPrediction round_to_logical(std::span<const double> values, int n) {
  RoundedPrediction out;
  out.locations.resize(n);
  out.swapped.assign(n, false);
  auto half_up = [](double v) {
    return std::max(0, static_cast<int>(std::floor(v + 0.5)));
  };
  for (int i = 0; i < n; ++i) {
    int sr = half_up(values[i * 4 + 0]);
    int er = half_up(values[i * 4 + 1]);
    int sc = half_up(values[i * 4 + 2]);
    int ec = half_up(values[i * 4 + 3]);
    if (sr > er) {
      std::swap(sr, er);
      out.swapped[i] = true;
    }
    if (sc > ec) {
      std::swap(sc, ec);
      out.swapped[i] = true;
    }
    out.locations[i] = {sr, er, sc, ec};
  }
  return out;
}

AdjacentPairs build_adjacent_pairs(const Table& gt) {
  AdjacentPairs out;
  int n = static_cast<int>(gt.cells.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const LogicalLocation& a = gt.cells[i].logical;
      const LogicalLocation& b = gt.cells[j].logical;
      bool rows_meet = a.start_row <= b.end_row && b.start_row <= a.end_row;
      bool cols_meet = a.start_col <= b.end_col && b.start_col <= a.end_col;
      if (rows_meet && a.start_col == b.end_col + 1)
        out.row_pairs.emplace_back(i, j);  // i immediately right of j
      if (cols_meet && a.start_row == b.end_row + 1)
        out.col_pairs.emplace_back(i, j);  // i immediately below j
    }
  }
  return out;
}

namespace {

// Hinge sum over one ordered pair family: max(end(j) - start(i) + 1, 0)
// on the given columns of l_stack.
Tensor pair_hinge(const Tensor& l_stack,
                  const std::vector<std::pair<int, int>>& pairs, int start_col,
                  int end_col) {
  if (pairs.empty()) return Tensor::scalar(0.0);
  std::vector<int> is, js;
  is.reserve(pairs.size());
  js.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    is.push_back(i);
    js.push_back(j);
  }
  Tensor end_j = slice_lastdim(embedding_lookup(l_stack, js), end_col,
                               end_col + 1);
  Tensor start_i = slice_lastdim(embedding_lookup(l_stack, is), start_col,
                                 start_col + 1);
  return sum(max_with_zero(add_scalar(sub(end_j, start_i), 1.0)));
}

}  // namespace

Tensor loss_inter(const Tensor& l_stack, const AdjacentPairs& pairs,
                  bool literal_axes) {
  // Column layout: 0 start_row, 1 end_row, 2 start_col, 3 end_col.
  Tensor row_term, col_term;
  if (literal_axes) {
    row_term = pair_hinge(l_stack, pairs.row_pairs, 0, 1);
    col_term = pair_hinge(l_stack, pairs.col_pairs, 2, 3);
  } else {
    row_term = pair_hinge(l_stack, pairs.row_pairs, 2, 3);
    col_term = pair_hinge(l_stack, pairs.col_pairs, 0, 1);
  }
  return add(row_term, col_term);
}

Tensor loss_intra(const Tensor& l_stack, const Table& gt) {
  std::vector<int> multi_row, multi_col;
  std::vector<double> row_spans, col_spans;
  for (size_t i = 0; i < gt.cells.size(); ++i) {
    const LogicalLocation& l = gt.cells[i].logical;
    if (l.end_row > l.start_row) {
      multi_row.push_back(static_cast<int>(i));
      row_spans.push_back(static_cast<double>(l.end_row - l.start_row));
    }
    if (l.end_col > l.start_col) {
      multi_col.push_back(static_cast<int>(i));
      col_spans.push_back(static_cast<double>(l.end_col - l.start_col));
    }
  }
  Tensor total = Tensor::scalar(0.0);
  if (!multi_row.empty()) {
    Tensor rows = embedding_lookup(l_stack, multi_row);
    Tensor extent = sub(slice_lastdim(rows, 1, 2), slice_lastdim(rows, 0, 1));
    Tensor target = Tensor::from_values(
        {static_cast<int>(row_spans.size()), 1}, row_spans);
    total = add(total, abs_sum(sub(extent, target)));
  }
  if (!multi_col.empty()) {
    Tensor cols = embedding_lookup(l_stack, multi_col);
    Tensor extent = sub(slice_lastdim(cols, 3, 4), slice_lastdim(cols, 2, 3));
    Tensor target = Tensor::from_values(
        {static_cast<int>(col_spans.size()), 1}, col_spans);
    total = add(total, abs_sum(sub(extent, target)));
  }
  return total;
}

Tensor logical_targets(const Table& gt) {
  std::vector<double> vals;
  vals.reserve(gt.cells.size() * 4);
  for (const Cell& c : gt.cells) {
    vals.push_back(c.logical.start_row);
    vals.push_back(c.logical.end_row);
    vals.push_back(c.logical.start_col);
    vals.push_back(c.logical.end_col);
  }
  return Tensor::from_values({static_cast<int>(gt.cells.size()), 4},
                             std::move(vals));
}

Tensor loss_log(const Tensor& l_base, const Tensor& l_stack, const Table& gt) {
  Tensor target = logical_targets(gt);
  double inv_n = 1.0 / static_cast<double>(gt.cells.size());
  Tensor base_term = abs_sum(sub(l_base, target));
  Tensor stack_term = abs_sum(sub(l_stack, target));
  return scalar_mul(add(base_term, stack_term), inv_n);
}

LossBreakdown loss_total(const Tensor& l_base, const Tensor& l_stack,
                         const Table& gt, const AdjacentPairs& pairs,
                         const ModelConfig& cfg) {
  LossBreakdown out;
  out.log = loss_log(l_base, l_stack, gt);
  out.inter = cfg.enable_inter
                  ? loss_inter(l_stack, pairs, cfg.literal_inter_axes)
                  : Tensor::scalar(0.0);
  out.intra = cfg.enable_intra ? loss_intra(l_stack, gt) : Tensor::scalar(0.0);
  out.total = add(add(out.log, out.inter), out.intra);
  return out;
}

LogicalRegressor::LogicalRegressor(const ModelConfig& cfg, uint64_t init_seed)
    : cfg_(cfg) {
  auto problems = cfg.validate();
  if (!problems.empty()) {
    std::ostringstream os;
    os << "invalid model config:";
    for (const auto& p : problems) os << " " << p << ";";
    throw std::runtime_error(os.str());
  }
  Rng rng(init_seed, 0x5eedULL);
  featurizer_ = make_featurizer(store_, cfg_.d, cfg_.pe_base, rng);
  base_enc_ = nn::make_encoder(store_, "base.enc", cfg_.layers_base, cfg_.d,
                               cfg_.heads, cfg_.ffn_mult, rng);
  base_head_w_ = store_.add("base.head.w", {cfg_.d, 4}, rng);
  base_head_b_ = store_.add_constant("base.head.b", {4}, 0.0);
  if (cfg_.enable_stacking) {
    stack_ws_ = store_.add("stack.ws", {4, cfg_.d}, rng);
    stack_enc_ = nn::make_encoder(store_, "stack.enc", cfg_.layers_stack,
                                  cfg_.d, cfg_.heads, cfg_.ffn_mult, rng);
    stack_head_w_ = store_.add("stack.head.w", {cfg_.d, 4}, rng);
    stack_head_b_ = store_.add_constant("stack.head.b", {4}, 0.0);
  }
}

LogicalRegressor::LogicalRegressor(const ModelConfig& cfg,
                                   nn::ParameterStore&& store)
    : cfg_(cfg), store_(std::move(store)) {
  bind();
}

void LogicalRegressor::bind() {
  featurizer_ = bind_featurizer(store_, cfg_.d, cfg_.pe_base);
  base_enc_ = nn::bind_encoder(store_, "base.enc", cfg_.layers_base,
                               cfg_.heads);
  base_head_w_ = store_.tensor("base.head.w");
  base_head_b_ = store_.tensor("base.head.b");
  if (cfg_.enable_stacking) {
    stack_ws_ = store_.tensor("stack.ws");
    stack_enc_ = nn::bind_encoder(store_, "stack.enc", cfg_.layers_stack,
                                  cfg_.heads);
    stack_head_w_ = store_.tensor("stack.head.w");
    stack_head_b_ = store_.tensor("stack.head.b");
  }
}

LogicalRegressor LogicalRegressor::from_checkpoint(const std::string& path) {
  auto [store, meta] = nn::load_checkpoint(path);
  if (meta.component != "regressor")
    throw std::runtime_error("checkpoint component is '" + meta.component +
                             "', expected 'regressor': " + path);
  if (meta.config_json.empty())
    throw std::runtime_error("checkpoint missing config: " + path);
  ModelConfig cfg = ModelConfig::from_json(meta.config_json);
  return LogicalRegressor(cfg, std::move(store));
}

void LogicalRegressor::save(const std::string& path) const {
  nn::CheckpointMeta meta;
  meta.component = "regressor";
  meta.config_json = cfg_.to_json();
  nn::save_checkpoint(path, store_, meta);
}

LogicalRegressor::Forward LogicalRegressor::forward(
    const std::vector<SpatialQuad>& quads, double img_w, double img_h) {
  Forward out;
  out.h = featurize_quads(featurizer_, quads, img_w, img_h);
  out.h_tilde = nn::encode(out.h, base_enc_);
  out.l_base = relu(add(matmul(out.h_tilde, base_head_w_), base_head_b_));
  if (cfg_.enable_stacking) {
    Tensor stacked_in = add(matmul(out.l_base, stack_ws_), out.h_tilde);
    Tensor encoded = nn::encode(stacked_in, stack_enc_);
    out.l_stack = relu(add(matmul(encoded, stack_head_w_), stack_head_b_));
  } else {
    out.l_stack = out.l_base;
  }
  return out;
}

LogicalRegressor::Prediction LogicalRegressor::predict(
    const std::vector<SpatialQuad>& quads, double img_w, double img_h) {
  Forward f = forward(quads, img_w, img_h);
  Prediction out;
  out.raw_stack.assign(f.l_stack.values().begin(), f.l_stack.values().end());
  out.rounded = round_to_logical(f.l_stack.values(),
                                 static_cast<int>(quads.size()));
  return out;
}

}  // namespace tsr::model
