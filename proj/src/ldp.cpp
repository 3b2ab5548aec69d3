#include "tsr/ldp.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "tsr/rng.hpp"
#include "tsr/train.hpp"

namespace tsr::model {

namespace {
using nn::Tensor;
using namespace nn::ops;

std::vector<SpatialQuad> word_quads(const std::vector<WordBox>& words) {
  std::vector<SpatialQuad> out;
  out.reserve(words.size());
  for (const WordBox& w : words) out.push_back(SpatialQuad::from_rect(w.box));
  return out;
}

}  // namespace

std::vector<std::string> LdpConfig::validate() const {
  std::vector<std::string> out;
  if (d < 4 || d % 4 != 0) out.push_back("d must be a positive multiple of 4");
  if (heads < 1 || d % heads != 0)
    out.push_back("d must be divisible by heads");
  if (layers < 1) out.push_back("layers must be >= 1");
  if (ffn_mult < 1) out.push_back("ffn_mult must be >= 1");
  if (lr <= 0.0) out.push_back("lr must be positive");
  if (warmup_frac < 0.0 || warmup_frac >= 1.0)
    out.push_back("warmup_frac outside [0,1)");
  if (epochs < 1) out.push_back("epochs must be >= 1");
  if (max_pairs_per_table < 1) out.push_back("max_pairs_per_table < 1");
  return out;
}

std::string LdpConfig::to_json() const {
  nlohmann::ordered_json j;
  j["d"] = d;
  j["heads"] = heads;
  j["layers"] = layers;
  j["ffn_mult"] = ffn_mult;
  j["pe_base"] = pe_base;
  j["lr"] = lr;
  j["warmup_frac"] = warmup_frac;
  j["adam_beta1"] = adam_beta1;
  j["adam_beta2"] = adam_beta2;
  j["epochs"] = epochs;
  j["max_pairs_per_table"] = max_pairs_per_table;
  return j.dump();
}

LdpConfig LdpConfig::from_json(const std::string& s) {
  nlohmann::json j = nlohmann::json::parse(s);
  LdpConfig c;
  c.d = j.value("d", c.d);
  c.heads = j.value("heads", c.heads);
  c.layers = j.value("layers", c.layers);
  c.ffn_mult = j.value("ffn_mult", c.ffn_mult);
  c.pe_base = j.value("pe_base", c.pe_base);
  c.lr = j.value("lr", c.lr);
  c.warmup_frac = j.value("warmup_frac", c.warmup_frac);
  c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
  c.epochs = j.value("epochs", c.epochs);
  c.max_pairs_per_table = j.value("max_pairs_per_table", c.max_pairs_per_table);
  return c;
}

std::vector<std::string> LdpConfig::encoder_mismatches(
    const ModelConfig& fine) const {
  std::vector<std::string> out;
  if (d != fine.d) out.push_back("d");
  if (heads != fine.heads) out.push_back("heads");
  if (layers != fine.layers_base) out.push_back("layers_base");
  if (fine.enable_stacking && layers != fine.layers_stack)
    out.push_back("layers_stack");
  if (ffn_mult != fine.ffn_mult) out.push_back("ffn_mult");
  if (pe_base != fine.pe_base) out.push_back("pe_base");
  return out;
}

LdpModel::LdpModel(const LdpConfig& cfg, uint64_t init_seed) : cfg_(cfg) {
  auto problems = cfg.validate();
  if (!problems.empty()) {
    std::ostringstream os;
    os << "invalid ldp config:";
    for (const auto& p : problems) os << " " << p << ";";
    throw std::runtime_error(os.str());
  }
  Rng rng(init_seed, 0x1d9ULL);
  featurizer_ = make_featurizer(store_, cfg_.d, cfg_.pe_base, rng);
  encoder_ = nn::make_encoder(store_, "enc", cfg_.layers, cfg_.d, cfg_.heads,
                              cfg_.ffn_mult, rng);
  pair_w_ = store_.add("pair.w", {2 * cfg_.d, 2}, rng);
  pair_b_ = store_.add_constant("pair.b", {2}, 0.0);
}

LdpModel::LdpModel(const LdpConfig& cfg, nn::ParameterStore&& store)
    : cfg_(cfg), store_(std::move(store)) {
  bind();
}

void LdpModel::bind() {
  featurizer_ = bind_featurizer(store_, cfg_.d, cfg_.pe_base);
  encoder_ = nn::bind_encoder(store_, "enc", cfg_.layers, cfg_.heads);
  pair_w_ = store_.tensor("pair.w");
  pair_b_ = store_.tensor("pair.b");
}

LdpModel LdpModel::from_checkpoint(const std::string& path) {
  auto [store, meta] = nn::load_checkpoint(path);
  if (meta.component != "ldp")
    throw std::runtime_error("checkpoint component is '" + meta.component +
                             "', expected 'ldp': " + path);
  if (meta.config_json.empty())
    throw std::runtime_error("checkpoint missing config: " + path);
  LdpConfig cfg = LdpConfig::from_json(meta.config_json);
  return LdpModel(cfg, std::move(store));
}

void LdpModel::save(const std::string& path) const {
  nn::CheckpointMeta meta;
  meta.component = "ldp";
  meta.config_json = cfg_.to_json();
  nn::save_checkpoint(path, store_, meta);
}

Tensor LdpModel::forward(const std::vector<WordBox>& words,
                         const std::vector<std::pair<int, int>>& pairs,
                         double img_w, double img_h) {
  if (words.empty())
    throw nn::TensorShapeError("ldp forward: no word boxes");
  for (const auto& [a, b] : pairs) {
    if (a < 0 || b < 0 || a >= static_cast<int>(words.size()) ||
        b >= static_cast<int>(words.size()))
      throw nn::TensorShapeError("ldp forward: pair index out of range");
  }
  Tensor h = featurize_quads(featurizer_, word_quads(words), img_w, img_h);
  Tensor encoded = nn::encode(h, encoder_);
  std::vector<int> as, bs;
  as.reserve(pairs.size());
  bs.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    as.push_back(a);
    bs.push_back(b);
  }
  Tensor fa = embedding_lookup(encoded, as);
  Tensor fb = embedding_lookup(encoded, bs);
  Tensor paired = concat_lastdim({fa, fb});
  return add(matmul(paired, pair_w_), pair_b_);
}

Tensor ldp_loss(const Tensor& pred, const std::vector<LdpPairLabel>& labels) {
  if (pred.shape().size() != 2 || pred.shape()[1] != 2 ||
      pred.shape()[0] != static_cast<int>(labels.size()))
    throw nn::TensorShapeError("ldp_loss: prediction/label shape mismatch");
  std::vector<double> target;
  target.reserve(labels.size() * 2);
  for (const LdpPairLabel& l : labels) {
    target.push_back(static_cast<double>(l.row_dist));
    target.push_back(static_cast<double>(l.col_dist));
  }
  Tensor t = Tensor::from_values(pred.shape(), std::move(target));
  Tensor diff = sub(pred, t);
  return scalar_mul(abs_sum(diff), 1.0 / static_cast<double>(diff.numel()));
}

PretrainResult pretrain(LdpModel& model,
                        const std::vector<DatasetRecord>& corpus,
                        const PretrainOptions& opts) {
  std::vector<size_t> usable;
  for (size_t i = 0; i < corpus.size(); ++i)
    if (!corpus[i].words.empty() && !corpus[i].ldp_pairs.empty())
      usable.push_back(i);
  if (usable.empty())
    throw std::runtime_error("pretrain: corpus has no word boxes / LDP labels");

  const LdpConfig& cfg = model.config();
  int64_t total_steps =
      static_cast<int64_t>(cfg.epochs) * static_cast<int64_t>(usable.size());
  int64_t warmup_steps = std::max<int64_t>(
      1, static_cast<int64_t>(std::ceil(cfg.warmup_frac * total_steps)));

  std::ofstream metrics_out;
  if (!opts.metrics_path.empty()) {
    metrics_out.open(opts.metrics_path, std::ios::binary);
    if (!metrics_out)
      throw std::runtime_error("cannot open metrics log: " + opts.metrics_path);
  }

  PretrainResult result;
  double last_finite_loss = 0.0;
  int64_t step = 0;
  std::vector<size_t> order = usable;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(opts.seed, 0x9ae7 + static_cast<uint64_t>(epoch));
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    size_t steps_in_epoch = 0;
    for (size_t idx : order) {
      const DatasetRecord& rec = corpus[idx];
      std::vector<std::pair<int, int>> pairs;
      pairs.reserve(rec.ldp_pairs.size());
      for (const LdpPairLabel& l : rec.ldp_pairs) pairs.emplace_back(l.a, l.b);

      ++step;
      double warm = std::min(1.0, static_cast<double>(step) /
                                     static_cast<double>(warmup_steps));
      nn::AdamConfig adam{cfg.lr * warm, cfg.adam_beta1, cfg.adam_beta2, 1e-8};

      Tensor pred = model.forward(rec.words, pairs, rec.table.image_width,
                                  rec.table.image_height);
      Tensor loss = ldp_loss(pred, rec.ldp_pairs);
      double loss_value = loss.item();
      if (!std::isfinite(loss_value))
        throw TrainingDiverged(epoch, last_finite_loss);
      last_finite_loss = loss_value;
      loss_sum += loss_value;
      ++steps_in_epoch;
      nn::backward(loss);
      nn::adam_step(model.params(), adam);
    }
    double epoch_loss =
        steps_in_epoch == 0 ? 0.0 : loss_sum / static_cast<double>(steps_in_epoch);
    result.epoch_losses.push_back(epoch_loss);
    if (opts.verbose)
      std::cerr << "pretrain epoch " << epoch << " loss " << epoch_loss << "\n";
    if (metrics_out) {
      nlohmann::ordered_json j;
      j["epoch"] = epoch;
      j["loss"] = epoch_loss;
      metrics_out << j.dump() << "\n";
    }
  }
  return result;
}

std::pair<double, double> evaluate_ldp_mae(
    LdpModel& model, const std::vector<DatasetRecord>& records) {
  double row_err = 0.0, col_err = 0.0;
  int64_t n = 0;
  for (const DatasetRecord& rec : records) {
    if (rec.words.empty() || rec.ldp_pairs.empty()) continue;
    std::vector<std::pair<int, int>> pairs;
    for (const LdpPairLabel& l : rec.ldp_pairs) pairs.emplace_back(l.a, l.b);
    Tensor pred = model.forward(rec.words, pairs, rec.table.image_width,
                                rec.table.image_height);
    auto v = pred.values();
    for (size_t i = 0; i < rec.ldp_pairs.size(); ++i) {
      row_err += std::abs(v[i * 2] - rec.ldp_pairs[i].row_dist);
      col_err += std::abs(v[i * 2 + 1] - rec.ldp_pairs[i].col_dist);
      ++n;
    }
  }
  if (n == 0) return {0.0, 0.0};
  return {row_err / n, col_err / n};
}

LogicalRegressor transfer(const std::string& ldp_checkpoint_path,
                          const ModelConfig& fine_cfg,
                          uint64_t head_init_seed) {
  auto [ldp_store, meta] = nn::load_checkpoint(ldp_checkpoint_path);
  if (meta.component != "ldp")
    throw std::runtime_error("transfer: checkpoint component is '" +
                             meta.component + "', expected 'ldp'");
  LdpConfig ldp_cfg = LdpConfig::from_json(meta.config_json);
  auto mismatches = ldp_cfg.encoder_mismatches(fine_cfg);
  if (!mismatches.empty()) {
    std::ostringstream os;
    os << "transfer: encoder config mismatch in fields:";
    for (const auto& f : mismatches) os << " " << f;
    throw std::runtime_error(os.str());
  }

  LogicalRegressor fine(fine_cfg, head_init_seed);
  auto copy_values = [&](const std::string& from, const std::string& to) {
    const nn::Parameter& src = ldp_store.at(from);
    nn::Parameter& dst = fine.params().at(to);
    if (src.value.shape() != dst.value.shape())
      throw std::runtime_error("transfer: shape mismatch for " + to);
    auto sv = src.value.values();
    auto dv = dst.value.values_mut();
    std::copy(sv.begin(), sv.end(), dv.begin());
  };

  const std::vector<std::string> feat_names = {
      "feat.geo.w0", "feat.geo.b0", "feat.geo.w1", "feat.geo.b1",
      "feat.corner_w.0", "feat.corner_w.1", "feat.corner_w.2",
      "feat.corner_w.3"};
  for (const std::string& name : feat_names) copy_values(name, name);

  auto src_names = nn::encoder_param_names("enc", ldp_cfg.layers);
  auto base_names = nn::encoder_param_names("base.enc", fine_cfg.layers_base);
  for (size_t i = 0; i < src_names.size(); ++i)
    copy_values(src_names[i], base_names[i]);
  if (fine_cfg.enable_stacking) {
    auto stack_names =
        nn::encoder_param_names("stack.enc", fine_cfg.layers_stack);
    for (size_t i = 0; i < src_names.size(); ++i)
      copy_values(src_names[i], stack_names[i]);
  }
  return fine;
}

}  // namespace tsr::model
