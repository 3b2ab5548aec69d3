#include "tsr/train.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>

#include "json.hpp"
#include "tsr/metrics.hpp"
#include "tsr/rng.hpp"

namespace tsr::model {

double lr_at_epoch(const ModelConfig& cfg, int epoch) {
  double lr = cfg.lr_initial;
  for (size_t i = 0; i < cfg.lr_decay_epochs.size(); ++i)
    if (epoch >= cfg.lr_decay_epochs[i])
      lr = cfg.lr_initial * cfg.lr_decay_factors[i];
  return lr;
}

double evaluate_logical_accuracy(LogicalRegressor& model,
                                 const std::vector<DatasetRecord>& records) {
  size_t correct = 0, total = 0;
  for (const DatasetRecord& rec : records) {
    std::vector<SpatialQuad> quads;
    quads.reserve(rec.table.cells.size());
    for (const Cell& c : rec.table.cells) quads.push_back(c.quad);
    if (quads.empty()) continue;
    auto pred = model.predict(quads, rec.table.image_width,
                              rec.table.image_height);
    Table pred_table = rec.table;
    for (size_t i = 0; i < pred_table.cells.size(); ++i)
      pred_table.cells[i].logical = pred.rounded.locations[i];
    MatchResult m = match_tables(pred_table, rec.table, 0.5);
    LogicalAccuracy acc = logical_accuracy(pred_table, rec.table, m);
    correct += static_cast<size_t>(
        std::llround(acc.all * static_cast<double>(acc.n_gt_cells)));
    total += acc.n_gt_cells;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / total;
}

TrainResult train(LogicalRegressor& model,
                  const std::vector<DatasetRecord>& train_set,
                  const std::vector<DatasetRecord>& holdout,
                  const TrainOptions& opts) {
  if (train_set.empty()) throw std::runtime_error("train: empty dataset");
  const ModelConfig& cfg = model.config();

  std::ofstream metrics_out;
  if (!opts.metrics_path.empty()) {
    metrics_out.open(opts.metrics_path, std::ios::binary);
    if (!metrics_out)
      throw std::runtime_error("cannot open metrics log: " + opts.metrics_path);
  }

  TrainResult result;
  double last_finite_loss = 0.0;
  std::vector<size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), size_t{0});

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(opts.seed, 0xe90c0 + static_cast<uint64_t>(epoch));
    shuffle_rng.shuffle(order);
    nn::AdamConfig adam{lr_at_epoch(cfg, epoch), cfg.adam_beta1,
                        cfg.adam_beta2, 1e-8};

    double loss_sum = 0.0;
    size_t steps = 0;
    for (size_t idx : order) {
      const DatasetRecord& rec = train_set[idx];
      if (rec.table.cells.empty()) continue;
      std::vector<SpatialQuad> quads;
      quads.reserve(rec.table.cells.size());
      for (const Cell& c : rec.table.cells) quads.push_back(c.quad);

      auto fwd = model.forward(quads, rec.table.image_width,
                               rec.table.image_height);
      AdjacentPairs pairs = build_adjacent_pairs(rec.table);
      LossBreakdown loss = loss_total(fwd.l_base, fwd.l_stack, rec.table,
                                      pairs, cfg);
      double loss_value = loss.total.item();
      if (!std::isfinite(loss_value))
        throw TrainingDiverged(epoch, last_finite_loss);
      last_finite_loss = loss_value;
      loss_sum += loss_value;
      ++steps;
      nn::backward(loss.total);
      nn::adam_step(model.params(), adam);
    }

    EpochLog log;
    log.epoch = epoch;
    log.lr = adam.lr;
    log.train_loss = steps == 0 ? 0.0 : loss_sum / static_cast<double>(steps);
    bool eval_now = !holdout.empty() &&
                    (epoch == cfg.epochs - 1 ||
                     (opts.eval_every > 0 && epoch % opts.eval_every == 0));
    if (eval_now) {
      log.holdout_acc = evaluate_logical_accuracy(model, holdout);
      result.final_holdout_acc = log.holdout_acc;
    }
    if (opts.verbose) {
      std::cerr << "epoch " << epoch << " lr " << log.lr << " loss "
                << log.train_loss;
      if (log.holdout_acc >= 0.0)
        std::cerr << " holdout_acc " << log.holdout_acc;
      std::cerr << "\n";
    }
    if (metrics_out) {
      nlohmann::ordered_json j;
      j["epoch"] = log.epoch;
      j["lr"] = log.lr;
      j["train_loss"] = log.train_loss;
      if (log.holdout_acc >= 0.0) j["holdout_acc"] = log.holdout_acc;
      metrics_out << j.dump() << "\n";
    }
    result.history.push_back(log);
  }
  return result;
}

}  // namespace tsr::model
