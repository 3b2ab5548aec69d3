#pragma once

#include <string>
#include <vector>

#include "tsr/algebra.hpp"
#include "tsr/table.hpp"

namespace tsr {

struct MatchPair {
  int pred_id = 0;
  int gt_id = 0;
  double iou = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<int> unmatched_pred;
  std::vector<int> unmatched_gt;

  size_t n_pred() const { return pairs.size() + unmatched_pred.size(); }
  size_t n_gt() const { return pairs.size() + unmatched_gt.size(); }
};

struct Prf {
  double p = 0.0;
  double r = 0.0;
  double f1 = 0.0;
};

Prf make_prf(size_t tp, size_t n_pred, size_t n_gt);

/// Greedy one-to-one matching on bounding-box IoU, descending IoU order,
/// ties broken by (pred index, gt index). Pairs need iou > iou_threshold.
/// Ids in the result are positional indices into the input sequences.
MatchResult match_cells(const std::vector<SpatialQuad>& pred,
                        const std::vector<SpatialQuad>& gt,
                        double iou_threshold);

/// Same matching with MatchPair ids translated to Cell::id.
MatchResult match_tables(const Table& pred, const Table& gt,
                         double iou_threshold);

Prf detection_f1(const MatchResult& m);

struct LogicalAccuracy {
  double all = 0.0;       // over all gt cells
  double spanning = 0.0;  // over gt spanning cells; 1.0 when none exist
  double rows = 0.0;      // start_row and end_row both correct
  double cols = 0.0;      // start_col and end_col both correct
  size_t n_gt_cells = 0;
  size_t n_spanning = 0;
};

/// A gt cell counts as correct when it is matched and all four logical
/// indices agree. m must map pred cell ids to gt cell ids.
LogicalAccuracy logical_accuracy(const Table& pred, const Table& gt,
                                 const MatchResult& m);

/// Pred triplets are mapped through the matching into gt id space; triplets
/// involving unmatched pred cells stay as false positives.
Prf adjacency_f1(const Table& pred, const Table& gt, const MatchResult& m);

struct MetricsReport {
  double detection_p = 0.0, detection_r = 0.0, detection_f1 = 0.0;
  double adjacency_p = 0.0, adjacency_r = 0.0, adjacency_f1 = 0.0;
  double logical_accuracy = 0.0;
  double logical_accuracy_spanning = 0.0;
  double teds = 0.0;
  double bleu = 0.0;
  size_t spanning_cells = 0;
};

std::string metrics_report_to_json(const MetricsReport& r);
MetricsReport metrics_report_from_json(const std::string& s);
std::string metrics_report_summary(const MetricsReport& r);

}  // namespace tsr
