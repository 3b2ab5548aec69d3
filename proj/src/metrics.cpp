#include "tsr/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tsr {

Prf make_prf(size_t tp, size_t n_pred, size_t n_gt) {
  Prf out;
  out.p = n_pred == 0 ? 0.0 : static_cast<double>(tp) / n_pred;
  out.r = n_gt == 0 ? 0.0 : static_cast<double>(tp) / n_gt;
  out.f1 = (out.p + out.r) == 0.0 ? 0.0 : 2.0 * out.p * out.r / (out.p + out.r);
  return out;
}

MatchResult match_cells(const std::vector<SpatialQuad>& pred,
                        const std::vector<SpatialQuad>& gt,
                        double iou_threshold) {
  struct Candidate {
    double iou;
    int pred_i;
    int gt_i;
  };
  std::vector<Rect> pred_boxes(pred.size()), gt_boxes(gt.size());
  for (size_t i = 0; i < pred.size(); ++i) pred_boxes[i] = bounding_box(pred[i]);
  for (size_t i = 0; i < gt.size(); ++i) gt_boxes[i] = bounding_box(gt[i]);

  std::vector<Candidate> cands;
  for (size_t i = 0; i < pred.size(); ++i) {
    for (size_t j = 0; j < gt.size(); ++j) {
      double v = iou(pred_boxes[i], gt_boxes[j]);
      if (v > iou_threshold)
        cands.push_back({v, static_cast<int>(i), static_cast<int>(j)});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.pred_i != b.pred_i) return a.pred_i < b.pred_i;
    return a.gt_i < b.gt_i;
  });

  MatchResult out;
  std::vector<bool> pred_used(pred.size(), false), gt_used(gt.size(), false);
  for (const Candidate& c : cands) {
    if (pred_used[c.pred_i] || gt_used[c.gt_i]) continue;
    pred_used[c.pred_i] = true;
    gt_used[c.gt_i] = true;
    out.pairs.push_back({c.pred_i, c.gt_i, c.iou});
  }
  for (size_t i = 0; i < pred.size(); ++i)
    if (!pred_used[i]) out.unmatched_pred.push_back(static_cast<int>(i));
  for (size_t j = 0; j < gt.size(); ++j)
    if (!gt_used[j]) out.unmatched_gt.push_back(static_cast<int>(j));
  return out;
}

MatchResult match_tables(const Table& pred, const Table& gt,
                         double iou_threshold) {
  std::vector<SpatialQuad> pq, gq;
  pq.reserve(pred.cells.size());
  gq.reserve(gt.cells.size());
  for (const Cell& c : pred.cells) pq.push_back(c.quad);
  for (const Cell& c : gt.cells) gq.push_back(c.quad);
  MatchResult m = match_cells(pq, gq, iou_threshold);
  for (MatchPair& p : m.pairs) {
    p.pred_id = pred.cells[p.pred_id].id;
    p.gt_id = gt.cells[p.gt_id].id;
  }
  for (int& i : m.unmatched_pred) i = pred.cells[i].id;
  for (int& j : m.unmatched_gt) j = gt.cells[j].id;
  return m;
}

Prf detection_f1(const MatchResult& m) {
  return make_prf(m.pairs.size(), m.n_pred(), m.n_gt());
}

namespace {

std::map<int, const Cell*> cells_by_id(const Table& t) {
  std::map<int, const Cell*> out;
  for (const Cell& c : t.cells) out[c.id] = &c;
  return out;
}

}  // namespace

LogicalAccuracy logical_accuracy(const Table& pred, const Table& gt,
                                 const MatchResult& m) {
  auto pred_by_id = cells_by_id(pred);
  auto gt_by_id = cells_by_id(gt);

  LogicalAccuracy out;
  out.n_gt_cells = gt.cells.size();
  size_t correct_all = 0, correct_rows = 0, correct_cols = 0;
  size_t correct_span = 0;
  for (const Cell& g : gt.cells)
    if (g.logical.is_spanning()) ++out.n_spanning;

  for (const MatchPair& pair : m.pairs) {
    auto pit = pred_by_id.find(pair.pred_id);
    auto git = gt_by_id.find(pair.gt_id);
    if (pit == pred_by_id.end() || git == gt_by_id.end()) continue;
    const LogicalLocation& pl = pit->second->logical;
    const LogicalLocation& gl = git->second->logical;
    bool rows_ok = pl.start_row == gl.start_row && pl.end_row == gl.end_row;
    bool cols_ok = pl.start_col == gl.start_col && pl.end_col == gl.end_col;
    if (rows_ok) ++correct_rows;
    if (cols_ok) ++correct_cols;
    if (rows_ok && cols_ok) {
      ++correct_all;
      if (gl.is_spanning()) ++correct_span;
    }
  }

  auto frac = [](size_t num, size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / den;
  };
  out.all = frac(correct_all, out.n_gt_cells);
  out.rows = frac(correct_rows, out.n_gt_cells);
  out.cols = frac(correct_cols, out.n_gt_cells);
  out.spanning = out.n_spanning == 0 ? 1.0 : frac(correct_span, out.n_spanning);
  return out;
}

Prf adjacency_f1(const Table& pred, const Table& gt, const MatchResult& m) {
  std::map<int, int> pred_to_gt;
  for (const MatchPair& p : m.pairs) pred_to_gt[p.pred_id] = p.gt_id;

  auto gt_triplets = adjacency_triplets(gt);
  std::set<std::tuple<int, int, Axis>> gt_set;
  for (const AdjacencyTriplet& t : gt_triplets)
    gt_set.insert({t.id_a, t.id_b, t.axis});

  auto pred_triplets = adjacency_triplets(pred);
  size_t tp = 0;
  for (const AdjacencyTriplet& t : pred_triplets) {
    auto a = pred_to_gt.find(t.id_a);
    auto b = pred_to_gt.find(t.id_b);
    if (a == pred_to_gt.end() || b == pred_to_gt.end()) continue;
    int lo = std::min(a->second, b->second);
    int hi = std::max(a->second, b->second);
    if (gt_set.count({lo, hi, t.axis})) ++tp;
  }
  return make_prf(tp, pred_triplets.size(), gt_triplets.size());
}

std::string metrics_report_to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["detection_p"] = r.detection_p;
  j["detection_r"] = r.detection_r;
  j["detection_f1"] = r.detection_f1;
  j["adjacency_p"] = r.adjacency_p;
  j["adjacency_r"] = r.adjacency_r;
  j["adjacency_f1"] = r.adjacency_f1;
  j["logical_accuracy"] = r.logical_accuracy;
  j["logical_accuracy_spanning"] = r.logical_accuracy_spanning;
  j["teds"] = r.teds;
  j["bleu"] = r.bleu;
  j["spanning_cells"] = r.spanning_cells;
  return j.dump(2);
}

MetricsReport metrics_report_from_json(const std::string& s) {
  nlohmann::json j = nlohmann::json::parse(s);
  MetricsReport r;
  r.detection_p = j.at("detection_p").get<double>();
  r.detection_r = j.at("detection_r").get<double>();
  r.detection_f1 = j.at("detection_f1").get<double>();
  r.adjacency_p = j.at("adjacency_p").get<double>();
  r.adjacency_r = j.at("adjacency_r").get<double>();
  r.adjacency_f1 = j.at("adjacency_f1").get<double>();
  r.logical_accuracy = j.at("logical_accuracy").get<double>();
  r.logical_accuracy_spanning = j.at("logical_accuracy_spanning").get<double>();
  r.teds = j.at("teds").get<double>();
  r.bleu = j.at("bleu").get<double>();
  r.spanning_cells = j.value("spanning_cells", size_t{0});
  return r;
}

std::string metrics_report_summary(const MetricsReport& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << "detection   P " << r.detection_p << "  R " << r.detection_r
     << "  F1 " << r.detection_f1 << "\n"
     << "adjacency   P " << r.adjacency_p << "  R " << r.adjacency_r
     << "  F1 " << r.adjacency_f1 << "\n"
     << "logical acc " << r.logical_accuracy << "  (spanning "
     << r.logical_accuracy_spanning << ", n=" << r.spanning_cells << ")\n"
     << "teds        " << r.teds << "\n"
     << "bleu        " << r.bleu << "\n";
  return os.str();
}

}  // namespace tsr
