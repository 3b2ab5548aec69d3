#include "tsr/dataset.hpp"

#include <fstream>

#include "json.hpp"

namespace tsr {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json quad_to_json(const SpatialQuad& q) {
  ordered_json arr = ordered_json::array();
  for (const Point& p : q.corners) arr.push_back({p.x, p.y});
  return arr;
}

SpatialQuad quad_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4)
    throw std::runtime_error("quad must be an array of 4 points");
  SpatialQuad q;
  for (size_t k = 0; k < 4; ++k) {
    q.corners[k].x = j[k].at(0).get<double>();
    q.corners[k].y = j[k].at(1).get<double>();
  }
  return q;
}

ordered_json table_to_json_obj(const Table& t) {
  ordered_json j;
  j["image_size"] = {t.image_width, t.image_height};
  j["n_rows"] = t.n_rows;
  j["n_cols"] = t.n_cols;
  ordered_json cells = ordered_json::array();
  for (const Cell& c : t.cells) {
    ordered_json cj;
    cj["id"] = c.id;
    cj["quad"] = quad_to_json(c.quad);
    cj["logical"] = {c.logical.start_row, c.logical.end_row,
                     c.logical.start_col, c.logical.end_col};
    if (c.text) cj["text"] = *c.text;
    cells.push_back(std::move(cj));
  }
  j["cells"] = std::move(cells);
  return j;
}

Table table_from_json_obj(const json& j) {
  Table t;
  const auto& sz = j.at("image_size");
  t.image_width = sz.at(0).get<double>();
  t.image_height = sz.at(1).get<double>();
  t.n_rows = j.at("n_rows").get<int>();
  t.n_cols = j.at("n_cols").get<int>();
  for (const auto& cj : j.at("cells")) {
    Cell c;
    c.id = cj.at("id").get<int>();
    c.quad = quad_from_json(cj.at("quad"));
    const auto& lg = cj.at("logical");
    if (!lg.is_array() || lg.size() != 4)
      throw std::runtime_error("logical must be [sr,er,sc,ec]");
    c.logical = {lg[0].get<int>(), lg[1].get<int>(), lg[2].get<int>(),
                 lg[3].get<int>()};
    if (cj.contains("text") && cj["text"].is_string())
      c.text = cj["text"].get<std::string>();
    t.cells.push_back(std::move(c));
  }
  return t;
}

ordered_json word_to_json(const WordBox& w) {
  ordered_json j;
  j["box"] = {w.box.x0, w.box.y0, w.box.x1, w.box.y1};
  j["grid_row"] = w.grid_row;
  j["grid_col"] = w.grid_col;
  j["cell_id"] = w.cell_id;
  return j;
}

WordBox word_from_json(const json& j) {
  WordBox w;
  const auto& b = j.at("box");
  w.box = Rect{b.at(0).get<double>(), b.at(1).get<double>(),
               b.at(2).get<double>(), b.at(3).get<double>()};
  w.grid_row = j.at("grid_row").get<int>();
  w.grid_col = j.at("grid_col").get<int>();
  w.cell_id = j.at("cell_id").get<int>();
  return w;
}

}  // namespace

std::string table_to_json(const Table& t) {
  return table_to_json_obj(t).dump();
}

Table table_from_json(const std::string& s) {
  return table_from_json_obj(json::parse(s));
}

std::string record_to_json_line(const DatasetRecord& r) {
  ordered_json j = table_to_json_obj(r.table);
  j["index"] = r.index;
  if (!r.words.empty()) {
    ordered_json words = ordered_json::array();
    for (const WordBox& w : r.words) words.push_back(word_to_json(w));
    j["words"] = std::move(words);
  }
  if (!r.ldp_pairs.empty()) {
    ordered_json pairs = ordered_json::array();
    for (const LdpPairLabel& p : r.ldp_pairs) {
      ordered_json pj;
      pj["a"] = p.a;
      pj["b"] = p.b;
      pj["row_dist"] = p.row_dist;
      pj["col_dist"] = p.col_dist;
      pairs.push_back(std::move(pj));
    }
    j["ldp_pairs"] = std::move(pairs);
  }
  return j.dump();
}

DatasetRecord record_from_json_line(const std::string& line, size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const std::exception& e) {
    throw DatasetError(std::string("invalid JSON: ") + e.what(), line_no);
  }
  try {
    DatasetRecord r;
    r.table = table_from_json_obj(j);
    r.index = j.value("index", int64_t{0});
    if (j.contains("words"))
      for (const auto& wj : j["words"]) r.words.push_back(word_from_json(wj));
    if (j.contains("ldp_pairs")) {
      for (const auto& pj : j["ldp_pairs"]) {
        LdpPairLabel p;
        p.a = pj.at("a").get<int>();
        p.b = pj.at("b").get<int>();
        p.row_dist = pj.at("row_dist").get<int>();
        p.col_dist = pj.at("col_dist").get<int>();
        r.ldp_pairs.push_back(p);
      }
    }
    return r;
  } catch (const DatasetError&) {
    throw;
  } catch (const std::exception& e) {
    throw DatasetError(e.what(), line_no);
  }
}

void write_dataset(const std::string& path,
                   const std::vector<DatasetRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const DatasetRecord& r : records) out << record_to_json_line(r) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<DatasetRecord> read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<DatasetRecord> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    out.push_back(record_from_json_line(line, line_no));
  }
  return out;
}

}  // namespace tsr
