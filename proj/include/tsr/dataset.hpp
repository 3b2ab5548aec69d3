#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsr/synth.hpp"
#include "tsr/table.hpp"

namespace tsr {

struct DatasetRecord {
  int64_t index = 0;
  Table table;
  std::vector<WordBox> words;
  std::vector<LdpPairLabel> ldp_pairs;
};

class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::string& what, size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

std::string table_to_json(const Table& t);
Table table_from_json(const std::string& s);

std::string record_to_json_line(const DatasetRecord& r);
DatasetRecord record_from_json_line(const std::string& line, size_t line_no);

/// Newline-delimited JSON, one record per line.
void write_dataset(const std::string& path,
                   const std::vector<DatasetRecord>& records);
std::vector<DatasetRecord> read_dataset(const std::string& path);

}  // namespace tsr
