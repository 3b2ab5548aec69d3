#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tsr {

inline constexpr const char* kToolVersion = "0.1.0";

/// One manifest per CLI run, written next to the primary output. Everything
/// needed to reproduce the run is in argv/config/seed; wall_clock_sec is
/// informational and excluded from determinism comparisons.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string config_json;  // resolved flag values
  uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, hash
  std::vector<std::string> outputs;
  std::string version = kToolVersion;
  double wall_clock_sec = 0.0;
};

void write_manifest(const std::string& path, const RunManifest& m);

/// FNV-1a 64-bit hash of the file bytes, hex encoded.
std::string file_content_hash(const std::string& path);

std::string manifest_path_for(const std::string& output_path);

}  // namespace tsr
