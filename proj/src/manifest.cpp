#include "tsr/manifest.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tsr {

void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  if (!m.config_json.empty())
    j["config"] = nlohmann::json::parse(m.config_json);
  j["seed"] = m.seed;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  for (const auto& [p, h] : m.inputs) {
    nlohmann::ordered_json e;
    e["path"] = p;
    e["fnv1a64"] = h;
    inputs.push_back(std::move(e));
  }
  j["inputs"] = std::move(inputs);
  j["outputs"] = m.outputs;
  j["version"] = m.version;
  j["wall_clock_sec"] = m.wall_clock_sec;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << j.dump(2) << "\n";
}

std::string file_content_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash missing file: " + path);
  uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

std::string manifest_path_for(const std::string& output_path) {
  return output_path + ".manifest.json";
}

}  // namespace tsr
