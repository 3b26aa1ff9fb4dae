#include "cli/manifest.hpp"

#include <fstream>
#include <sstream>

#include "otkit/error.hpp"
#include "otkit/io.hpp"

namespace otkit::cli {

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["subcommand"] = subcommand;
  j["parameters"] = parameters;
  auto ins = nlohmann::ordered_json::array();
  for (const auto& p : inputs) ins.push_back({{"path", p}, {"digest", io::file_digest(p)}});
  j["inputs"] = ins;
  if (seed) {
    j["seed"] = *seed;
  } else {
    j["seed"] = nullptr;
  }
  if (backend.empty()) {
    j["backend"] = nullptr;
  } else {
    j["backend"] = backend;
  }
  j["outputs"] = outputs;
  j["threads"] = threads;
  j["wall_seconds"] = wall_seconds;
  j["peak_mem_bytes_estimate"] = peak_mem_bytes_estimate;
  return j;
}

std::string manifest_path_for(const std::string& output) { return output + ".manifest.json"; }

void write_manifest(const RunManifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write manifest " + path);
  out << m.to_json().dump(2) << '\n';
}

std::size_t peak_rss_bytes() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream ss(line.substr(6));
      std::size_t kb = 0;
      ss >> kb;
      return kb * 1024;
    }
  }
  return 0;
}

void reset_peak_rss() {
  std::ofstream out("/proc/self/clear_refs");
  if (out) out << "5";
}

}  // namespace otkit::cli
