#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace otkit::cli {

struct RunManifest {
  std::string subcommand;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::vector<std::string> inputs;  // paths; digests are computed on write
  std::optional<std::uint64_t> seed;
  std::string backend;  // empty when not applicable
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;
  std::size_t peak_mem_bytes_estimate = 0;
  int threads = 1;

  nlohmann::ordered_json to_json() const;
};

// Sidecar manifest path for a result file: <output>.manifest.json.
std::string manifest_path_for(const std::string& output);

void write_manifest(const RunManifest& m, const std::string& path);

// Resident-set high-water mark from /proc (0 when unavailable).
std::size_t peak_rss_bytes();
// Resets the high-water mark where the kernel allows it.
void reset_peak_rss();

}  // namespace otkit::cli
