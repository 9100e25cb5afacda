#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace occtime::cli {

/// 64-bit FNV-1a; byte-oriented, so identical text hashes identically on
/// every platform.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::optional<std::uint64_t> seed;
  std::string version;
  double wall_time_seconds = 0.0;
  std::vector<std::string> outputs;

  std::string to_json() const;
};

/// Written next to `primary_output` as <primary_output>.manifest.json.
std::string manifest_path(const std::string& primary_output);
void write_manifest(const std::string& primary_output, const RunManifest& manifest);

std::string software_version();

}  // namespace occtime::cli
