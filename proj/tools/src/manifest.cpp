#include "manifest.hpp"

#include <cstdio>

#include "json.hpp"
#include "occtime/grid.hpp"

#ifndef OCCTIME_VERSION
#define OCCTIME_VERSION "unknown"
#endif

namespace occtime::cli {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
  j["version"] = version;
  j["wall_time_seconds"] = wall_time_seconds;
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

std::string manifest_path(const std::string& primary_output) {
  return primary_output + ".manifest.json";
}

void write_manifest(const std::string& primary_output, const RunManifest& manifest) {
  write_file_atomic(manifest_path(primary_output), manifest.to_json());
}

std::string software_version() { return OCCTIME_VERSION; }

}  // namespace occtime::cli
