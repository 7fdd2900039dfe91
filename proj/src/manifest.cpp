#include "rotorwave/manifest.hpp"

#include <cstdio>
#include <fstream>

#include "rotorwave/errors.hpp"

namespace rotorwave {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json manifest_json(const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash;
  j["constants_version"] = m.constants_version;
  j["tool_version"] = m.tool_version;
  j["master_seed"] = m.master_seed;
  j["threads"] = m.threads;
  j["wall_time_s"] = m.wall_time_s;
  nlohmann::json stages = nlohmann::json::array();
  for (const StageTiming& s : m.stages)
    stages.push_back({{"name", s.name}, {"seconds", s.seconds}});
  j["stages"] = stages;
  j["warnings"] = m.warnings;
  if (!m.extra.is_null()) j["extra"] = m.extra;
  return j;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write manifest '" + path + "'");
  out << manifest_json(m).dump(2) << "\n";
}

}  // namespace rotorwave
