#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace rotorwave {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kConstantsVersion = "so2-tables-1";

std::uint64_t fnv1a64(std::string_view data);
std::string hash_hex(std::uint64_t h);

struct StageTiming {
  std::string name;
  double seconds = 0.0;
};

// Written next to every set of output files; data files carry the config
// hash in their first line so a trace can be matched to the manifest that
// produced it.
struct RunManifest {
  std::string command;
  std::string config_hash;  // fnv1a64 of the canonical config serialization
  std::string constants_version{kConstantsVersion};
  std::string tool_version{kToolVersion};
  std::uint64_t master_seed = 0;
  int threads = 1;
  double wall_time_s = 0.0;
  std::vector<StageTiming> stages;
  std::vector<std::string> warnings;
  nlohmann::json extra;  // command-specific scalars (peak fields, fits, ...)
};

nlohmann::json manifest_json(const RunManifest& m);
void write_manifest(const std::string& path, const RunManifest& m);

}  // namespace rotorwave
