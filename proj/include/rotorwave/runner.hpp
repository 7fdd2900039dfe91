#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "rotorwave/config.hpp"

namespace rotorwave {

struct RunOptions {
  std::optional<std::uint64_t> seed;     // overrides rpwf.master_seed
  std::optional<std::string> out_dir;    // overrides output.directory
  int threads = 1;                       // recorded; execution is serial
};

// Executes one subcommand (levels | static | dynamics | scaling), writing
// CSV tables and a manifest.json into the output directory.  Validation
// happens before any file is created.  Throws ConfigError, NumericalAbort,
// or GuardExceeded.
void run_command(const std::string& command, RunConfig cfg, const RunOptions& opt,
                 std::ostream& log);

// run_command with config loading and the documented exit-code mapping:
// 0 success, 2 config error, 3 numerical abort, 4 guard exceeded.
// An empty config_path uses the built-in defaults.
int execute_command(const std::string& command, const std::string& config_path,
                    const RunOptions& opt, std::ostream& log, std::ostream& err);

}  // namespace rotorwave
