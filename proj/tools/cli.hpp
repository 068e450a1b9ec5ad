#pragma once

#include "sparse_forge/magnitudes.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace sparse_forge::cli {

enum ExitCode : int { kPass = 0, kError = 1, kCounterexample = 2, kUsage = 64 };

/// Everything that determines a run. Embedded in every artifact.
struct RunConfig {
  std::string command;
  std::string rule = "theorem-b";
  Regime regime = Regime::rational_fast;
  long precision_ceiling_bits = kDefaultCeilingBits;
  int depth = 6;
  std::uint64_t max_pairs = 100000;
  int refine = 0;
  std::uint64_t seed = 1;
  std::string out;
};

void to_json(nlohmann::json& j, const RunConfig& c);

/// Runs one command line (without the program name). Returns the exit code.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Writes through a temporary file and a rename; creates parent directories.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace sparse_forge::cli
