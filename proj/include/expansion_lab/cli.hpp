#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "expansion_lab/smooth_map.hpp"

namespace xlab {

inline constexpr const char* kToolName = "expansion-lab";
inline constexpr const char* kToolVersion = "0.1.0";

enum class OutputFormat { Json, Csv, Both };

/// A fully resolved invocation. `params` holds every option of the subcommand, defaults included, and is
/// copied verbatim into the report header.
struct RunConfig {
  std::string subcommand;  // "ergodicity cover" etc. for nested modes
  std::string system_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;  // empty: write to the output stream
  OutputFormat format = OutputFormat::Json;
  json params = json::object();
};

/// Exit codes of `run`.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInputError = 2;

/// Executes a resolved configuration; reports go to `out` (or files under out_dir), diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses command-line arguments (without the program name) into a RunConfig and runs it.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xlab
