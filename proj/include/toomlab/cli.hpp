#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "toomlab/io.hpp"

namespace toomlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNonEroder = 2;

struct Invocation {
  std::string command;  // check, erode, simulate, exact, correlate, scan, divergence
  std::optional<std::filesystem::path> config_path;
  std::optional<io::Json> config;  // inline config, used when no path is given
  std::optional<std::string> rule;  // overrides the config's rule
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::filesystem::path out_dir = "toomlab_out";
};

/// Runs one command; writes artifacts under `out_dir`, a JSON report (or a
/// JSON error object) to `out`, and returns the process exit code.
int run(const Invocation& inv, std::ostream& out);

/// argv front end: toomlab <command> --config PATH [--seed N] [--threads N] [--out DIR]
int main(int argc, char** argv);

}  // namespace toomlab::cli
