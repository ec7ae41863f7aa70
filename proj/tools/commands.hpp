#pragma once

#include <CLI11.hpp>

namespace gesture::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kBadFlags = 2,
  kDataError = 3,
  kNumericFailure = 4,
};

/// Adds the synth, ingest, augment, train, eval, stream and speed
/// subcommands. Each one runs from its CLI11 callback and appends a line to
/// the run manifest next to its outputs.
void register_commands(CLI::App& app);

}  // namespace gesture::cli
