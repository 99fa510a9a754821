#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ciliaflow/config.hpp"
#include "ciliaflow/error.hpp"
#include "ciliaflow/optimal_control.hpp"

namespace ciliaflow {

/// Process exit codes shared by every command.
enum ExitCode : int {
  exit_success = 0,
  exit_validation = 1,
  exit_numerical = 2,
};

/// Maps a typed error to its exit code: numerical failures give 2,
/// everything else (parse, validation, I/O, bad arguments) gives 1.
int exit_code_for(ErrorCode code) noexcept;

/// Initial chain for every command: straight along z at rest spacing.
ChainState initial_state(const PhysicalParams& params);

/// Streams used for progress and diagnostics.
struct CommandStreams {
  std::ostream& out;
  std::ostream& err;
};

/// Each command writes into config.output_dir (created if missing), never
/// throws, and returns an ExitCode value.
int cmd_simulate(const RunConfig& config, const CommandStreams& io);
int cmd_optimize(const RunConfig& config, const CommandStreams& io);
int cmd_gradcheck(const RunConfig& config, const CommandStreams& io);
int cmd_sweep(const RunConfig& config, const CommandStreams& io);

/// Sweep worker count: hardware concurrency, capped by CILIAFLOW_THREADS
/// when set to a positive integer, and by the number of presets.
int sweep_threads(int presets);

GradientCheckSettings to_check_settings(const GradcheckSettings& settings);

}  // namespace ciliaflow
