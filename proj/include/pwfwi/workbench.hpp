#pragma once

#include <cstdint>
#include <string>

#include "pwfwi/run_config.hpp"

namespace pwfwi {

// Flags shared by every CLI command.  All relative paths (config values and
// outputs alike) are resolved against the working directory, which the CLI
// sets to --out-dir before dispatching.
struct WorkbenchOptions {
  std::uint64_t seed = 1;
  int verbosity = 0;  // PWFWI_LOG: 0 quiet, 1 batch summaries, 2 per iteration
};

// Build the true model (grid.true_model) and write it as
// <prefix>_true_velocity.bin and <prefix>_true_slowness2.bin.
void run_synth(const RunConfig& cfg, const WorkbenchOptions& opt);

// Simulate noiseless data for every frequency in the schedule and write it to
// acquisition.data.
void run_simulate(const RunConfig& cfg, const WorkbenchOptions& opt);

// Full inversion run: reads acquisition.data, runs the continuation schedule,
// writes <prefix>_log.csv (one row per outer iteration, flushed as it goes),
// <prefix>_header.txt (every resolved parameter plus the derived per-batch
// penalty weights), and the final model rasters.  Returns the final relative
// model error when a true model is configured.
double run_invert(const RunConfig& cfg, const WorkbenchOptions& opt);

// Regularizer sweep over regularizer.compare_kinds, grid-searching
// regularizer.compare_alphas for the compound kinds.  Each sub-run writes its
// own log; every finished sub-run appends to <prefix>_runs.csv immediately,
// and the final ranking (best alpha per kind, normalized column) lands in
// <prefix>_ranking.csv.
void run_compare(const RunConfig& cfg, const WorkbenchOptions& opt);

// Relative l2 model error between two rasters (converted to squared
// slowness); grids may differ in shape but not in cell count.
double model_error_files(const std::string& model_path, const std::string& true_path);

}  // namespace pwfwi
