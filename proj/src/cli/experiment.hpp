#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace regpomdp::cli {

struct RunOptions {
  std::optional<uint64_t> seed_override;
  std::optional<std::string> out_dir_override;
  bool resume = false;
  bool paper_budgets = false;  // multiply the desk-scale env budget back up by 10
};

struct SeedRunResult {
  uint64_t seed = 0;
  bool completed = false;
  bool skipped_existing = false;
  double final_success = 0.0;
  double final_return = 0.0;
  std::string metrics_path;
  std::string checkpoint_base;
};

// Paths of one seed's artifacts inside the experiment directory.
struct RunPaths {
  std::string dir;
  std::string metrics_csv;
  std::string manifest_json;
  std::string checkpoint_base;
  std::string config_copy;
};
RunPaths run_paths(const std::string& out_dir, uint64_t seed);

// Trains one seed end to end: metrics CSV, final checkpoint, manifest
// (written atomically on completion). With resume, a completed manifest short-
// circuits the run.
SeedRunResult run_single_seed(const ExperimentConfig& config, uint64_t seed, const std::string& out_dir,
                              bool resume);

// Runs every seed (parallel workers capped by REGPOMDP_THREADS), writes the
// summary JSON, and returns 0 iff all seeds completed.
int run_experiment(ExperimentConfig config, const RunOptions& options);

// Loads the checkpoint written by run_single_seed and rebuilds the agent and
// its experiment config.
struct LoadedAgent {
  ExperimentConfig config;
  uint64_t seed = 0;
  std::unique_ptr<rl::Agent> agent;
};
LoadedAgent load_agent_checkpoint(const std::string& checkpoint_base);

// Fig.-10-style scale sweep: re-runs the base experiment per (hidden, layers,
// heads) grid point with shared seeds; emits one metrics file per size.
struct ScalePoint {
  int hidden = 64;
  int layers = 2;
  int heads = 2;
};
int run_scale_study(const ExperimentConfig& base, const std::vector<ScalePoint>& grid, const RunOptions& options);

int parallel_workers(int jobs);

}  // namespace regpomdp::cli
