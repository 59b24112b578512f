#pragma once

#include <span>
#include <string>
#include <vector>

#include "models/embedding.hpp"
#include "models/gpt.hpp"

namespace regpomdp::analysis {

struct PerturbationRow {
  int n = 0;
  double max_delta = 0.0;
  double mean_delta = 0.0;
};

struct PerturbationReport {
  std::vector<PerturbationRow> rows;
  double slope = 0.0;           // least-squares fit of log(max_delta) vs log(n)
  double embed_distance = 0.0;  // D = |u(0) - u(1)| for the flipped token pair
};

// Single-token sensitivity of a randomly initialized causal transformer: for
// each sequence length n, flip one binary token at a random non-final
// position and record the L2 change of the final-position hidden. The
// attention bound predicts the max decays like 1/n.
PerturbationReport perturbation_probe(const models::GptConfig& gpt_config,
                                      const models::EmbeddingConfig& embed_config, std::span<const int> n_grid,
                                      int trials, Rng& rng);

void write_perturbation_csv(const std::string& path, const PerturbationReport& report);

}  // namespace regpomdp::analysis
