#pragma once

#include <string>
#include <vector>

#include "envs/lang_pomdp.hpp"
#include "rl/agent.hpp"

namespace regpomdp::analysis {

// Hidden vectors labelled with the POMDP state (q, w) the observation history
// maps to; the post-terminal step is labelled "T".
struct LabeledHiddenSet {
  int dim = 0;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::vector<std::string> label_names;  // indexed by label id
  std::vector<int> episode_rows;         // rows recorded per episode
};

// Runs greedy episodes, recording the final-layer hidden at every step plus
// one post-terminal step on the env's terminal observation.
LabeledHiddenSet probe_hidden(rl::Agent& agent, envs::LangPomdp& env, int episodes, Rng& rng);

// Mean silhouette over points with Euclidean distances; singleton clusters
// and fully degenerate points contribute 0. Throws when fewer than two
// labels are present.
double silhouette(const LabeledHiddenSet& set);

void write_labeled_csv(const std::string& path, const LabeledHiddenSet& set);

}  // namespace regpomdp::analysis
