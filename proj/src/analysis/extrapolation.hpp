#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "envs/lang_pomdp.hpp"
#include "rl/agent.hpp"

namespace regpomdp::analysis {

struct ExtrapolationRow {
  int length = 0;
  double accuracy = 0.0;
  int episodes = 0;
  bool structural_failure = false;  // e.g. GPT position table overflow
};

struct ExtrapolationReport {
  int train_n = 0;
  std::vector<ExtrapolationRow> rows;
};

// Decides the terminal action for a batch of equal-length episodes given
// their observation rows (batch-major [episodes*steps, obs_dim]).
using TerminalPolicy =
    std::function<std::vector<int>(const Tensor& obs_flat, int episodes, int steps)>;

TerminalPolicy agent_terminal_policy(rl::Agent& agent);
TerminalPolicy oracle_terminal_policy(const automata::Dfa& dfa);
TerminalPolicy random_terminal_policy(Rng& rng);

// Greedy terminal-decision accuracy at exact word lengths
// {train_n / 2} + {train_n + i : i in offsets}, measured over
// episodes_per_length fresh episodes each.
ExtrapolationReport extrapolation_eval(const TerminalPolicy& policy, envs::LangPomdp& env, int train_n,
                                       std::span<const int> offsets, int episodes_per_length, Rng& rng);

void write_extrapolation_csv(const std::string& path, const ExtrapolationReport& report);

}  // namespace regpomdp::analysis
