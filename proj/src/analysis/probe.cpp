#include "analysis/probe.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

namespace regpomdp::analysis {

LabeledHiddenSet probe_hidden(rl::Agent& agent, envs::LangPomdp& env, int episodes, Rng& rng) {
  if (agent.obs_dim() != env.observation_size() || agent.action_count() != env.action_count()) {
    throw std::invalid_argument("probe_hidden: agent was built for a different environment interface");
  }
  const int symbols = env.observation_size();  // alphabet + '#'
  const int states = env.dfa().num_states;

  LabeledHiddenSet set;
  set.dim = agent.model().hidden_size();
  set.label_names.reserve(static_cast<size_t>(states * symbols) + 1);
  for (int q = 0; q < states; ++q) {
    for (int w = 0; w < symbols; ++w) {
      const std::string sym = (w == env.end_symbol()) ? "#" : std::to_string(w);
      set.label_names.push_back("(q" + std::to_string(q) + "," + sym + ")");
    }
  }
  set.label_names.push_back("T");
  const int terminal_label = states * symbols;

  for (int e = 0; e < episodes; ++e) {
    rl::Agent::Rollout rollout = agent.begin_rollout(1);
    envs::DfaShadow shadow(env.dfa());
    std::vector<double> obs = env.reset(rng);
    int prev_action = -1;
    double prev_reward = 0.0;
    int rows = 0;
    while (true) {
      rollout.prev_action[0] = prev_action;
      rollout.prev_reward[0] = prev_reward;
      rl::Agent::StepOutput out = agent.rollout_step(rollout, obs);
      const int symbol = env.current_symbol();
      set.rows.emplace_back(out.hidden.data(), out.hidden.data() + set.dim);
      set.labels.push_back(shadow.state_before() * symbols + symbol);
      ++rows;

      shadow.consume(symbol);
      const int action = static_cast<int>(ops::argmax_rows(out.q)[0]);
      envs::StepResult res = env.step(action, rng);
      prev_action = action;
      prev_reward = res.reward;
      obs = res.observation;
      if (res.done) {
        // One more step on the terminal observation.
        rollout.prev_action[0] = prev_action;
        rollout.prev_reward[0] = prev_reward;
        rl::Agent::StepOutput last = agent.rollout_step(rollout, obs);
        set.rows.emplace_back(last.hidden.data(), last.hidden.data() + set.dim);
        set.labels.push_back(terminal_label);
        ++rows;
        break;
      }
    }
    set.episode_rows.push_back(rows);
  }
  return set;
}

double silhouette(const LabeledHiddenSet& set) {
  const size_t n = set.rows.size();
  std::set<int> distinct(set.labels.begin(), set.labels.end());
  if (distinct.size() < 2) throw std::invalid_argument("silhouette: need at least two labels");

  const int max_label = *distinct.rbegin();
  std::vector<int> counts(static_cast<size_t>(max_label) + 1, 0);
  for (int l : set.labels) ++counts[static_cast<size_t>(l)];

  double total = 0.0;
  std::vector<double> mean_to(static_cast<size_t>(max_label) + 1, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const int li = set.labels[i];
    if (counts[static_cast<size_t>(li)] == 1) continue;  // singleton contributes 0

    std::fill(mean_to.begin(), mean_to.end(), 0.0);
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double sq = 0.0;
      const auto& a = set.rows[i];
      const auto& b = set.rows[j];
      for (int c = 0; c < set.dim; ++c) {
        const double d = a[static_cast<size_t>(c)] - b[static_cast<size_t>(c)];
        sq += d * d;
      }
      mean_to[static_cast<size_t>(set.labels[j])] += std::sqrt(sq);
    }
    const double a_i = mean_to[static_cast<size_t>(li)] / static_cast<double>(counts[static_cast<size_t>(li)] - 1);
    double b_i = std::numeric_limits<double>::max();
    for (int l : distinct) {
      if (l == li || counts[static_cast<size_t>(l)] == 0) continue;
      b_i = std::min(b_i, mean_to[static_cast<size_t>(l)] / static_cast<double>(counts[static_cast<size_t>(l)]));
    }
    const double denom = std::max(a_i, b_i);
    total += denom > 0.0 ? (b_i - a_i) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

void write_labeled_csv(const std::string& path, const LabeledHiddenSet& set) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "label,label_name,hidden\n";
  char buf[64];
  for (size_t i = 0; i < set.rows.size(); ++i) {
    out << set.labels[i] << "," << set.label_names[static_cast<size_t>(set.labels[i])] << ",\"";
    for (int c = 0; c < set.dim; ++c) {
      std::snprintf(buf, sizeof(buf), "%.10g", set.rows[i][static_cast<size_t>(c)]);
      out << (c ? ";" : "") << buf;
    }
    out << "\"\n";
  }
}

}  // namespace regpomdp::analysis
