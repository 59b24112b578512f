#include "analysis/extrapolation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace regpomdp::analysis {

TerminalPolicy agent_terminal_policy(rl::Agent& agent) {
  if (agent.embed_config().uses_action() || agent.embed_config().uses_reward()) {
    throw std::invalid_argument("agent_terminal_policy: agent embeds action/reward feedback, which the batched "
                                "terminal-decision path cannot replay");
  }
  return [&agent](const Tensor& obs_flat, int episodes, int steps) {
    rl::Agent::BatchInputs inputs;
    inputs.obs = obs_flat;
    Tensor q = agent.q_values(nullptr, agent.hiddens(nullptr, inputs, episodes, steps));
    const int A = agent.action_count();
    const double* qd = q.data();
    std::vector<int> actions(static_cast<size_t>(episodes));
    for (int e = 0; e < episodes; ++e) {
      const int64_t row = static_cast<int64_t>(e) * steps + steps - 1;
      int best = 0;
      for (int a = 1; a < A; ++a)
        if (qd[row * A + a] > qd[row * A + best]) best = a;
      actions[static_cast<size_t>(e)] = best;
    }
    return actions;
  };
}

TerminalPolicy oracle_terminal_policy(const automata::Dfa& dfa) {
  automata::Dfa copy = dfa;
  return [copy](const Tensor& obs_flat, int episodes, int steps) {
    const int obs_dim = static_cast<int>(obs_flat.dim(1));
    std::vector<int> actions(static_cast<size_t>(episodes));
    for (int e = 0; e < episodes; ++e) {
      envs::DfaShadow shadow(copy);
      for (int t = 0; t < steps; ++t) {
        const double* row = obs_flat.data() + (static_cast<int64_t>(e) * steps + t) * obs_dim;
        int symbol = 0;
        for (int c = 1; c < obs_dim; ++c)
          if (row[c] > row[symbol]) symbol = c;
        if (t + 1 == steps) {
          actions[static_cast<size_t>(e)] = shadow.action(symbol);
        } else {
          shadow.consume(symbol);
        }
      }
    }
    return actions;
  };
}

TerminalPolicy random_terminal_policy(Rng& rng) {
  Rng* r = &rng;
  return [r](const Tensor&, int episodes, int) {
    std::vector<int> actions(static_cast<size_t>(episodes));
    for (int e = 0; e < episodes; ++e) actions[static_cast<size_t>(e)] = r->uniform_int(2);
    return actions;
  };
}

ExtrapolationReport extrapolation_eval(const TerminalPolicy& policy, envs::LangPomdp& env, int train_n,
                                       std::span<const int> offsets, int episodes_per_length, Rng& rng) {
  ExtrapolationReport report;
  report.train_n = train_n;
  std::vector<int> lengths;
  lengths.push_back(train_n / 2);
  for (int i : offsets) lengths.push_back(train_n + i);

  const int obs_dim = env.observation_size();
  for (int len : lengths) {
    ExtrapolationRow row;
    row.length = len;
    env.force_word_length(len);
    const int steps = len + 1;  // word plus the end marker
    const int chunk = 100;
    int correct = 0;
    int done_eps = 0;
    try {
      while (done_eps < episodes_per_length) {
        const int n = std::min(chunk, episodes_per_length - done_eps);
        Tensor flat = Tensor::zeros({static_cast<int64_t>(n) * steps, obs_dim});
        std::vector<bool> member(static_cast<size_t>(n));
        for (int e = 0; e < n; ++e) {
          std::vector<double> obs = env.reset(rng);
          envs::DfaShadow shadow(env.dfa());
          for (int t = 0; t < steps; ++t) {
            std::copy(obs.begin(), obs.end(),
                      flat.data() + (static_cast<int64_t>(e) * steps + t) * obs_dim);
            const int symbol = env.current_symbol();
            if (symbol == env.end_symbol()) {
              member[static_cast<size_t>(e)] = env.dfa().is_accepting(shadow.state_before());
              env.step(envs::LangPomdp::kActionReject, rng);
              break;
            }
            shadow.consume(symbol);
            obs = env.step(envs::LangPomdp::kActionReject, rng).observation;
          }
        }
        std::vector<int> actions = policy(flat, n, steps);
        for (int e = 0; e < n; ++e) {
          const bool accepted = actions[static_cast<size_t>(e)] == envs::LangPomdp::kActionAccept;
          if (accepted == member[static_cast<size_t>(e)]) ++correct;
        }
        done_eps += n;
      }
      row.accuracy = static_cast<double>(correct) / static_cast<double>(episodes_per_length);
      row.episodes = episodes_per_length;
    } catch (const models::PositionOverflowError&) {
      row.structural_failure = true;
      row.accuracy = 0.0;
      row.episodes = done_eps;
    }
    report.rows.push_back(row);
  }
  env.force_word_length(std::nullopt);
  return report;
}

void write_extrapolation_csv(const std::string& path, const ExtrapolationReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "length,accuracy,episodes,structural_failure\n";
  char buf[64];
  for (const ExtrapolationRow& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%.10g", row.accuracy);
    out << row.length << "," << buf << "," << row.episodes << "," << (row.structural_failure ? 1 : 0) << "\n";
  }
}

}  // namespace regpomdp::analysis
