#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "automata/dfa.hpp"
#include "envs/env.hpp"

namespace regpomdp::envs {

// How word lengths are drawn when emitting a string from the DFA's alphabet.
// GEOMETRIC terminates each step with probability p (lengths are geometric,
// truncated at the horizon bound when one is set); UNIFORM pre-samples the
// length uniformly from [min_len, max_len].
struct LengthDist {
  enum class Kind { kGeometric, kUniform };
  Kind kind = Kind::kUniform;
  double p = 1.0 / 3.0;
  int min_len = 1;
  int max_len = 1;

  static LengthDist geometric(double p);
  static LengthDist uniform(int min_len, int max_len);
};

nlohmann::json length_dist_to_json(const LengthDist& dist);
LengthDist length_dist_from_json(const nlohmann::json& j);

// The POMDP derived from a regular language: observations are the symbols of
// a random word followed by the end marker '#', actions are accept/reject,
// and the only reward is 1 at the '#' step iff the chosen action matches
// membership of the emitted word.
class LangPomdp : public Env {
 public:
  static constexpr int kActionReject = 0;
  static constexpr int kActionAccept = 1;

  LangPomdp(automata::Dfa dfa, std::optional<int> horizon_bound, LengthDist dist, double gamma);

  int observation_size() const override { return dfa_.alphabet_size + 1; }
  int action_count() const override { return 2; }
  int max_episode_steps() const override;

  std::vector<double> reset(Rng& rng) override;
  StepResult step(int action, Rng& rng) override;
  bool done() const override { return done_; }

  std::unique_ptr<Env> clone() const override;

  // Evaluation hooks: force the next episodes to use an exact word length or
  // an exact word. Pass std::nullopt to clear.
  void force_word_length(std::optional<int> len);
  void force_word(std::optional<std::vector<int>> word);

  const automata::Dfa& dfa() const { return dfa_; }
  std::optional<int> horizon_bound() const { return horizon_bound_; }
  const LengthDist& length_dist() const { return dist_; }
  double gamma() const { return gamma_; }

  // Shadow state of the running episode (for tests and probes).
  int dfa_state() const { return dfa_state_; }
  int current_symbol() const { return current_symbol_; }
  int end_symbol() const { return dfa_.alphabet_size; }

  nlohmann::json spec_to_json() const;
  static LangPomdp from_json(const nlohmann::json& j);

 private:
  int sample_symbol(Rng& rng);
  int draw_length(Rng& rng);

  automata::Dfa dfa_;
  std::optional<int> horizon_bound_;
  LengthDist dist_;
  double gamma_ = 1.0;

  // Episode state.
  int dfa_state_ = 0;
  int current_symbol_ = 0;  // in [0, alphabet_size]; alphabet_size encodes '#'
  int emitted_ = 0;         // language symbols consumed so far
  int pending_word_len_ = -1;  // -1 in geometric mode
  bool done_ = true;

  std::optional<int> forced_len_;
  std::optional<std::vector<int>> forced_word_;
};

// One step of the optimal policy: the caller tracks the DFA state from the
// observed symbols; at '#' accept iff that state accepts, otherwise emit a
// fixed action.
int oracle_action(const automata::Dfa& dfa, int running_state, int observed_symbol);

// Tracks (q_t, w_t) from observations, mirroring the environment's hidden
// state for probing and oracle play.
class DfaShadow {
 public:
  explicit DfaShadow(const automata::Dfa& dfa) : dfa_(&dfa), state_(dfa.start) {}
  void reset() { state_ = dfa_->start; }
  // Call once per observation, before consuming it into the state.
  int state_before() const { return state_; }
  void consume(int symbol) {
    if (symbol < dfa_->alphabet_size) state_ = dfa_->next(state_, symbol);
  }
  int action(int observed_symbol) const { return oracle_action(*dfa_, state_, observed_symbol); }

 private:
  const automata::Dfa* dfa_;
  int state_;
};

}  // namespace regpomdp::envs
