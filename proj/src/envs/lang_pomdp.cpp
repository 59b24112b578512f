#include "envs/lang_pomdp.hpp"

#include <span>
#include <stdexcept>

namespace regpomdp::envs {

LengthDist LengthDist::geometric(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("geometric length distribution needs p in (0, 1]");
  LengthDist d;
  d.kind = Kind::kGeometric;
  d.p = p;
  return d;
}

LengthDist LengthDist::uniform(int min_len, int max_len) {
  if (min_len < 0 || max_len < min_len) {
    throw std::invalid_argument("uniform length distribution needs 0 <= min_len <= max_len, got [" +
                                std::to_string(min_len) + ", " + std::to_string(max_len) + "]");
  }
  LengthDist d;
  d.kind = Kind::kUniform;
  d.min_len = min_len;
  d.max_len = max_len;
  return d;
}

nlohmann::json length_dist_to_json(const LengthDist& dist) {
  if (dist.kind == LengthDist::Kind::kGeometric) return {{"kind", "geometric"}, {"p", dist.p}};
  return {{"kind", "uniform"}, {"min_len", dist.min_len}, {"max_len", dist.max_len}};
}

LengthDist length_dist_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "geometric") return LengthDist::geometric(j.at("p").get<double>());
  if (kind == "uniform") return LengthDist::uniform(j.at("min_len").get<int>(), j.at("max_len").get<int>());
  throw std::invalid_argument("unknown length distribution kind '" + kind + "'");
}

LangPomdp::LangPomdp(automata::Dfa dfa, std::optional<int> horizon_bound, LengthDist dist, double gamma)
    : dfa_(std::move(dfa)), horizon_bound_(horizon_bound), dist_(dist), gamma_(gamma) {
  dfa_.validate();
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (horizon_bound_ && *horizon_bound_ < 0) throw std::invalid_argument("horizon bound must be non-negative");
  if (dist_.kind == LengthDist::Kind::kUniform && horizon_bound_ && dist_.max_len > *horizon_bound_) {
    throw std::invalid_argument("uniform length bound " + std::to_string(dist_.max_len) +
                                " exceeds horizon bound " + std::to_string(*horizon_bound_));
  }
}

int LangPomdp::max_episode_steps() const {
  if (horizon_bound_) return *horizon_bound_ + 1;
  if (dist_.kind == LengthDist::Kind::kUniform) return dist_.max_len + 1;
  return -1;  // unbounded
}

std::unique_ptr<Env> LangPomdp::clone() const {
  auto copy = std::make_unique<LangPomdp>(dfa_, horizon_bound_, dist_, gamma_);
  copy->forced_len_ = forced_len_;
  copy->forced_word_ = forced_word_;
  return copy;
}

void LangPomdp::force_word_length(std::optional<int> len) {
  // Forced lengths may exceed the horizon bound; that is the extrapolation hook.
  forced_len_ = len;
}

void LangPomdp::force_word(std::optional<std::vector<int>> word) {
  if (word) {
    for (int s : *word) {
      if (s < 0 || s >= dfa_.alphabet_size) throw std::invalid_argument("forced word contains invalid symbol");
    }
  }
  forced_word_ = std::move(word);
}

int LangPomdp::draw_length(Rng& rng) {
  if (forced_word_) return static_cast<int>(forced_word_->size());
  if (forced_len_) return *forced_len_;
  if (dist_.kind == LengthDist::Kind::kUniform) {
    return dist_.min_len + rng.uniform_int(dist_.max_len - dist_.min_len + 1);
  }
  return -1;  // geometric: decided one step at a time
}

int LangPomdp::sample_symbol(Rng& rng) {
  if (forced_word_) return (*forced_word_)[static_cast<size_t>(emitted_)];
  return rng.uniform_int(dfa_.alphabet_size);
}

std::vector<double> LangPomdp::reset(Rng& rng) {
  dfa_state_ = dfa_.start;
  emitted_ = 0;
  done_ = false;
  pending_word_len_ = draw_length(rng);

  if (pending_word_len_ == 0) {
    current_symbol_ = end_symbol();
  } else if (pending_word_len_ > 0) {
    current_symbol_ = sample_symbol(rng);
  } else {
    // Geometric mode: each position is '#' with probability p.
    const bool at_cap = horizon_bound_ && *horizon_bound_ == 0;
    current_symbol_ = (at_cap || rng.bernoulli(dist_.p)) ? end_symbol() : rng.uniform_int(dfa_.alphabet_size);
  }

  std::vector<double> obs(static_cast<size_t>(observation_size()), 0.0);
  obs[static_cast<size_t>(current_symbol_)] = 1.0;
  return obs;
}

StepResult LangPomdp::step(int action, Rng& rng) {
  if (done_) throw std::runtime_error("env_step called after episode end");
  if (action < 0 || action >= action_count()) throw std::invalid_argument("invalid action " + std::to_string(action));

  StepResult result;
  result.observation.assign(static_cast<size_t>(observation_size()), 0.0);

  if (current_symbol_ == end_symbol()) {
    done_ = true;
    result.done = true;
    const bool member = dfa_.is_accepting(dfa_state_);
    const bool accepted = action == kActionAccept;
    result.reward = (member == accepted) ? 1.0 : 0.0;
    // Terminal marker observation stays all-zero.
    return result;
  }

  dfa_state_ = dfa_.next(dfa_state_, current_symbol_);
  ++emitted_;

  if (pending_word_len_ >= 0) {
    current_symbol_ = (emitted_ >= pending_word_len_) ? end_symbol() : sample_symbol(rng);
  } else {
    const bool at_cap = horizon_bound_ && emitted_ >= *horizon_bound_;
    current_symbol_ = (at_cap || rng.bernoulli(dist_.p)) ? end_symbol() : rng.uniform_int(dfa_.alphabet_size);
  }

  result.observation[static_cast<size_t>(current_symbol_)] = 1.0;
  result.reward = 0.0;
  result.done = false;
  return result;
}

nlohmann::json LangPomdp::spec_to_json() const {
  nlohmann::json j;
  j["dfa"] = automata::dfa_to_json(dfa_);
  if (horizon_bound_) j["horizon_bound"] = *horizon_bound_;
  j["length_dist"] = length_dist_to_json(dist_);
  j["gamma"] = gamma_;
  return j;
}

LangPomdp LangPomdp::from_json(const nlohmann::json& j) {
  std::optional<int> horizon;
  if (j.contains("horizon_bound")) horizon = j.at("horizon_bound").get<int>();
  return LangPomdp(automata::dfa_from_json(j.at("dfa")), horizon, length_dist_from_json(j.at("length_dist")),
                   j.at("gamma").get<double>());
}

int oracle_action(const automata::Dfa& dfa, int running_state, int observed_symbol) {
  if (observed_symbol == dfa.alphabet_size) {
    return dfa.is_accepting(running_state) ? LangPomdp::kActionAccept : LangPomdp::kActionReject;
  }
  return LangPomdp::kActionReject;
}

}  // namespace regpomdp::envs
