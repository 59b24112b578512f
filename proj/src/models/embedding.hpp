#pragma once

#include "models/seq_model.hpp"

namespace regpomdp::models {

// Widths of the linear embeddings for observation, previous action and
// previous reward; a width of zero disables the channel.
struct EmbeddingConfig {
  int h_obs = 32;
  int h_action = 0;
  int h_reward = 0;

  int width() const { return h_obs + h_action + h_reward; }
  bool uses_action() const { return h_action > 0; }
  bool uses_reward() const { return h_reward > 0; }
};

// Concatenation of the enabled per-channel linear embeddings; the result is
// the sequence model input u_t.
class Embedding {
 public:
  Embedding(EmbeddingConfig config, int obs_dim, int action_count, Rng& rng);

  // obs: [N, obs_dim]; prev_action_onehot: [N, action_count] (only read when
  // the action channel is enabled); prev_reward: [N, 1] likewise.
  Tensor forward(Tape* tape, const Tensor& obs, const Tensor& prev_action_onehot, const Tensor& prev_reward) const;

  const EmbeddingConfig& config() const { return config_; }
  int obs_dim() const { return obs_dim_; }
  int action_count() const { return action_count_; }
  int width() const { return config_.width(); }

  void collect_params(const std::string& prefix, std::vector<NamedParam>& out);

  // Embedding distance between two one-hot observations (used by the
  // perturbation probe's bound constant).
  double obs_embedding_distance(int symbol_a, int symbol_b) const;

 private:
  EmbeddingConfig config_;
  int obs_dim_;
  int action_count_;
  Linear obs_;
  Linear action_;
  Linear reward_;
};

}  // namespace regpomdp::models
