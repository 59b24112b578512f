#pragma once

#include <memory>

#include "core/adam.hpp"
#include "models/embedding.hpp"
#include "models/factory.hpp"

namespace regpomdp::rl {

struct QHeadConfig {
  bool mlp = false;
  std::vector<int> hidden = {256, 256};
};

// Linear head for the regular-language tasks, MLP for the maze.
class QHead {
 public:
  QHead() = default;
  QHead(const QHeadConfig& config, int in, int out, Rng& rng);
  Tensor forward(Tape* tape, const Tensor& x) const;
  void collect_params(const std::string& prefix, std::vector<NamedParam>& out);

 private:
  std::vector<models::Linear> layers_;
};

// Embedding + sequence backbone + Q head. Exposes a batched training path
// over stacked episodes and an incremental rollout path that threads the
// recurrent carry.
class Agent {
 public:
  Agent(models::EmbeddingConfig embed_config, const models::ModelSpec& model_spec, QHeadConfig q_config,
        int obs_dim, int action_count, Rng& rng);
  // Injection form, mainly for tests with hand-built backbones.
  Agent(models::EmbeddingConfig embed_config, std::unique_ptr<models::SeqModel> model, QHeadConfig q_config,
        int obs_dim, int action_count, Rng& rng);

  int obs_dim() const { return embed_.obs_dim(); }
  int action_count() const { return action_count_; }
  const models::EmbeddingConfig& embed_config() const { return embed_.config(); }
  models::SeqModel& model() { return *model_; }
  const models::SeqModel& model() const { return *model_; }
  const models::Embedding& embedding() const { return embed_; }

  struct BatchInputs {
    Tensor obs;                 // [N, obs_dim]
    Tensor prev_action_onehot;  // [N, A], only read when the channel is on
    Tensor prev_reward;         // [N, 1], likewise
  };

  // [B*T, obs...] -> hidden rows [B*T, h].
  Tensor hiddens(Tape* tape, const BatchInputs& inputs, int batch, int timesteps);
  Tensor q_values(Tape* tape, const Tensor& hiddens) const;

  struct Rollout {
    models::Carry carry;
    int batch = 0;
    std::vector<int> prev_action;     // -1 before the first step
    std::vector<double> prev_reward;
  };
  Rollout begin_rollout(int batch) const;

  struct StepOutput {
    Tensor q;       // [B, A]
    Tensor hidden;  // [B, h]
  };
  // Advances the carry on the observation batch; the caller reports executed
  // actions/rewards afterwards so the next step embeds what actually happened.
  StepOutput rollout_step(Rollout& rollout, const std::vector<double>& obs_flat) const;
  void record_executed(Rollout& rollout, const std::vector<int>& actions, const std::vector<double>& rewards) const;

  std::vector<NamedParam> named_params();
  void copy_params_from(Agent& other);
  void soft_update_from(Agent& online, double tau);

 private:
  models::Embedding embed_;
  std::unique_ptr<models::SeqModel> model_;
  QHead head_;
  int action_count_;
};

}  // namespace regpomdp::rl
