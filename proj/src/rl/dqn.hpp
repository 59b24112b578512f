#pragma once

#include <functional>
#include <memory>
#include <span>

#include "core/adam.hpp"
#include "envs/env.hpp"
#include "rl/agent.hpp"
#include "rl/trajectory.hpp"

namespace regpomdp::rl {

// Policy face used by episode collection; lets tests drive the env with
// oracle or scripted policies through the same machinery as learned agents.
class Actor {
 public:
  virtual ~Actor() = default;
  virtual void begin_episode() = 0;
  // prev_action is -1 on the first step.
  virtual int act(const std::vector<double>& obs, int prev_action, double prev_reward) = 0;
};

class AgentActor : public Actor {
 public:
  explicit AgentActor(Agent& agent) : agent_(&agent) {}
  void begin_episode() override { rollout_ = agent_->begin_rollout(1); }
  int act(const std::vector<double>& obs, int prev_action, double prev_reward) override;

 private:
  Agent* agent_;
  Agent::Rollout rollout_;
};

struct EpsSchedule {
  double start = 1.0;
  double end = 0.05;
  double decay_frac = 0.1;  // fraction of the env-step budget spent decaying

  double at(int64_t env_steps, int64_t env_step_budget) const;
};

struct DqnConfig {
  double gamma = 0.99;
  AdamConfig adam;                 // lr 3e-4 by default
  // Multiplier on the learning rate of the LRU recurrence parameters
  // (nu/theta/gamma_log), which train best slower than the dense weights.
  double recurrence_lr_scale = 1.0;
  int batch_episodes = 64;
  double tau = 0.005;
  EpsSchedule eps;
  int64_t env_step_budget = 0;
  int64_t grad_step_budget = 0;
  int eval_interval = 100;   // episodes between evaluations
  int eval_episodes = 100;
  size_t buffer_capacity = 10000;
  double success_stop = 0.0;       // stop once the stop metric reaches this; 0 disables
  enum class StopMetric { kSuccess, kReturn };
  StopMetric stop_metric = StopMetric::kSuccess;
  int checkpoint_interval = 0;     // evals between checkpoints; 0 = final only

  void validate() const;
};

struct AgentPair {
  std::unique_ptr<Agent> online;
  std::unique_ptr<Agent> target;

  void sync_target() { target->copy_params_from(*online); }
  void soft_update(double tau) { target->soft_update_from(*online, tau); }
};

AgentPair make_agent_pair(const models::EmbeddingConfig& embed, const models::ModelSpec& model,
                          const QHeadConfig& q_head, int obs_dim, int action_count, Rng& rng);

// Runs one episode; the actor is stepped on every observation and eps-greedy
// exploration overrides its choice.
Trajectory collect_episode(envs::Env& env, Actor& actor, double epsilon, Rng& env_rng, Rng& eps_rng);

// Double-DQN loss over whole episodes, hiddens recomputed from the episode
// start: y_t = r_t + gamma (1 - done_t) Q_target(x_{t+1}, argmax_a Q_online(x_{t+1}, a)),
// averaged as squared error over every valid step in the batch.
Tensor dqn_loss(Tape* tape, AgentPair& agents, std::span<const Trajectory* const> batch, double gamma);

struct EvalResult {
  double mean_return = 0.0;
  double success = 0.0;
};

EvalResult evaluate(envs::Env& env, Agent& agent, int episodes, Rng& rng);

struct MetricsRow {
  int64_t env_steps = 0;
  int64_t grad_steps = 0;
  int64_t episodes = 0;
  double eval_return = 0.0;
  double eval_success = 0.0;
  double loss = 0.0;
};

struct TrainResult {
  std::vector<MetricsRow> rows;
  bool stopped_on_success = false;
  int64_t env_steps = 0;
  int64_t grad_steps = 0;
  double final_success = 0.0;
  double final_return = 0.0;
};

using MetricsSink = std::function<void(const MetricsRow&)>;

// Interleaves collection and gradient steps (one gradient step per collected
// episode until the gradient budget runs out, then whichever budget remains),
// evaluating greedily every eval_interval episodes.
TrainResult train(envs::Env& env, AgentPair& agents, const DqnConfig& config, Rng root_rng,
                  const MetricsSink& sink = nullptr);

}  // namespace regpomdp::rl
