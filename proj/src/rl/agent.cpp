#include "rl/agent.hpp"

#include <cmath>
#include <stdexcept>

namespace regpomdp::rl {

QHead::QHead(const QHeadConfig& config, int in, int out, Rng& rng) {
  if (!config.mlp) {
    layers_.emplace_back(in, out, rng, 1.0 / std::sqrt(static_cast<double>(in)));
    return;
  }
  int width = in;
  for (int h : config.hidden) {
    layers_.emplace_back(width, h, rng, 1.0 / std::sqrt(static_cast<double>(width)));
    width = h;
  }
  layers_.emplace_back(width, out, rng, 1.0 / std::sqrt(static_cast<double>(width)));
}

Tensor QHead::forward(Tape* tape, const Tensor& x) const {
  Tensor h = x;
  for (size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i].apply(tape, h);
    if (i + 1 < layers_.size()) h = ops::relu(tape, h);
  }
  return h;
}

void QHead::collect_params(const std::string& prefix, std::vector<NamedParam>& out) {
  for (size_t i = 0; i < layers_.size(); ++i) layers_[i].collect(prefix + ".l" + std::to_string(i), out);
}

Agent::Agent(models::EmbeddingConfig embed_config, const models::ModelSpec& model_spec, QHeadConfig q_config,
             int obs_dim, int action_count, Rng& rng)
    : embed_(embed_config, obs_dim, action_count, rng),
      model_(models::build_model(model_spec, embed_config.width(), rng)),
      head_(q_config, model_->hidden_size(), action_count, rng),
      action_count_(action_count) {}

Agent::Agent(models::EmbeddingConfig embed_config, std::unique_ptr<models::SeqModel> model, QHeadConfig q_config,
             int obs_dim, int action_count, Rng& rng)
    : embed_(embed_config, obs_dim, action_count, rng),
      model_(std::move(model)),
      head_(q_config, model_->hidden_size(), action_count, rng),
      action_count_(action_count) {}

Tensor Agent::hiddens(Tape* tape, const BatchInputs& inputs, int batch, int timesteps) {
  Tensor u = embed_.forward(tape, inputs.obs, inputs.prev_action_onehot, inputs.prev_reward);
  return model_->forward(tape, u, batch, timesteps, nullptr);
}

Tensor Agent::q_values(Tape* tape, const Tensor& hiddens) const { return head_.forward(tape, hiddens); }

Agent::Rollout Agent::begin_rollout(int batch) const {
  Rollout r;
  r.carry = model_->make_carry(batch);
  r.batch = batch;
  r.prev_action.assign(static_cast<size_t>(batch), -1);
  r.prev_reward.assign(static_cast<size_t>(batch), 0.0);
  return r;
}

Agent::StepOutput Agent::rollout_step(Rollout& rollout, const std::vector<double>& obs_flat) const {
  const int batch = rollout.batch;
  if (obs_flat.size() != static_cast<size_t>(batch) * embed_.obs_dim()) {
    throw std::invalid_argument("rollout_step: observation batch has wrong size");
  }
  Tensor obs = Tensor::from_data({batch, embed_.obs_dim()}, obs_flat);
  Tensor act_onehot;
  Tensor rew;
  if (embed_.config().uses_action()) {
    act_onehot = Tensor::zeros({batch, action_count_});
    for (int b = 0; b < batch; ++b) {
      const int a = rollout.prev_action[static_cast<size_t>(b)];
      if (a >= 0) act_onehot.data()[b * action_count_ + a] = 1.0;
    }
  }
  if (embed_.config().uses_reward()) {
    rew = Tensor::zeros({batch, 1});
    for (int b = 0; b < batch; ++b) rew.data()[b] = rollout.prev_reward[static_cast<size_t>(b)];
  }
  Tensor u = embed_.forward(nullptr, obs, act_onehot, rew);
  StepOutput out;
  out.hidden = model_->step(u, rollout.carry);
  out.q = head_.forward(nullptr, out.hidden);
  return out;
}

void Agent::record_executed(Rollout& rollout, const std::vector<int>& actions,
                            const std::vector<double>& rewards) const {
  rollout.prev_action.assign(actions.begin(), actions.end());
  rollout.prev_reward.assign(rewards.begin(), rewards.end());
}

std::vector<NamedParam> Agent::named_params() {
  std::vector<NamedParam> out;
  embed_.collect_params("embed", out);
  model_->collect_params(model_->kind(), out);
  head_.collect_params("qhead", out);
  return out;
}

void Agent::copy_params_from(Agent& other) {
  auto mine = named_params();
  auto theirs = other.named_params();
  if (mine.size() != theirs.size()) throw std::invalid_argument("copy_params_from: architectures differ");
  for (size_t i = 0; i < mine.size(); ++i) {
    if (mine[i].name != theirs[i].name || mine[i].tensor.shape() != theirs[i].tensor.shape()) {
      throw std::invalid_argument("copy_params_from: parameter mismatch at '" + mine[i].name + "'");
    }
    mine[i].tensor.copy_data_from(theirs[i].tensor);
  }
}

void Agent::soft_update_from(Agent& online, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("soft_update: tau must lie in (0, 1]");
  auto mine = named_params();
  auto theirs = online.named_params();
  if (mine.size() != theirs.size()) throw std::invalid_argument("soft_update: architectures differ");
  for (size_t i = 0; i < mine.size(); ++i) {
    if (mine[i].tensor.shape() != theirs[i].tensor.shape()) {
      throw std::invalid_argument("soft_update: shape mismatch at '" + mine[i].name + "'");
    }
    double* t = mine[i].tensor.data();
    const double* o = theirs[i].tensor.data();
    const int64_t n = mine[i].tensor.numel();
    for (int64_t j = 0; j < n; ++j) t[j] = (1.0 - tau) * t[j] + tau * o[j];
  }
}

}  // namespace regpomdp::rl
