#include "rl/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "envs/lang_pomdp.hpp"

namespace regpomdp::rl {

int AgentActor::act(const std::vector<double>& obs, int prev_action, double prev_reward) {
  rollout_.prev_action[0] = prev_action;
  rollout_.prev_reward[0] = prev_reward;
  Agent::StepOutput out = agent_->rollout_step(rollout_, obs);
  return static_cast<int>(ops::argmax_rows(out.q)[0]);
}

double EpsSchedule::at(int64_t env_steps, int64_t env_step_budget) const {
  const double horizon = decay_frac * static_cast<double>(env_step_budget);
  if (horizon <= 0.0) return end;
  const double frac = std::min(1.0, static_cast<double>(env_steps) / horizon);
  return start + (end - start) * frac;
}

void DqnConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("dqn: gamma must lie in [0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("dqn: tau must lie in (0, 1]");
  if (batch_episodes <= 0) throw std::invalid_argument("dqn: batch_episodes must be positive");
  if (env_step_budget <= 0 || grad_step_budget <= 0) {
    throw std::invalid_argument("dqn: env and gradient step budgets must be positive");
  }
  if (eval_interval <= 0 || eval_episodes <= 0) throw std::invalid_argument("dqn: eval settings must be positive");
  if (buffer_capacity == 0) throw std::invalid_argument("dqn: buffer capacity must be positive");
}

AgentPair make_agent_pair(const models::EmbeddingConfig& embed, const models::ModelSpec& model,
                          const QHeadConfig& q_head, int obs_dim, int action_count, Rng& rng) {
  AgentPair pair;
  Rng online_rng = rng.fork(11);
  Rng target_rng = rng.fork(12);
  pair.online = std::make_unique<Agent>(embed, model, q_head, obs_dim, action_count, online_rng);
  pair.target = std::make_unique<Agent>(embed, model, q_head, obs_dim, action_count, target_rng);
  pair.sync_target();
  return pair;
}

Trajectory collect_episode(envs::Env& env, Actor& actor, double epsilon, Rng& env_rng, Rng& eps_rng) {
  Trajectory traj;
  actor.begin_episode();
  std::vector<double> obs = env.reset(env_rng);
  int prev_action = -1;
  double prev_reward = 0.0;
  while (true) {
    const int greedy = actor.act(obs, prev_action, prev_reward);
    int action = greedy;
    if (epsilon > 0.0 && eps_rng.uniform() < epsilon) action = eps_rng.uniform_int(env.action_count());
    envs::StepResult result = env.step(action, env_rng);
    traj.obs.push_back(obs);
    traj.actions.push_back(action);
    traj.rewards.push_back(result.reward);
    traj.dones.push_back(result.done ? 1 : 0);
    prev_action = action;
    prev_reward = result.reward;
    obs = std::move(result.observation);
    if (traj.dones.back()) {
      traj.final_obs = obs;
      break;
    }
  }
  return traj;
}

namespace {

struct StackedBatch {
  Agent::BatchInputs inputs;
  std::vector<int64_t> action_rows;  // a_t per flat row (padded rows hold 0)
  std::vector<double> rewards;
  std::vector<uint8_t> dones;
  std::vector<double> mask;  // 1 on valid rows
  int batch = 0;
  int timesteps = 0;
  int valid = 0;
};

StackedBatch stack_batch(const Agent& agent, std::span<const Trajectory* const> batch) {
  StackedBatch s;
  s.batch = static_cast<int>(batch.size());
  for (const Trajectory* t : batch) s.timesteps = std::max(s.timesteps, t->length());
  const int obs_dim = agent.obs_dim();
  const int action_count = agent.action_count();
  const int64_t rows = static_cast<int64_t>(s.batch) * s.timesteps;

  s.inputs.obs = Tensor::zeros({rows, obs_dim});
  const bool use_act = agent.embed_config().uses_action();
  const bool use_rew = agent.embed_config().uses_reward();
  if (use_act) s.inputs.prev_action_onehot = Tensor::zeros({rows, action_count});
  if (use_rew) s.inputs.prev_reward = Tensor::zeros({rows, 1});
  s.action_rows.assign(static_cast<size_t>(rows), 0);
  s.rewards.assign(static_cast<size_t>(rows), 0.0);
  s.dones.assign(static_cast<size_t>(rows), 1);
  s.mask.assign(static_cast<size_t>(rows), 0.0);

  for (int b = 0; b < s.batch; ++b) {
    const Trajectory& traj = *batch[static_cast<size_t>(b)];
    for (int t = 0; t < traj.length(); ++t) {
      const int64_t row = static_cast<int64_t>(b) * s.timesteps + t;
      const auto& o = traj.obs[static_cast<size_t>(t)];
      std::copy(o.begin(), o.end(), s.inputs.obs.data() + row * obs_dim);
      if (use_act && t > 0) {
        s.inputs.prev_action_onehot.data()[row * action_count + traj.actions[static_cast<size_t>(t - 1)]] = 1.0;
      }
      if (use_rew && t > 0) s.inputs.prev_reward.data()[row] = traj.rewards[static_cast<size_t>(t - 1)];
      s.action_rows[static_cast<size_t>(row)] = traj.actions[static_cast<size_t>(t)];
      s.rewards[static_cast<size_t>(row)] = traj.rewards[static_cast<size_t>(t)];
      s.dones[static_cast<size_t>(row)] = traj.dones[static_cast<size_t>(t)];
      s.mask[static_cast<size_t>(row)] = 1.0;
      ++s.valid;
    }
  }
  return s;
}

}  // namespace

Tensor dqn_loss(Tape* tape, AgentPair& agents, std::span<const Trajectory* const> batch, double gamma) {
  if (batch.empty()) throw std::invalid_argument("dqn_loss: empty batch");
  StackedBatch s = stack_batch(*agents.online, batch);

  Tensor online_hidden = agents.online->hiddens(tape, s.inputs, s.batch, s.timesteps);
  Tensor q_online = agents.online->q_values(tape, online_hidden);

  Tensor target_hidden = agents.target->hiddens(nullptr, s.inputs, s.batch, s.timesteps);
  Tensor q_target = agents.target->q_values(nullptr, target_hidden);

  const int A = agents.online->action_count();
  const int64_t rows = q_online.dim(0);
  std::vector<double> targets(static_cast<size_t>(rows), 0.0);
  const double* qo = q_online.data();
  const double* qt = q_target.data();
  for (int64_t row = 0; row < rows; ++row) {
    if (s.mask[static_cast<size_t>(row)] == 0.0) continue;
    double y = s.rewards[static_cast<size_t>(row)];
    if (!s.dones[static_cast<size_t>(row)]) {
      const int64_t next = row + 1;
      int64_t best = 0;
      for (int a = 1; a < A; ++a)
        if (qo[next * A + a] > qo[next * A + best]) best = a;
      y += gamma * qt[next * A + best];
    }
    targets[static_cast<size_t>(row)] = y;
  }

  Tensor q_sel = ops::take_per_row(tape, q_online, s.action_rows);
  Tensor y = Tensor::from_data({rows, 1}, std::move(targets));
  Tensor mask = Tensor::from_data({rows, 1}, std::move(s.mask));
  Tensor diff = ops::sub(tape, q_sel, y);
  Tensor sq = ops::hadamard(tape, ops::hadamard(tape, diff, diff), mask);
  return ops::scale(tape, ops::sum_all(tape, sq), 1.0 / static_cast<double>(s.valid));
}

namespace {

// Regular-language episodes ignore actions until the end marker, so greedy
// evaluation can run as one batched forward pass when the embedding has no
// action/reward feedback.
bool batched_eval_applicable(const envs::Env& env, const Agent& agent) {
  const auto* lang = dynamic_cast<const envs::LangPomdp*>(&env);
  return lang != nullptr && !agent.embed_config().uses_action() && !agent.embed_config().uses_reward();
}

EvalResult evaluate_lang_batched(envs::LangPomdp& env, Agent& agent, int episodes, Rng& rng) {
  EvalResult result;
  const int obs_dim = env.observation_size();
  const int chunk = 100;
  int done_eps = 0;
  while (done_eps < episodes) {
    const int n = std::min(chunk, episodes - done_eps);
    std::vector<std::vector<std::vector<double>>> obs_seqs(static_cast<size_t>(n));
    std::vector<bool> member(static_cast<size_t>(n));
    int max_len = 0;
    for (int e = 0; e < n; ++e) {
      auto& seq = obs_seqs[static_cast<size_t>(e)];
      std::vector<double> obs = env.reset(rng);
      envs::DfaShadow shadow(env.dfa());
      while (true) {
        seq.push_back(obs);
        const int symbol = env.current_symbol();
        if (symbol == env.end_symbol()) {
          member[static_cast<size_t>(e)] = env.dfa().is_accepting(shadow.state_before());
          env.step(envs::LangPomdp::kActionReject, rng);
          break;
        }
        shadow.consume(symbol);
        obs = env.step(envs::LangPomdp::kActionReject, rng).observation;
      }
      max_len = std::max(max_len, static_cast<int>(seq.size()));
    }
    Tensor flat = Tensor::zeros({static_cast<int64_t>(n) * max_len, obs_dim});
    for (int e = 0; e < n; ++e) {
      const auto& seq = obs_seqs[static_cast<size_t>(e)];
      for (size_t t = 0; t < seq.size(); ++t) {
        std::copy(seq[t].begin(), seq[t].end(),
                  flat.data() + (static_cast<int64_t>(e) * max_len + static_cast<int64_t>(t)) * obs_dim);
      }
    }
    Agent::BatchInputs inputs;
    inputs.obs = flat;
    Tensor q = agent.q_values(nullptr, agent.hiddens(nullptr, inputs, n, max_len));
    const double* qd = q.data();
    const int A = agent.action_count();
    for (int e = 0; e < n; ++e) {
      const int64_t row = static_cast<int64_t>(e) * max_len + static_cast<int64_t>(obs_seqs[static_cast<size_t>(e)].size()) - 1;
      int best = 0;
      for (int a = 1; a < A; ++a)
        if (qd[row * A + a] > qd[row * A + best]) best = a;
      const bool accepted = best == envs::LangPomdp::kActionAccept;
      const double reward = (accepted == member[static_cast<size_t>(e)]) ? 1.0 : 0.0;
      result.mean_return += reward;
      result.success += env.success_from_final_reward(reward);
    }
    done_eps += n;
  }
  result.mean_return /= static_cast<double>(episodes);
  result.success /= static_cast<double>(episodes);
  return result;
}

}  // namespace

EvalResult evaluate(envs::Env& env, Agent& agent, int episodes, Rng& rng) {
  if (batched_eval_applicable(env, agent)) {
    return evaluate_lang_batched(static_cast<envs::LangPomdp&>(env), agent, episodes, rng);
  }
  EvalResult result;
  AgentActor actor(agent);
  Rng eps_rng = rng.fork(777);  // unused at epsilon 0, but keeps the signature uniform
  for (int e = 0; e < episodes; ++e) {
    Trajectory traj = collect_episode(env, actor, 0.0, rng, eps_rng);
    result.mean_return += traj.total_return();
    result.success += env.success_from_final_reward(traj.rewards.back());
  }
  result.mean_return /= static_cast<double>(episodes);
  result.success /= static_cast<double>(episodes);
  return result;
}

TrainResult train(envs::Env& env, AgentPair& agents, const DqnConfig& config, Rng root_rng,
                  const MetricsSink& sink) {
  config.validate();
  Rng env_rng = root_rng.fork(1);
  Rng eps_rng = root_rng.fork(2);
  Rng buffer_rng = root_rng.fork(3);
  Rng eval_root = root_rng.fork(4);

  ReplayBuffer buffer(config.buffer_capacity);
  std::vector<Tensor> params;
  std::vector<double> lr_scales;
  for (NamedParam& p : agents.online->named_params()) {
    params.push_back(p.tensor);
    const bool recurrence = p.name.ends_with(".nu") || p.name.ends_with(".theta") || p.name.ends_with(".gamma_log");
    lr_scales.push_back(recurrence ? config.recurrence_lr_scale : 1.0);
  }
  Adam adam(std::move(params), config.adam, std::move(lr_scales));
  AgentActor actor(*agents.online);
  std::unique_ptr<envs::Env> eval_env = env.clone();

  TrainResult result;
  int64_t env_steps = 0;
  int64_t grad_steps = 0;
  int64_t episodes = 0;
  int64_t evals = 0;
  double loss_sum = 0.0;
  int64_t loss_count = 0;
  int64_t steps_since_eval = 0;

  auto run_eval = [&](bool force) -> bool {
    if (!force && steps_since_eval < config.eval_interval) return false;
    steps_since_eval = 0;
    Rng eval_rng = eval_root.fork(static_cast<uint64_t>(1000 + evals));
    ++evals;
    EvalResult ev = evaluate(*eval_env, *agents.online, config.eval_episodes, eval_rng);
    MetricsRow row;
    row.env_steps = env_steps;
    row.grad_steps = grad_steps;
    row.episodes = episodes;
    row.eval_return = ev.mean_return;
    row.eval_success = ev.success;
    row.loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
    loss_sum = 0.0;
    loss_count = 0;
    result.rows.push_back(row);
    if (sink) sink(row);
    const double metric = config.stop_metric == DqnConfig::StopMetric::kReturn ? ev.mean_return : ev.success;
    return config.success_stop > 0.0 && metric >= config.success_stop;
  };

  bool stop = false;
  while (!stop && (env_steps < config.env_step_budget || grad_steps < config.grad_step_budget)) {
    bool progressed = false;
    if (env_steps < config.env_step_budget) {
      const double eps = config.eps.at(env_steps, config.env_step_budget);
      Trajectory traj = collect_episode(env, actor, eps, env_rng, eps_rng);
      env_steps += traj.length();
      ++episodes;
      ++steps_since_eval;
      buffer.push(std::move(traj));
      progressed = true;
    }
    if (grad_steps < config.grad_step_budget && buffer.size() >= static_cast<size_t>(config.batch_episodes)) {
      std::vector<const Trajectory*> batch = buffer.sample_batch(buffer_rng, config.batch_episodes);
      Tape tape;
      Tensor loss = dqn_loss(&tape, agents, batch, config.gamma);
      if (!std::isfinite(loss.item())) throw std::runtime_error("dqn train: loss went non-finite");
      tape.backward(loss);
      adam.step();
      adam.zero_grad();
      agents.soft_update(config.tau);
      ++grad_steps;
      loss_sum += loss.item();
      ++loss_count;
      if (env_steps >= config.env_step_budget) {
        // Gradient-only tail: count gradient steps toward the eval cadence.
        ++steps_since_eval;
      }
      progressed = true;
    }
    if (!progressed) break;  // env budget done and buffer never filled
    if (run_eval(false)) stop = true;
  }
  if (result.rows.empty() || result.rows.back().env_steps != env_steps ||
      result.rows.back().grad_steps != grad_steps) {
    run_eval(true);
  }

  result.stopped_on_success = stop;
  result.env_steps = env_steps;
  result.grad_steps = grad_steps;
  result.final_success = result.rows.back().eval_success;
  result.final_return = result.rows.back().eval_return;
  return result;
}

}  // namespace regpomdp::rl
