#include "cli/config.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "automata/languages.hpp"

namespace regpomdp::cli {

namespace {

const nlohmann::json& req(const nlohmann::json& j, const char* field, const char* context) {
  auto it = j.find(field);
  if (it == j.end()) {
    throw std::invalid_argument(std::string("config: missing field '") + context + field + "'");
  }
  return *it;
}

template <typename T>
T req_as(const nlohmann::json& j, const char* field, const char* context) {
  try {
    return req(j, field, context).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument(std::string("config: field '") + context + field + "' has the wrong type");
  }
}

template <typename T>
T opt_as(const nlohmann::json& j, const char* field, T fallback) {
  auto it = j.find(field);
  if (it == j.end()) return fallback;
  return it->get<T>();
}

}  // namespace

ExperimentConfig experiment_from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  config.schema_version = req_as<int>(j, "schema_version", "");
  if (config.schema_version != 1) throw std::invalid_argument("config: unsupported schema_version");

  const nlohmann::json& task = req(j, "task", "");
  config.task.kind = req_as<std::string>(task, "kind", "task.");
  if (config.task.kind == "lang") {
    config.task.language = req_as<std::string>(task, "language", "task.");
    automata::build_language(config.task.language);  // validates the name
    config.task.horizon = req_as<int>(task, "horizon", "task.");
    if (task.contains("length_dist")) {
      config.task.length_dist = envs::length_dist_from_json(task.at("length_dist"));
    } else {
      config.task.length_dist = envs::LengthDist::uniform(1, config.task.horizon);
    }
    config.task.gamma = opt_as<double>(task, "gamma", 1.0);
  } else if (config.task.kind == "tmaze") {
    config.task.corridor_length = req_as<int>(task, "corridor_length", "task.");
  } else {
    throw std::invalid_argument("config: task.kind must be 'lang' or 'tmaze'");
  }

  const nlohmann::json& embed = req(j, "embed", "");
  config.embed.h_obs = req_as<int>(embed, "h_obs", "embed.");
  config.embed.h_action = opt_as<int>(embed, "h_action", 0);
  config.embed.h_reward = opt_as<int>(embed, "h_reward", 0);

  config.model = models::model_spec_from_json(req(j, "model", ""));

  const nlohmann::json& rl = req(j, "rl", "");
  config.rl.gamma = opt_as<double>(rl, "gamma", 0.99);
  config.rl.adam.lr = opt_as<double>(rl, "lr", 3e-4);
  config.rl.recurrence_lr_scale = opt_as<double>(rl, "recurrence_lr_scale", 1.0);
  config.rl.batch_episodes = opt_as<int>(rl, "batch_episodes", 64);
  config.rl.tau = opt_as<double>(rl, "tau", 0.005);
  config.rl.eps.start = opt_as<double>(rl, "eps_start", 1.0);
  config.rl.eps.end = opt_as<double>(rl, "eps_end", 0.05);
  config.rl.eps.decay_frac = opt_as<double>(rl, "eps_decay_frac", 0.1);
  config.rl.env_step_budget = req_as<int64_t>(rl, "env_step_budget", "rl.");
  config.rl.grad_step_budget = req_as<int64_t>(rl, "grad_step_budget", "rl.");
  config.rl.eval_interval = opt_as<int>(rl, "eval_interval", 100);
  config.rl.eval_episodes = opt_as<int>(rl, "eval_episodes", 100);
  config.rl.buffer_capacity = opt_as<size_t>(rl, "buffer_capacity", 10000);
  config.rl.success_stop = opt_as<double>(rl, "success_stop", 0.0);
  config.rl.stop_metric = opt_as<std::string>(rl, "stop_metric", "success") == "return"
                              ? rl::DqnConfig::StopMetric::kReturn
                              : rl::DqnConfig::StopMetric::kSuccess;
  config.rl.checkpoint_interval = opt_as<int>(rl, "checkpoint_interval", 0);
  config.q_head.mlp = opt_as<std::string>(rl, "q_head", "linear") == "mlp";
  if (rl.contains("q_head_hidden")) config.q_head.hidden = rl.at("q_head_hidden").get<std::vector<int>>();

  config.seeds = req_as<std::vector<uint64_t>>(j, "seeds", "");
  if (config.seeds.empty()) throw std::invalid_argument("config: seeds must be non-empty");
  config.out_dir = req_as<std::string>(j, "out_dir", "");
  return config;
}

nlohmann::json experiment_to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["schema_version"] = config.schema_version;
  nlohmann::json task;
  task["kind"] = config.task.kind;
  if (config.task.kind == "lang") {
    task["language"] = config.task.language;
    task["horizon"] = config.task.horizon;
    task["length_dist"] = envs::length_dist_to_json(config.task.length_dist);
    task["gamma"] = config.task.gamma;
  } else {
    task["corridor_length"] = config.task.corridor_length;
  }
  j["task"] = task;
  j["embed"] = {{"h_obs", config.embed.h_obs}, {"h_action", config.embed.h_action}, {"h_reward", config.embed.h_reward}};
  j["model"] = models::model_spec_to_json(config.model);
  nlohmann::json rl;
  rl["gamma"] = config.rl.gamma;
  rl["lr"] = config.rl.adam.lr;
  rl["recurrence_lr_scale"] = config.rl.recurrence_lr_scale;
  rl["batch_episodes"] = config.rl.batch_episodes;
  rl["tau"] = config.rl.tau;
  rl["eps_start"] = config.rl.eps.start;
  rl["eps_end"] = config.rl.eps.end;
  rl["eps_decay_frac"] = config.rl.eps.decay_frac;
  rl["env_step_budget"] = config.rl.env_step_budget;
  rl["grad_step_budget"] = config.rl.grad_step_budget;
  rl["eval_interval"] = config.rl.eval_interval;
  rl["eval_episodes"] = config.rl.eval_episodes;
  rl["buffer_capacity"] = config.rl.buffer_capacity;
  rl["success_stop"] = config.rl.success_stop;
  rl["stop_metric"] = config.rl.stop_metric == rl::DqnConfig::StopMetric::kReturn ? "return" : "success";
  rl["checkpoint_interval"] = config.rl.checkpoint_interval;
  rl["q_head"] = config.q_head.mlp ? "mlp" : "linear";
  rl["q_head_hidden"] = config.q_head.hidden;
  j["rl"] = rl;
  j["seeds"] = config.seeds;
  j["out_dir"] = config.out_dir;
  return j;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  return experiment_from_json(j);
}

std::unique_ptr<envs::Env> build_env(const TaskConfig& task) {
  if (task.kind == "lang") {
    automata::LangSpec spec = automata::build_language(task.language);
    return std::make_unique<envs::LangPomdp>(spec.dfa, task.horizon, task.length_dist, task.gamma);
  }
  envs::TMazeConfig config;
  config.corridor_length = task.corridor_length;
  return std::make_unique<envs::TMaze>(config);
}

std::unique_ptr<rl::Agent> build_agent(const ExperimentConfig& config, Rng& rng) {
  std::unique_ptr<envs::Env> env = build_env(config.task);
  return std::make_unique<rl::Agent>(config.embed, config.model, config.q_head, env->observation_size(),
                                     env->action_count(), rng);
}

rl::AgentPair build_agent_pair(const ExperimentConfig& config, Rng& rng) {
  std::unique_ptr<envs::Env> env = build_env(config.task);
  return rl::make_agent_pair(config.embed, config.model, config.q_head, env->observation_size(),
                             env->action_count(), rng);
}

uint64_t config_hash(const nlohmann::json& j) {
  const std::string s = j.dump();
  uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace regpomdp::cli
