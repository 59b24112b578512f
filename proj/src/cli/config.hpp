#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "envs/lang_pomdp.hpp"
#include "envs/tmaze.hpp"
#include "rl/dqn.hpp"

namespace regpomdp::cli {

struct TaskConfig {
  std::string kind = "lang";  // "lang" | "tmaze"
  // lang
  std::string language = "PARITY";
  int horizon = 10;
  envs::LengthDist length_dist = envs::LengthDist::uniform(1, 10);
  double gamma = 1.0;
  // tmaze
  int corridor_length = 10;
};

struct ExperimentConfig {
  int schema_version = 1;
  TaskConfig task;
  models::EmbeddingConfig embed;
  models::ModelSpec model;
  rl::QHeadConfig q_head;
  rl::DqnConfig rl;
  std::vector<uint64_t> seeds = {1};
  std::string out_dir = "runs/experiment";
};

// Parsing throws std::invalid_argument naming the missing or malformed field.
ExperimentConfig experiment_from_json(const nlohmann::json& j);
nlohmann::json experiment_to_json(const ExperimentConfig& config);
ExperimentConfig load_experiment_config(const std::string& path);

std::unique_ptr<envs::Env> build_env(const TaskConfig& task);
std::unique_ptr<rl::Agent> build_agent(const ExperimentConfig& config, Rng& rng);
rl::AgentPair build_agent_pair(const ExperimentConfig& config, Rng& rng);

uint64_t config_hash(const nlohmann::json& j);
std::string hash_hex(uint64_t value);

}  // namespace regpomdp::cli
