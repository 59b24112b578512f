#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "analysis/probe.hpp"
#include "cli/experiment.hpp"

using namespace regpomdp;
namespace fs = std::filesystem;

namespace {

nlohmann::json micro_experiment_json(const std::string& out_dir) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["task"] = {{"kind", "lang"},
               {"language", "PARITY"},
               {"horizon", 4},
               {"length_dist", {{"kind", "uniform"}, {"min_len", 1}, {"max_len", 4}}}};
  j["embed"] = {{"h_obs", 8}, {"h_action", 0}, {"h_reward", 0}};
  j["model"] = {{"kind", "lstm"}, {"hidden", 8}, {"layers", 1}};
  j["rl"] = {{"env_step_budget", 300}, {"grad_step_budget", 30},   {"batch_episodes", 4},
             {"eval_interval", 20},    {"eval_episodes", 10},      {"buffer_capacity", 64},
             {"q_head", "linear"}};
  j["seeds"] = {3};
  j["out_dir"] = out_dir;
  return j;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommandResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

CommandResult run_cli(const std::string& args) {
  const char* bin = std::getenv("REGPOMDP_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "REGPOMDP_BIN must point at the regpomdp binary");
  const std::string cmd = std::string(bin) + " " + args + " 2>&1";
  std::array<char, 512> buf{};
  std::string output;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe)) output += buf.data();
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), output};
}

}  // namespace

TEST_CASE("config parsing: missing fields are named") {
  nlohmann::json j = micro_experiment_json("runs/x");
  j.erase("seeds");
  CHECK_THROWS_WITH_AS(cli::experiment_from_json(j), doctest::Contains("seeds"), std::invalid_argument);

  nlohmann::json j2 = micro_experiment_json("runs/x");
  j2["rl"].erase("env_step_budget");
  CHECK_THROWS_WITH_AS(cli::experiment_from_json(j2), doctest::Contains("env_step_budget"), std::invalid_argument);

  nlohmann::json j3 = micro_experiment_json("runs/x");
  j3["task"]["language"] = "NOPE";
  CHECK_THROWS_AS(cli::experiment_from_json(j3), std::invalid_argument);
}

TEST_CASE("config round trip preserves the experiment") {
  nlohmann::json j = micro_experiment_json("runs/x");
  cli::ExperimentConfig config = cli::experiment_from_json(j);
  cli::ExperimentConfig back = cli::experiment_from_json(cli::experiment_to_json(config));
  CHECK(cli::config_hash(cli::experiment_to_json(config)) == cli::config_hash(cli::experiment_to_json(back)));
}

TEST_CASE("lang subcommand prints class and monoid order; unknown name fails") {
  CommandResult sym5 = run_cli("lang SYM5");
  CHECK(sym5.exit_code == 0);
  CHECK(sym5.output.find("NC1_COMPLETE") != std::string::npos);
  CHECK(sym5.output.find("120") != std::string::npos);

  CommandResult parity = run_cli("lang PARITY");
  CHECK(parity.exit_code == 0);
  CHECK(parity.output.find("IN_TC0") != std::string::npos);

  CommandResult nope = run_cli("lang NOPE");
  CHECK(nope.exit_code != 0);
  CHECK(nope.output.find("error") != std::string::npos);
}

TEST_CASE("train runs write metrics, manifest, checkpoint; reruns are byte-identical; resume skips") {
  const std::string dir = "cli_test_runs/micro";
  fs::remove_all("cli_test_runs");
  cli::ExperimentConfig config = cli::experiment_from_json(micro_experiment_json(dir));

  cli::RunOptions options;
  CHECK(cli::run_experiment(config, options) == 0);
  const std::string metrics_path = dir + "/metrics_seed3.csv";
  REQUIRE(fs::exists(metrics_path));
  REQUIRE(fs::exists(dir + "/manifest_seed3.json"));
  REQUIRE(fs::exists(dir + "/ckpt_seed3.bin"));
  REQUIRE(fs::exists(dir + "/summary.json"));
  const std::string first = slurp(metrics_path);
  CHECK(first.find("env_steps,grad_steps") == 0);
  CHECK(std::count(first.begin(), first.end(), '\n') >= 2);  // header + at least one eval row

  // Byte-identical rerun.
  fs::remove(metrics_path);
  CHECK(cli::run_experiment(config, options) == 0);
  CHECK(slurp(metrics_path) == first);

  // Resume does not retrain (fresh metrics file stays untouched).
  fs::remove(metrics_path);
  options.resume = true;
  CHECK(cli::run_experiment(config, options) == 0);
  CHECK_FALSE(fs::exists(metrics_path));
}

TEST_CASE("checkpoints reload into working agents for probe and eval") {
  const std::string dir = "cli_test_runs/reload";
  cli::ExperimentConfig config = cli::experiment_from_json(micro_experiment_json(dir));
  cli::RunOptions options;
  options.resume = true;
  REQUIRE(cli::run_experiment(config, options) == 0);

  cli::LoadedAgent loaded = cli::load_agent_checkpoint(dir + "/ckpt_seed3");
  CHECK(loaded.seed == 3);
  std::unique_ptr<envs::Env> env = cli::build_env(loaded.config.task);
  Rng rng(5);
  rl::EvalResult result = rl::evaluate(*env, *loaded.agent, 50, rng);
  CHECK(result.success >= 0.0);
  CHECK(result.success <= 1.0);

  auto* lang_env = dynamic_cast<envs::LangPomdp*>(env.get());
  REQUIRE(lang_env != nullptr);
  Rng prng(6);
  analysis::LabeledHiddenSet set = analysis::probe_hidden(*loaded.agent, *lang_env, 10, prng);
  CHECK(set.rows.size() > 10);
}

TEST_CASE("checkpoint_interval writes intermediate checkpoints") {
  const std::string dir = "cli_test_runs/interval";
  fs::remove_all(dir);
  nlohmann::json j = micro_experiment_json(dir);
  j["rl"]["checkpoint_interval"] = 2;
  cli::ExperimentConfig config = cli::experiment_from_json(j);
  REQUIRE(cli::run_experiment(config, {}) == 0);
  CHECK(fs::exists(dir + "/ckpt_seed3_eval2.bin"));
  CHECK(fs::exists(dir + "/ckpt_seed3.bin"));
}

TEST_CASE("scale study: every grid point runs and is reproducible") {
  const std::string dir = "cli_test_runs/scale";
  fs::remove_all(dir);
  nlohmann::json j = micro_experiment_json(dir);
  j["model"] = {{"kind", "gpt"}, {"hidden", 8}, {"heads", 2}, {"layers", 1}, {"max_positions", 16}};
  j["rl"]["env_step_budget"] = 150;
  j["rl"]["grad_step_budget"] = 6;
  cli::ExperimentConfig config = cli::experiment_from_json(j);

  std::vector<cli::ScalePoint> grid{{8, 1, 2}, {12, 1, 2}, {12, 2, 2}};
  cli::RunOptions options;
  CHECK(cli::run_scale_study(config, grid, options) == 0);
  const std::string a = dir + "/gpt_h8_l1_hd2/metrics_seed3.csv";
  const std::string b = dir + "/gpt_h12_l1_hd2/metrics_seed3.csv";
  const std::string c = dir + "/gpt_h12_l2_hd2/metrics_seed3.csv";
  REQUIRE(fs::exists(a));
  REQUIRE(fs::exists(b));
  REQUIRE(fs::exists(c));

  const std::string before = slurp(a);
  fs::remove(a);
  fs::remove(dir + "/gpt_h8_l1_hd2/manifest_seed3.json");
  CHECK(cli::run_scale_study(config, {{8, 1, 2}}, options) == 0);
  CHECK(slurp(a) == before);
}
