#include "cli/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "core/checkpoint.hpp"

namespace regpomdp::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCodeVersion = "regpomdp 0.1.0";

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void write_json_atomic(const std::string& path, const nlohmann::json& j) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << j.dump(2) << "\n";
  }
  fs::rename(tmp, path);
}

std::string format_metric(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

int parallel_workers(int jobs) {
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers <= 0) workers = 1;
  if (const char* env = std::getenv("REGPOMDP_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) workers = cap;
  }
  return std::max(1, std::min(workers, jobs));
}

RunPaths run_paths(const std::string& out_dir, uint64_t seed) {
  RunPaths p;
  p.dir = out_dir;
  const std::string tag = "seed" + std::to_string(seed);
  p.metrics_csv = out_dir + "/metrics_" + tag + ".csv";
  p.manifest_json = out_dir + "/manifest_" + tag + ".json";
  p.checkpoint_base = out_dir + "/ckpt_" + tag;
  p.config_copy = out_dir + "/config.json";
  return p;
}

SeedRunResult run_single_seed(const ExperimentConfig& config, uint64_t seed, const std::string& out_dir,
                              bool resume) {
  RunPaths paths = run_paths(out_dir, seed);
  SeedRunResult result;
  result.seed = seed;
  result.metrics_path = paths.metrics_csv;
  result.checkpoint_base = paths.checkpoint_base;

  if (resume && fs::exists(paths.manifest_json)) {
    std::ifstream in(paths.manifest_json);
    nlohmann::json manifest = nlohmann::json::parse(in);
    if (manifest.value("completed", false)) {
      result.completed = true;
      result.skipped_existing = true;
      result.final_success = manifest.at("final").at("success").get<double>();
      result.final_return = manifest.at("final").at("return").get<double>();
      return result;
    }
  }

  fs::create_directories(out_dir);
  const nlohmann::json config_json = experiment_to_json(config);
  if (!fs::exists(paths.config_copy)) write_json_atomic(paths.config_copy, config_json);

  const std::string start_time = iso_timestamp();
  Rng rng(seed);
  std::unique_ptr<envs::Env> env = build_env(config.task);
  rl::AgentPair agents = build_agent_pair(config, rng);

  std::ofstream csv(paths.metrics_csv, std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot open " + paths.metrics_csv + " for writing");
  csv << "env_steps,grad_steps,episodes,eval_return,eval_success,loss\n";
  int64_t evals_seen = 0;
  rl::MetricsSink sink = [&](const rl::MetricsRow& row) {
    csv << row.env_steps << "," << row.grad_steps << "," << row.episodes << "," << format_metric(row.eval_return)
        << "," << format_metric(row.eval_success) << "," << format_metric(row.loss) << "\n";
    csv.flush();
    ++evals_seen;
    if (config.rl.checkpoint_interval > 0 && evals_seen % config.rl.checkpoint_interval == 0) {
      nlohmann::json meta;
      meta["experiment"] = config_json;
      meta["seed"] = seed;
      meta["env_steps"] = row.env_steps;
      meta["grad_steps"] = row.grad_steps;
      std::vector<NamedParam> params = agents.online->named_params();
      save_checkpoint(paths.checkpoint_base + "_eval" + std::to_string(evals_seen), params, meta);
    }
  };

  rl::TrainResult train_result = rl::train(*env, agents, config.rl, rng.fork(99), sink);
  csv.close();

  nlohmann::json ckpt_meta;
  ckpt_meta["experiment"] = config_json;
  ckpt_meta["seed"] = seed;
  ckpt_meta["env_steps"] = train_result.env_steps;
  ckpt_meta["grad_steps"] = train_result.grad_steps;
  std::vector<NamedParam> params = agents.online->named_params();
  save_checkpoint(paths.checkpoint_base, params, ckpt_meta);

  nlohmann::json manifest;
  manifest["config"] = config_json;
  manifest["config_hash"] = hash_hex(config_hash(config_json));
  manifest["seed"] = seed;
  manifest["start_time"] = start_time;
  manifest["end_time"] = iso_timestamp();
  manifest["code_version"] = kCodeVersion;
  manifest["artifacts"] = {{"metrics", paths.metrics_csv}, {"checkpoint", paths.checkpoint_base}};
  manifest["final"] = {{"success", train_result.final_success},
                       {"return", train_result.final_return},
                       {"env_steps", train_result.env_steps},
                       {"grad_steps", train_result.grad_steps},
                       {"stopped_on_success", train_result.stopped_on_success}};
  manifest["completed"] = true;
  write_json_atomic(paths.manifest_json, manifest);

  result.completed = true;
  result.final_success = train_result.final_success;
  result.final_return = train_result.final_return;
  return result;
}

int run_experiment(ExperimentConfig config, const RunOptions& options) {
  if (options.seed_override) config.seeds = {*options.seed_override};
  if (options.out_dir_override) config.out_dir = *options.out_dir_override;
  if (options.paper_budgets) config.rl.env_step_budget *= 10;

  const int workers = parallel_workers(static_cast<int>(config.seeds.size()));
  std::vector<SeedRunResult> results(config.seeds.size());
  std::vector<std::string> errors(config.seeds.size());
  std::atomic<size_t> next{0};

  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= config.seeds.size()) return;
      try {
        results[i] = run_single_seed(config, config.seeds[i], config.out_dir, options.resume);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();

  bool all_completed = true;
  nlohmann::json summary;
  summary["config_hash"] = hash_hex(config_hash(experiment_to_json(config)));
  summary["seeds"] = config.seeds;
  nlohmann::json per_seed = nlohmann::json::array();
  double success_sum = 0.0;
  for (size_t i = 0; i < results.size(); ++i) {
    nlohmann::json entry;
    entry["seed"] = config.seeds[i];
    entry["completed"] = results[i].completed;
    if (!errors[i].empty()) {
      entry["error"] = errors[i];
      all_completed = false;
      std::fprintf(stderr, "seed %llu failed: %s\n", static_cast<unsigned long long>(config.seeds[i]),
                   errors[i].c_str());
    } else {
      entry["final_success"] = results[i].final_success;
      entry["final_return"] = results[i].final_return;
      success_sum += results[i].final_success;
    }
    per_seed.push_back(entry);
  }
  summary["per_seed"] = per_seed;
  summary["final_success_mean"] = results.empty() ? 0.0 : success_sum / static_cast<double>(results.size());
  if (all_completed) {
    fs::create_directories(config.out_dir);
    write_json_atomic(config.out_dir + "/summary.json", summary);
  }
  return all_completed ? 0 : 1;
}

LoadedAgent load_agent_checkpoint(const std::string& checkpoint_base) {
  nlohmann::json meta = read_checkpoint_meta(checkpoint_base);
  LoadedAgent loaded;
  loaded.config = experiment_from_json(meta.at("experiment"));
  loaded.seed = meta.at("seed").get<uint64_t>();
  Rng rng(loaded.seed);
  rl::AgentPair pair = build_agent_pair(loaded.config, rng);
  loaded.agent = std::move(pair.online);
  std::vector<NamedParam> params = loaded.agent->named_params();
  load_checkpoint(checkpoint_base, params);
  return loaded;
}

int run_scale_study(const ExperimentConfig& base, const std::vector<ScalePoint>& grid, const RunOptions& options) {
  if (base.model.kind != "gpt") throw std::invalid_argument("scale study expects a gpt base config");
  int rc = 0;
  for (const ScalePoint& point : grid) {
    ExperimentConfig config = base;
    config.model.gpt.hidden = point.hidden;
    config.model.gpt.layers = point.layers;
    config.model.gpt.heads = point.heads;
    config.out_dir = base.out_dir + "/gpt_h" + std::to_string(point.hidden) + "_l" + std::to_string(point.layers) +
                     "_hd" + std::to_string(point.heads);
    RunOptions opts = options;
    opts.out_dir_override.reset();
    rc |= run_experiment(config, opts);
  }
  return rc;
}

}  // namespace regpomdp::cli
