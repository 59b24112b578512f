#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "analysis/extrapolation.hpp"
#include "analysis/perturbation.hpp"
#include "analysis/probe.hpp"
#include "automata/languages.hpp"
#include "automata/monoid.hpp"
#include "cli/experiment.hpp"

namespace fs = std::filesystem;
using namespace regpomdp;

namespace {

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

void write_sidecar(const std::string& path, nlohmann::json extra, const std::string& checkpoint_base) {
  if (!checkpoint_base.empty()) {
    std::ifstream bin(checkpoint_base + ".bin", std::ios::binary);
    uint64_t h = 1469598103934665603ULL;
    char c;
    while (bin.get(c)) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
    extra["checkpoint"] = checkpoint_base;
    extra["checkpoint_content_hash"] = cli::hash_hex(h);
  }
  std::ofstream out(path, std::ios::trunc);
  out << extra.dump(2) << "\n";
}

envs::LangPomdp lang_env_for(const cli::ExperimentConfig& config) {
  if (config.task.kind != "lang") throw std::runtime_error("checkpoint was not trained on a language task");
  automata::LangSpec spec = automata::build_language(config.task.language);
  return envs::LangPomdp(spec.dfa, config.task.horizon, config.task.length_dist, config.task.gamma);
}

int cmd_lang(const std::string& name) {
  automata::LangSpec spec = automata::build_language(name);
  automata::TransitionMonoid monoid = automata::transition_monoid(spec.dfa);
  nlohmann::json out;
  out["language"] = spec.label;
  out["dfa"] = automata::dfa_to_json(spec.dfa);
  out["monoid_order"] = monoid.elements.size();
  out["group_of_units_solvable"] = monoid.group_of_units_solvable;
  out["class"] = automata::to_string(automata::classify_language(spec.dfa));
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regular-language POMDP workbench"};
  app.require_subcommand(1);

  // lang
  std::string lang_name;
  CLI::App* lang = app.add_subcommand("lang", "Inspect a built-in language: DFA, monoid order, hardness class");
  lang->add_option("name", lang_name, "PARITY | EVEN_PAIRS | SYM5")->required();

  // train
  std::string config_path, out_dir;
  uint64_t seed_override = 0;
  bool has_seed = false, resume = false, paper_budgets = false;
  CLI::App* train = app.add_subcommand("train", "Train an agent from an experiment config");
  train->add_option("--config", config_path, "Experiment config JSON")->required();
  train->add_option("--seed", seed_override, "Override the config's seed list with one seed")
      ->each([&](const std::string&) { has_seed = true; });
  train->add_option("--out", out_dir, "Override the output directory");
  train->add_flag("--resume", resume, "Skip seeds whose manifest is already complete");
  train->add_flag("--paper-budgets", paper_budgets, "Restore the paper's env-step budgets (10x the presets)");

  // eval
  std::string ckpt_base, dump_episodes;
  int eval_episodes = 500;
  int eval_length = 0;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Greedy evaluation of a checkpoint");
  eval_cmd->add_option("--ckpt", ckpt_base, "Checkpoint base path (without .json/.bin)")->required();
  eval_cmd->add_option("--episodes", eval_episodes, "Evaluation episodes");
  eval_cmd->add_option("--length", eval_length, "Force an exact word length (language tasks)");
  eval_cmd->add_option("--dump-episodes", dump_episodes, "Write the evaluation episodes to a CSV log");

  // probe
  std::string probe_out = "probe";
  int probe_episodes = 100;
  CLI::App* probe = app.add_subcommand("probe", "Hidden-state probe with silhouette score");
  probe->add_option("--ckpt", ckpt_base, "Checkpoint base path")->required();
  probe->add_option("--episodes", probe_episodes, "Probe episodes");
  probe->add_option("--out", probe_out, "Output directory");

  // extrapolate
  std::string offsets_csv = "1,2,3,4,8,16,32";
  std::string extra_out = "extrapolation";
  int extra_episodes = 500;
  CLI::App* extrap = app.add_subcommand("extrapolate", "Length extrapolation report for a checkpoint");
  extrap->add_option("--ckpt", ckpt_base, "Checkpoint base path")->required();
  extrap->add_option("--offsets", offsets_csv, "Comma-separated offsets past the training length");
  extrap->add_option("--episodes", extra_episodes, "Episodes per length");
  extrap->add_option("--out", extra_out, "Output directory");

  // perturb
  std::string n_csv = "16,32,64,128,256,512";
  std::string perturb_out = "perturbation";
  int trials = 64;
  uint64_t perturb_seed = 1;
  int gpt_hidden = 64, gpt_heads = 2, gpt_layers = 2;
  CLI::App* perturb = app.add_subcommand("perturb", "Single-token perturbation probe on a random GPT");
  perturb->add_option("--n", n_csv, "Comma-separated sequence lengths");
  perturb->add_option("--trials", trials, "Trials per length");
  perturb->add_option("--seed", perturb_seed, "RNG seed");
  perturb->add_option("--hidden", gpt_hidden, "GPT hidden size");
  perturb->add_option("--heads", gpt_heads, "GPT heads");
  perturb->add_option("--layers", gpt_layers, "GPT layers");
  perturb->add_option("--out", perturb_out, "Output directory");

  // scale
  std::string grid_spec = "64,2,2;128,2,2;128,4,4";
  CLI::App* scale = app.add_subcommand("scale", "GPT scale sweep over a hidden,layers,heads grid");
  scale->add_option("--config", config_path, "Base experiment config JSON (gpt model)")->required();
  scale->add_option("--grid", grid_spec, "Semicolon-separated hidden,layers,heads triples");
  scale->add_flag("--resume", resume, "Skip completed runs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*lang) return cmd_lang(lang_name);

    if (*train) {
      cli::ExperimentConfig config = cli::load_experiment_config(config_path);
      cli::RunOptions options;
      if (train->count("--seed")) options.seed_override = seed_override;
      if (!out_dir.empty()) options.out_dir_override = out_dir;
      options.resume = resume;
      options.paper_budgets = paper_budgets;
      return cli::run_experiment(config, options);
    }

    if (*eval_cmd) {
      cli::LoadedAgent loaded = cli::load_agent_checkpoint(ckpt_base);
      std::unique_ptr<envs::Env> env = cli::build_env(loaded.config.task);
      if (eval_length > 0) {
        auto* lang_env = dynamic_cast<envs::LangPomdp*>(env.get());
        if (!lang_env) throw std::runtime_error("--length only applies to language tasks");
        lang_env->force_word_length(eval_length);
      }
      Rng rng(loaded.seed ^ 0xE7A1ULL);
      rl::EvalResult result;
      if (!dump_episodes.empty()) {
        std::vector<rl::Trajectory> episodes;
        rl::AgentActor actor(*loaded.agent);
        Rng eps_rng = rng.fork(7);
        for (int e = 0; e < eval_episodes; ++e) {
          episodes.push_back(rl::collect_episode(*env, actor, 0.0, rng, eps_rng));
          result.mean_return += episodes.back().total_return();
          result.success += env->success_from_final_reward(episodes.back().rewards.back());
        }
        result.mean_return /= eval_episodes;
        result.success /= eval_episodes;
        rl::write_episode_csv(dump_episodes, episodes);
      } else {
        result = rl::evaluate(*env, *loaded.agent, eval_episodes, rng);
      }
      nlohmann::json out;
      out["episodes"] = eval_episodes;
      out["mean_return"] = result.mean_return;
      out["success"] = result.success;
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (*probe) {
      cli::LoadedAgent loaded = cli::load_agent_checkpoint(ckpt_base);
      envs::LangPomdp env = lang_env_for(loaded.config);
      Rng rng(loaded.seed ^ 0xBEEFULL);
      analysis::LabeledHiddenSet set = analysis::probe_hidden(*loaded.agent, env, probe_episodes, rng);
      const double score = analysis::silhouette(set);
      fs::create_directories(probe_out);
      analysis::write_labeled_csv(probe_out + "/hidden_states.csv", set);
      nlohmann::json sidecar;
      sidecar["silhouette"] = score;
      sidecar["episodes"] = probe_episodes;
      sidecar["seed"] = loaded.seed;
      sidecar["config"] = cli::experiment_to_json(loaded.config);
      write_sidecar(probe_out + "/probe.json", sidecar, ckpt_base);
      std::cout << "silhouette " << score << "\n";
      return 0;
    }

    if (*extrap) {
      cli::LoadedAgent loaded = cli::load_agent_checkpoint(ckpt_base);
      envs::LangPomdp env = lang_env_for(loaded.config);
      std::vector<int> offsets = parse_int_list(offsets_csv);
      Rng rng(loaded.seed ^ 0x5EEDULL);
      analysis::TerminalPolicy policy = analysis::agent_terminal_policy(*loaded.agent);
      analysis::ExtrapolationReport report =
          analysis::extrapolation_eval(policy, env, loaded.config.task.horizon, offsets, extra_episodes, rng);
      fs::create_directories(extra_out);
      analysis::write_extrapolation_csv(extra_out + "/extrapolation.csv", report);
      nlohmann::json sidecar;
      sidecar["train_n"] = report.train_n;
      sidecar["episodes_per_length"] = extra_episodes;
      sidecar["seed"] = loaded.seed;
      sidecar["config"] = cli::experiment_to_json(loaded.config);
      write_sidecar(extra_out + "/extrapolation.json", sidecar, ckpt_base);
      for (const auto& row : report.rows) {
        std::printf("length %d accuracy %.4f%s\n", row.length, row.accuracy,
                    row.structural_failure ? " (structural failure)" : "");
      }
      return 0;
    }

    if (*perturb) {
      std::vector<int> grid = parse_int_list(n_csv);
      models::GptConfig gpt_config;
      gpt_config.hidden = gpt_hidden;
      gpt_config.heads = gpt_heads;
      gpt_config.layers = gpt_layers;
      gpt_config.max_positions = grid.empty() ? 512 : grid.back();
      models::EmbeddingConfig embed{gpt_hidden, 0, 0};
      Rng rng(perturb_seed);
      analysis::PerturbationReport report = analysis::perturbation_probe(gpt_config, embed, grid, trials, rng);
      fs::create_directories(perturb_out);
      analysis::write_perturbation_csv(perturb_out + "/perturbation.csv", report);
      nlohmann::json sidecar;
      sidecar["slope"] = report.slope;
      sidecar["embed_distance"] = report.embed_distance;
      sidecar["trials"] = trials;
      sidecar["seed"] = perturb_seed;
      sidecar["gpt"] = {{"hidden", gpt_hidden}, {"heads", gpt_heads}, {"layers", gpt_layers}};
      write_sidecar(perturb_out + "/perturbation.json", sidecar, "");
      std::printf("slope %.4f (embed distance %.4f)\n", report.slope, report.embed_distance);
      return 0;
    }

    if (*scale) {
      cli::ExperimentConfig config = cli::load_experiment_config(config_path);
      std::vector<cli::ScalePoint> grid;
      std::stringstream ss(grid_spec);
      std::string triple;
      while (std::getline(ss, triple, ';')) {
        std::vector<int> vals = parse_int_list(triple);
        if (vals.size() != 3) throw std::runtime_error("bad grid triple '" + triple + "'");
        grid.push_back({vals[0], vals[1], vals[2]});
      }
      cli::RunOptions options;
      options.resume = resume;
      return cli::run_scale_study(config, grid, options);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
