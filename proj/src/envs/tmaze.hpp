#pragma once

#include <json.hpp>

#include "envs/env.hpp"

namespace regpomdp::envs {

struct TMazeConfig {
  int corridor_length = 10;  // L >= 1
};

nlohmann::json tmaze_to_json(const TMazeConfig& config);
TMazeConfig tmaze_from_json(const nlohmann::json& j);

// Passive T-Maze: a corridor from O at x=0 to the junction J at x=L, with
// goals G1 (up) and G2 (down) attached to J. The goal signal is shown only at
// O on the first step. Each step t contributes (1(x_t >= t) - 1)/L, and the
// final observation earns a bonus of 1 iff it is the signalled goal. The
// episode is exactly L+1 decisions long.
//
// Observation layout: (x/L, y, signal, informative). Position and signal are
// visible only at O, J, G1, G2; the signal component is +1/-1 for G1/G2 and
// only at O.
class TMaze : public Env {
 public:
  enum Action { kLeft = 0, kRight = 1, kUp = 2, kDown = 3 };

  explicit TMaze(TMazeConfig config);

  int observation_size() const override { return 4; }
  int action_count() const override { return 4; }
  int max_episode_steps() const override { return config_.corridor_length + 1; }

  std::vector<double> reset(Rng& rng) override;
  StepResult step(int action, Rng& rng) override;
  bool done() const override { return done_; }

  std::unique_ptr<Env> clone() const override;

  const TMazeConfig& config() const { return config_; }
  int goal_is_up() const { return goal_up_; }

 private:
  std::vector<double> observe() const;

  TMazeConfig config_;
  int x_ = 0;
  int y_ = 0;
  int t_ = 0;
  bool goal_up_ = true;
  bool done_ = true;
};

}  // namespace regpomdp::envs
