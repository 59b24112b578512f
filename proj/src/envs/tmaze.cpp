#include "envs/tmaze.hpp"

#include <stdexcept>

namespace regpomdp::envs {

nlohmann::json tmaze_to_json(const TMazeConfig& config) { return {{"corridor_length", config.corridor_length}}; }

TMazeConfig tmaze_from_json(const nlohmann::json& j) {
  TMazeConfig config;
  config.corridor_length = j.at("corridor_length").get<int>();
  return config;
}

TMaze::TMaze(TMazeConfig config) : config_(config) {
  if (config_.corridor_length < 1) throw std::invalid_argument("t-maze corridor length must be >= 1");
}

std::unique_ptr<Env> TMaze::clone() const { return std::make_unique<TMaze>(config_); }

std::vector<double> TMaze::observe() const {
  const int L = config_.corridor_length;
  const bool at_o = (x_ == 0 && y_ == 0 && t_ == 0);
  const bool at_landmark = (x_ == 0 && y_ == 0) || x_ == L;
  std::vector<double> obs(4, 0.0);
  if (at_landmark) {
    obs[0] = static_cast<double>(x_) / static_cast<double>(L);
    obs[1] = static_cast<double>(y_);
    obs[2] = at_o ? (goal_up_ ? 1.0 : -1.0) : 0.0;
    obs[3] = 1.0;
  }
  return obs;
}

std::vector<double> TMaze::reset(Rng& rng) {
  x_ = 0;
  y_ = 0;
  t_ = 0;
  goal_up_ = rng.bernoulli(0.5);
  done_ = false;
  return observe();
}

StepResult TMaze::step(int action, Rng& rng) {
  (void)rng;  // transitions are deterministic
  if (done_) throw std::runtime_error("tmaze_step called after episode end");
  if (action < 0 || action >= action_count()) throw std::invalid_argument("invalid action " + std::to_string(action));

  const int L = config_.corridor_length;
  int nx = x_;
  int ny = y_;
  switch (action) {
    case kLeft: nx = x_ - 1; break;
    case kRight: nx = x_ + 1; break;
    case kUp: ny = y_ + 1; break;
    case kDown: ny = y_ - 1; break;
    default: break;
  }
  // Walls: the corridor is y=0 for x in [0, L]; the goal cells sit above and
  // below the junction only.
  const bool legal = (ny == 0 && nx >= 0 && nx <= L) || (nx == L && (ny == 1 || ny == -1) && x_ == L);
  if (legal) {
    x_ = nx;
    y_ = ny;
  }

  ++t_;
  StepResult result;
  if (t_ <= L) {
    result.reward = (x_ >= t_ ? 0.0 : -1.0) / static_cast<double>(L);
    result.done = false;
    result.observation = observe();
  } else {
    // Final decision: the observation after it is the terminal cell.
    const bool reached_goal = (x_ == L && y_ != 0);
    const bool correct = reached_goal && ((y_ == 1) == goal_up_);
    result.reward = correct ? 1.0 : 0.0;
    result.done = true;
    done_ = true;
    result.observation = observe();
  }
  return result;
}

}  // namespace regpomdp::envs
