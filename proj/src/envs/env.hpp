#pragma once

#include <memory>
#include <vector>

#include "core/rng.hpp"

namespace regpomdp::envs {

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
};

// Episodic environment. Instances are cheap values; one instance must not be
// shared mutably across threads, but clones may run in parallel.
class Env {
 public:
  virtual ~Env() = default;

  virtual int observation_size() const = 0;
  virtual int action_count() const = 0;
  virtual int max_episode_steps() const = 0;

  virtual std::vector<double> reset(Rng& rng) = 0;
  virtual StepResult step(int action, Rng& rng) = 0;
  virtual bool done() const = 0;

  virtual std::unique_ptr<Env> clone() const = 0;

  // Task-level success for a finished episode given its final step reward.
  virtual double success_from_final_reward(double final_reward) const { return final_reward >= 0.5 ? 1.0 : 0.0; }
};

}  // namespace regpomdp::envs
