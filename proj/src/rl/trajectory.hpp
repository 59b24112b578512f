#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace regpomdp::rl {

// One complete episode. Step t holds the observation the agent saw, the
// action it took, and the resulting reward; done is true exactly at the last
// step. final_obs is the post-terminal observation the env emitted.
struct Trajectory {
  std::vector<std::vector<double>> obs;
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<uint8_t> dones;
  std::vector<double> final_obs;

  int length() const { return static_cast<int>(actions.size()); }

  double total_return() const {
    double r = 0.0;
    for (double x : rewards) r += x;
    return r;
  }

  void validate() const {
    const size_t n = actions.size();
    if (n == 0 || obs.size() != n || rewards.size() != n || dones.size() != n) {
      throw std::invalid_argument("trajectory: inconsistent step counts");
    }
    for (size_t i = 0; i + 1 < n; ++i) {
      if (dones[i]) throw std::invalid_argument("trajectory: done before the final step");
    }
    if (!dones.back()) throw std::invalid_argument("trajectory: final step is not done");
  }
};

// Ring of whole episodes; sampling only ever returns complete trajectories.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity_episodes) : capacity_(capacity_episodes) {
    if (capacity_ == 0) throw std::invalid_argument("replay buffer capacity must be positive");
  }

  void push(Trajectory traj) {
    traj.validate();
    if (episodes_.size() < capacity_) {
      episodes_.push_back(std::move(traj));
    } else {
      episodes_[next_] = std::move(traj);
    }
    next_ = (next_ + 1) % capacity_;
  }

  size_t size() const { return episodes_.size(); }
  size_t capacity() const { return capacity_; }

  const Trajectory& sample(Rng& rng) const {
    if (episodes_.empty()) throw std::runtime_error("sampling from an empty replay buffer");
    return episodes_[static_cast<size_t>(rng.uniform_int(static_cast<int>(episodes_.size())))];
  }

  std::vector<const Trajectory*> sample_batch(Rng& rng, int count) const {
    std::vector<const Trajectory*> batch;
    batch.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) batch.push_back(&sample(rng));
    return batch;
  }

 private:
  std::vector<Trajectory> episodes_;
  size_t capacity_;
  size_t next_ = 0;
};

void write_episode_csv(const std::string& path, const std::vector<Trajectory>& episodes);

}  // namespace regpomdp::rl
