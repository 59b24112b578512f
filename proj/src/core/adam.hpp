#pragma once

#include <cstdint>
#include <vector>

#include "core/tensor.hpp"

namespace regpomdp {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Moments are kept per parameter, matching the
// parameter shapes. step() throws if any gradient is non-finite so a broken
// training run aborts instead of drifting.
class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamConfig config);
  // lr_scales multiplies the learning rate per parameter (recurrence
  // parameters are often trained slower than the rest of the stack).
  Adam(std::vector<Tensor> params, AdamConfig config, std::vector<double> lr_scales);

  void step();
  void zero_grad();

  int64_t step_count() const { return step_count_; }
  const AdamConfig& config() const { return config_; }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::vector<double> lr_scales_;
  AdamConfig config_;
  int64_t step_count_ = 0;
};

}  // namespace regpomdp
