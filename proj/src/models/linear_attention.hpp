#pragma once

#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace regpomdp::models {

// Causal linear attention with kernel phi = elu + 1, computed two ways:
//   parallel:  out_i = sum_{j<=i} phi(q_i).phi(k_j) v_j / sum_{j<=i} phi(q_i).phi(k_j)
//   recurrent: s_i = s_{i-1} + phi(k_i) v_i^T,  z_i = z_{i-1} + phi(k_i),
//              out_i = s_i^T phi(q_i) / (z_i . phi(q_i))
// The two routes are each other's oracle.
struct LinearAttentionCheck {
  Tensor parallel;   // [T, h]
  Tensor recurrent;  // [T, h]
  double max_abs_diff = 0.0;
};

LinearAttentionCheck linear_attention_dual_check(Rng& rng, int timesteps, int hidden);

// Same computation on caller-provided inputs and projections.
LinearAttentionCheck linear_attention_dual_check(const Tensor& inputs, const Tensor& wq, const Tensor& wk,
                                                 const Tensor& wv);

}  // namespace regpomdp::models
