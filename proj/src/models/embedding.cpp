#include "models/embedding.hpp"

#include <cmath>
#include <stdexcept>

namespace regpomdp::models {

Linear::Linear(int in, int out, Rng& rng, double scale) {
  w = Tensor::rand_uniform({in, out}, rng, -scale, scale).set_requires_grad(true);
  b = Tensor::zeros({out}).set_requires_grad(true);
}

Linear Linear::normal_init(int in, int out, Rng& rng, double stddev) {
  Linear l;
  l.w = Tensor::randn({in, out}, rng, stddev).set_requires_grad(true);
  l.b = Tensor::zeros({out}).set_requires_grad(true);
  return l;
}

Embedding::Embedding(EmbeddingConfig config, int obs_dim, int action_count, Rng& rng)
    : config_(config), obs_dim_(obs_dim), action_count_(action_count) {
  if (config_.width() <= 0) throw std::invalid_argument("embedding: all channel widths are zero");
  if (config_.h_obs > 0) obs_ = Linear(obs_dim, config_.h_obs, rng, 1.0 / std::sqrt(static_cast<double>(obs_dim)));
  if (config_.h_action > 0)
    action_ = Linear(action_count, config_.h_action, rng, 1.0 / std::sqrt(static_cast<double>(action_count)));
  if (config_.h_reward > 0) reward_ = Linear(1, config_.h_reward, rng, 1.0);
}

Tensor Embedding::forward(Tape* tape, const Tensor& obs, const Tensor& prev_action_onehot,
                          const Tensor& prev_reward) const {
  Tensor out;
  if (config_.h_obs > 0) {
    if (obs.dim(1) != obs_dim_) {
      throw std::invalid_argument("embedding: observation width " + shape_str(obs.shape()) + " does not match env (" +
                                  std::to_string(obs_dim_) + ")");
    }
    out = obs_.apply(tape, obs);
  }
  if (config_.h_action > 0) {
    Tensor a = action_.apply(tape, prev_action_onehot);
    out = out.defined() ? ops::concat_cols(tape, out, a) : a;
  }
  if (config_.h_reward > 0) {
    Tensor r = reward_.apply(tape, prev_reward);
    out = out.defined() ? ops::concat_cols(tape, out, r) : r;
  }
  return out;
}

void Embedding::collect_params(const std::string& prefix, std::vector<NamedParam>& out) {
  if (config_.h_obs > 0) obs_.collect(prefix + ".obs", out);
  if (config_.h_action > 0) action_.collect(prefix + ".action", out);
  if (config_.h_reward > 0) reward_.collect(prefix + ".reward", out);
}

double Embedding::obs_embedding_distance(int symbol_a, int symbol_b) const {
  if (config_.h_obs <= 0) return 0.0;
  double sq = 0.0;
  const double* w = obs_.w.data();
  const int64_t cols = obs_.w.dim(1);
  for (int64_t c = 0; c < cols; ++c) {
    const double d = w[symbol_a * cols + c] - w[symbol_b * cols + c];
    sq += d * d;
  }
  return std::sqrt(sq);
}

}  // namespace regpomdp::models
