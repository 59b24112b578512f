#pragma once

#include "models/seq_model.hpp"

namespace regpomdp::models {

struct LruConfig {
  int hidden = 64;
  int layers = 2;
  double r_min = 0.5;
  double r_max = 0.99;
  double theta_max = 0.3141592653589793;  // pi / 10
};

enum class LruMode { kSequential, kScan };

// Radii drawn uniform-in-area on the ring [r_min, r_max), phases uniform in
// [0, theta_max). nu parameterizes |lambda| = exp(-exp(nu)) so the magnitude
// stays below 1 under training; gamma_log starts at log sqrt(1 - |lambda|^2).
struct LruRingInit {
  std::vector<double> nu;
  std::vector<double> theta;
  std::vector<double> gamma_log;
};
LruRingInit lru_ring_init(int units, Rng& rng, double r_min, double r_max, double theta_max);

// Core diagonal recurrence x_t = lam (.) x_{t-1} + bu_t over time-major step
// tensors [B, 2h], starting from init. kScan evaluates the same states with a
// parallel prefix over the affine maps ((a1,b1)*(a2,b2) = (a1 a2, a2 b1 + b2)).
std::vector<Tensor> lru_recurrence(Tape* tape, const std::vector<Tensor>& bu_steps, const Tensor& lam,
                                   const Tensor& init, LruMode mode);

// Deep linear recurrent unit: per layer, a complex diagonal recurrence
// x_t = lambda (.) x_{t-1} + gamma (.) (B u_t) with readout
// y_t = Re(C x_t) + d (.) u_t, wrapped in pre-norm residual blocks with a
// pointwise GLU. Sequential and parallel-scan evaluation agree to numerical
// precision.
class Lru : public SeqModel {
 public:
  Lru(LruConfig config, int input_size, Rng& rng);

  std::string kind() const override { return "lru"; }
  int input_size() const override { return input_size_; }
  int hidden_size() const override { return config_.hidden; }

  Tensor forward(Tape* tape, const Tensor& flat, int batch, int timesteps, Carry* carry) override;
  Tensor forward_mode(Tape* tape, const Tensor& flat, int batch, int timesteps, Carry* carry, LruMode mode);
  Tensor step(const Tensor& input, Carry& carry) override;
  Carry make_carry(int batch) const override;

  void collect_params(const std::string& prefix, std::vector<NamedParam>& out) override;

  const LruConfig& config() const { return config_; }

  // Largest |lambda_i| across layers; the stability monitor asserts < 1.
  double max_lambda_magnitude() const;

 private:
  struct Block {
    Tensor ln_g, ln_b;
    Tensor nu, theta, gamma_log;  // [h]
    Tensor b_mat;                 // [h, 2h] complex input map, interleaved columns
    Tensor c_re, c_im;            // [h, h] readout
    Tensor d;                     // [h] passthrough
    Linear glu_a, glu_b;
  };

  LruConfig config_;
  int input_size_;
  Linear enc_;
  std::vector<Block> blocks_;
  Tensor lnf_g, lnf_b;
};

}  // namespace regpomdp::models
