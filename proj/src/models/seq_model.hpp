#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/checkpoint.hpp"
#include "core/ops.hpp"
#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace regpomdp::models {

// Thrown when a GPT forward pass would index past the learned position table.
class PositionOverflowError : public std::runtime_error {
 public:
  explicit PositionOverflowError(const std::string& what) : std::runtime_error(what) {}
};

// Per-episode recurrent state. Only the fields for the owning architecture
// are populated; models check dimensions and throw on mismatch.
struct Carry {
  int batch = 0;

  std::vector<Tensor> lstm_h;  // per layer [B, h]
  std::vector<Tensor> lstm_c;

  std::vector<Tensor> lru_state;  // per layer [B, 2h] interleaved complex

  struct GptCache {
    // Per layer, one [B, h] entry per past position.
    std::vector<std::vector<Tensor>> k;
    std::vector<std::vector<Tensor>> v;
    int len = 0;
  } gpt;
};

// Common face of the three sequence backbones. Sequences are passed
// batch-major: row b*T + t of `flat` is episode b at time t.
class SeqModel {
 public:
  virtual ~SeqModel() = default;

  virtual std::string kind() const = 0;
  virtual int input_size() const = 0;
  virtual int hidden_size() const = 0;

  // Full-sequence forward, [B*T, in] -> [B*T, h]. `carry`, when non-null, is
  // read as the episode state before the first step and updated to the state
  // after the last one.
  virtual Tensor forward(Tape* tape, const Tensor& flat, int batch, int timesteps, Carry* carry) = 0;

  // One no-grad step for rollouts: [B, in] -> [B, h].
  virtual Tensor step(const Tensor& input, Carry& carry) = 0;

  virtual Carry make_carry(int batch) const = 0;

  virtual void collect_params(const std::string& prefix, std::vector<NamedParam>& out) = 0;
};

// Dense layer y = x W + b.
struct Linear {
  Tensor w;  // [in, out]
  Tensor b;  // [out]

  Linear() = default;
  Linear(int in, int out, Rng& rng, double scale);
  static Linear normal_init(int in, int out, Rng& rng, double stddev);

  Tensor apply(Tape* tape, const Tensor& x) const { return ops::add(tape, ops::matmul(tape, x, w), b); }

  void collect(const std::string& prefix, std::vector<NamedParam>& out) {
    out.push_back({prefix + ".w", w});
    out.push_back({prefix + ".b", b});
  }
};

}  // namespace regpomdp::models
