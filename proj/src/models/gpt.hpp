#pragma once

#include "models/seq_model.hpp"

namespace regpomdp::models {

struct GptConfig {
  int hidden = 64;
  int heads = 2;
  int layers = 2;
  int max_positions = 128;
  int mlp_mult = 4;
};

// Pre-norm causal transformer with a learned absolute position table.
// forward() runs whole sequences from position 0; step() decodes
// incrementally against a per-episode key/value cache and matches forward()
// to numerical precision.
class Gpt : public SeqModel {
 public:
  Gpt(GptConfig config, int input_size, Rng& rng);

  std::string kind() const override { return "gpt"; }
  int input_size() const override { return input_size_; }
  int hidden_size() const override { return config_.hidden; }

  Tensor forward(Tape* tape, const Tensor& flat, int batch, int timesteps, Carry* carry) override;
  Tensor step(const Tensor& input, Carry& carry) override;
  Carry make_carry(int batch) const override;

  void collect_params(const std::string& prefix, std::vector<NamedParam>& out) override;

  const GptConfig& config() const { return config_; }

 private:
  struct Block {
    Tensor ln1_g, ln1_b;
    Linear wq, wk, wv, proj;
    Tensor ln2_g, ln2_b;
    Linear fc1, fc2;
  };

  Tensor block_attention(Tape* tape, const Block& blk, const Tensor& normed, int batch, int timesteps,
                         const Tensor& mask) const;

  GptConfig config_;
  int input_size_;
  Linear input_proj_;
  Tensor pos_table_;  // [max_positions, hidden]
  std::vector<Block> blocks_;
  Tensor lnf_g, lnf_b;
};

}  // namespace regpomdp::models
