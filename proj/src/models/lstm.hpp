#pragma once

#include "models/seq_model.hpp"

namespace regpomdp::models {

struct LstmConfig {
  int hidden = 128;
  int layers = 1;
};

// Stacked LSTM cells; the final layer's h_t sequence is the model output.
class Lstm : public SeqModel {
 public:
  Lstm(LstmConfig config, int input_size, Rng& rng);

  std::string kind() const override { return "lstm"; }
  int input_size() const override { return input_size_; }
  int hidden_size() const override { return config_.hidden; }

  Tensor forward(Tape* tape, const Tensor& flat, int batch, int timesteps, Carry* carry) override;
  Tensor step(const Tensor& input, Carry& carry) override;
  Carry make_carry(int batch) const override;

  void collect_params(const std::string& prefix, std::vector<NamedParam>& out) override;

  const LstmConfig& config() const { return config_; }

 private:
  LstmConfig config_;
  int input_size_;
  // Per layer: weights [in_l + h, 4h] with gate order (i, f, g, o), bias [4h].
  std::vector<Tensor> w_;
  std::vector<Tensor> b_;
};

}  // namespace regpomdp::models
