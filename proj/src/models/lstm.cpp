#include "models/lstm.hpp"

#include <cmath>
#include <stdexcept>

namespace regpomdp::models {

namespace {

std::vector<int64_t> to_time_major(int batch, int timesteps) {
  std::vector<int64_t> idx(static_cast<size_t>(batch) * timesteps);
  int64_t at = 0;
  for (int t = 0; t < timesteps; ++t)
    for (int b = 0; b < batch; ++b) idx[static_cast<size_t>(at++)] = static_cast<int64_t>(b) * timesteps + t;
  return idx;
}

std::vector<int64_t> to_batch_major(int batch, int timesteps) {
  std::vector<int64_t> idx(static_cast<size_t>(batch) * timesteps);
  int64_t at = 0;
  for (int b = 0; b < batch; ++b)
    for (int t = 0; t < timesteps; ++t) idx[static_cast<size_t>(at++)] = static_cast<int64_t>(t) * batch + b;
  return idx;
}

}  // namespace

Lstm::Lstm(LstmConfig config, int input_size, Rng& rng) : config_(config), input_size_(input_size) {
  if (config_.hidden <= 0 || config_.layers <= 0) throw std::invalid_argument("lstm: hidden and layers must be positive");
  const double k = 1.0 / std::sqrt(static_cast<double>(config_.hidden));
  for (int l = 0; l < config_.layers; ++l) {
    const int in = (l == 0) ? input_size_ : config_.hidden;
    w_.push_back(Tensor::rand_uniform({in + config_.hidden, 4 * config_.hidden}, rng, -k, k).set_requires_grad(true));
    b_.push_back(Tensor::rand_uniform({4 * config_.hidden}, rng, -k, k).set_requires_grad(true));
  }
}

Carry Lstm::make_carry(int batch) const {
  Carry c;
  c.batch = batch;
  for (int l = 0; l < config_.layers; ++l) {
    c.lstm_h.push_back(Tensor::zeros({batch, config_.hidden}));
    c.lstm_c.push_back(Tensor::zeros({batch, config_.hidden}));
  }
  return c;
}

Tensor Lstm::forward(Tape* tape, const Tensor& flat, int batch, int timesteps, Carry* carry) {
  if (flat.dim(0) != static_cast<int64_t>(batch) * timesteps || flat.dim(1) != input_size_) {
    throw std::invalid_argument("lstm forward: input shape " + shape_str(flat.shape()) + " does not match batch " +
                                std::to_string(batch) + " x timesteps " + std::to_string(timesteps));
  }
  Carry local = (carry && !carry->lstm_h.empty()) ? *carry : make_carry(batch);
  if (static_cast<int>(local.lstm_h.size()) != config_.layers || local.batch != batch ||
      local.lstm_h[0].dim(1) != config_.hidden) {
    throw std::invalid_argument("lstm forward: carry does not match config");
  }

  const int h = config_.hidden;
  Tensor tm = (batch == 1) ? flat : ops::gather_rows(tape, flat, to_time_major(batch, timesteps));

  std::vector<Tensor> h_state = local.lstm_h;
  std::vector<Tensor> c_state = local.lstm_c;
  std::vector<Tensor> outputs;
  outputs.reserve(static_cast<size_t>(timesteps));

  for (int t = 0; t < timesteps; ++t) {
    Tensor x = ops::slice_rows(tape, tm, static_cast<int64_t>(t) * batch, batch);
    for (int l = 0; l < config_.layers; ++l) {
      Tensor z = ops::concat_cols(tape, x, h_state[static_cast<size_t>(l)]);
      Tensor gates = ops::add(tape, ops::matmul(tape, z, w_[static_cast<size_t>(l)]), b_[static_cast<size_t>(l)]);
      Tensor ig = ops::sigmoid(tape, ops::slice_cols(tape, gates, 0, h));
      Tensor fg = ops::sigmoid(tape, ops::slice_cols(tape, gates, h, h));
      Tensor gg = ops::tanh(tape, ops::slice_cols(tape, gates, 2 * h, h));
      Tensor og = ops::sigmoid(tape, ops::slice_cols(tape, gates, 3 * h, h));
      Tensor c_new = ops::add(tape, ops::hadamard(tape, fg, c_state[static_cast<size_t>(l)]),
                              ops::hadamard(tape, ig, gg));
      Tensor h_new = ops::hadamard(tape, og, ops::tanh(tape, c_new));
      c_state[static_cast<size_t>(l)] = c_new;
      h_state[static_cast<size_t>(l)] = h_new;
      x = h_new;
    }
    outputs.push_back(x);
  }

  if (carry) {
    carry->batch = batch;
    carry->lstm_h = h_state;
    carry->lstm_c = c_state;
  }

  Tensor out_tm = (timesteps == 1) ? outputs[0] : ops::concat_rows(tape, outputs);
  return (batch == 1) ? out_tm : ops::gather_rows(tape, out_tm, to_batch_major(batch, timesteps));
}

Tensor Lstm::step(const Tensor& input, Carry& carry) {
  return forward(nullptr, input, static_cast<int>(input.dim(0)), 1, &carry);
}

void Lstm::collect_params(const std::string& prefix, std::vector<NamedParam>& out) {
  for (int l = 0; l < config_.layers; ++l) {
    out.push_back({prefix + ".l" + std::to_string(l) + ".w", w_[static_cast<size_t>(l)]});
    out.push_back({prefix + ".l" + std::to_string(l) + ".b", b_[static_cast<size_t>(l)]});
  }
}

}  // namespace regpomdp::models
