#include "models/gpt.hpp"

#include <cmath>
#include <stdexcept>

namespace regpomdp::models {

namespace {

constexpr double kMaskedOut = -1e30;  // stands in for -inf in the causal mask

Tensor causal_mask(int timesteps) {
  Tensor mask = Tensor::zeros({timesteps, timesteps});
  double* m = mask.data();
  for (int i = 0; i < timesteps; ++i)
    for (int j = i + 1; j < timesteps; ++j) m[i * timesteps + j] = kMaskedOut;
  return mask;
}

}  // namespace

Gpt::Gpt(GptConfig config, int input_size, Rng& rng) : config_(config), input_size_(input_size) {
  if (config_.hidden % config_.heads != 0) {
    throw std::invalid_argument("gpt: hidden " + std::to_string(config_.hidden) + " not divisible by heads " +
                                std::to_string(config_.heads));
  }
  const double std = 0.02;
  input_proj_ = Linear::normal_init(input_size_, config_.hidden, rng, std);
  pos_table_ = Tensor::randn({config_.max_positions, config_.hidden}, rng, std).set_requires_grad(true);
  for (int l = 0; l < config_.layers; ++l) {
    Block blk;
    blk.ln1_g = Tensor::full({config_.hidden}, 1.0).set_requires_grad(true);
    blk.ln1_b = Tensor::zeros({config_.hidden}).set_requires_grad(true);
    blk.wq = Linear::normal_init(config_.hidden, config_.hidden, rng, std);
    blk.wk = Linear::normal_init(config_.hidden, config_.hidden, rng, std);
    blk.wv = Linear::normal_init(config_.hidden, config_.hidden, rng, std);
    blk.proj = Linear::normal_init(config_.hidden, config_.hidden, rng, std);
    blk.ln2_g = Tensor::full({config_.hidden}, 1.0).set_requires_grad(true);
    blk.ln2_b = Tensor::zeros({config_.hidden}).set_requires_grad(true);
    blk.fc1 = Linear::normal_init(config_.hidden, config_.mlp_mult * config_.hidden, rng, std);
    blk.fc2 = Linear::normal_init(config_.mlp_mult * config_.hidden, config_.hidden, rng, std);
    blocks_.push_back(std::move(blk));
  }
  lnf_g = Tensor::full({config_.hidden}, 1.0).set_requires_grad(true);
  lnf_b = Tensor::zeros({config_.hidden}).set_requires_grad(true);
}

Carry Gpt::make_carry(int batch) const {
  Carry c;
  c.batch = batch;
  c.gpt.k.resize(static_cast<size_t>(config_.layers));
  c.gpt.v.resize(static_cast<size_t>(config_.layers));
  c.gpt.len = 0;
  return c;
}

Tensor Gpt::block_attention(Tape* tape, const Block& blk, const Tensor& normed, int batch, int timesteps,
                            const Tensor& mask) const {
  const int h = config_.hidden;
  const int dk = h / config_.heads;
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));

  Tensor q = blk.wq.apply(tape, normed);
  Tensor k = blk.wk.apply(tape, normed);
  Tensor v = blk.wv.apply(tape, normed);

  std::vector<Tensor> per_episode;
  per_episode.reserve(static_cast<size_t>(batch));
  for (int b = 0; b < batch; ++b) {
    Tensor qb = ops::slice_rows(tape, q, static_cast<int64_t>(b) * timesteps, timesteps);
    Tensor kb = ops::slice_rows(tape, k, static_cast<int64_t>(b) * timesteps, timesteps);
    Tensor vb = ops::slice_rows(tape, v, static_cast<int64_t>(b) * timesteps, timesteps);
    Tensor heads_out;
    for (int hd = 0; hd < config_.heads; ++hd) {
      Tensor qh = ops::slice_cols(tape, qb, static_cast<int64_t>(hd) * dk, dk);
      Tensor kh = ops::slice_cols(tape, kb, static_cast<int64_t>(hd) * dk, dk);
      Tensor vh = ops::slice_cols(tape, vb, static_cast<int64_t>(hd) * dk, dk);
      Tensor scores = ops::scale(tape, ops::matmul_nt(tape, qh, kh), inv_sqrt_dk);
      Tensor weights = ops::softmax_rows(tape, ops::add(tape, scores, mask));
      Tensor oh = ops::matmul(tape, weights, vh);
      heads_out = heads_out.defined() ? ops::concat_cols(tape, heads_out, oh) : oh;
    }
    per_episode.push_back(heads_out);
  }
  Tensor att = (batch == 1) ? per_episode[0] : ops::concat_rows(tape, per_episode);
  return blk.proj.apply(tape, att);
}

Tensor Gpt::forward(Tape* tape, const Tensor& flat, int batch, int timesteps, Carry* carry) {
  if (carry && carry->gpt.len > 0) {
    throw std::invalid_argument("gpt forward: warm cache not supported; use step() for incremental decoding");
  }
  if (flat.dim(0) != static_cast<int64_t>(batch) * timesteps || flat.dim(1) != input_size_) {
    throw std::invalid_argument("gpt forward: input shape " + shape_str(flat.shape()) + " does not match batch " +
                                std::to_string(batch) + " x timesteps " + std::to_string(timesteps));
  }
  if (timesteps > config_.max_positions) {
    throw PositionOverflowError("gpt: sequence length " + std::to_string(timesteps) + " exceeds position table of " +
                                std::to_string(config_.max_positions));
  }

  std::vector<int64_t> pos_ids(static_cast<size_t>(batch) * timesteps);
  for (int b = 0; b < batch; ++b)
    for (int t = 0; t < timesteps; ++t) pos_ids[static_cast<size_t>(b) * timesteps + t] = t;

  Tensor x = ops::add(tape, input_proj_.apply(tape, flat), ops::embedding_lookup(tape, pos_table_, pos_ids));
  Tensor mask = causal_mask(timesteps);

  for (const Block& blk : blocks_) {
    Tensor a = ops::layer_norm(tape, x, blk.ln1_g, blk.ln1_b);
    x = ops::add(tape, x, block_attention(tape, blk, a, batch, timesteps, mask));
    Tensor m = ops::layer_norm(tape, x, blk.ln2_g, blk.ln2_b);
    m = blk.fc2.apply(tape, ops::gelu(tape, blk.fc1.apply(tape, m)));
    x = ops::add(tape, x, m);
  }
  return ops::layer_norm(tape, x, lnf_g, lnf_b);
}

Tensor Gpt::step(const Tensor& input, Carry& carry) {
  const int batch = static_cast<int>(input.dim(0));
  if (carry.gpt.k.size() != static_cast<size_t>(config_.layers)) {
    throw std::invalid_argument("gpt step: carry does not match config");
  }
  if (carry.gpt.len > 0 && carry.batch != batch) {
    throw std::invalid_argument("gpt step: batch changed mid-episode");
  }
  const int pos = carry.gpt.len;
  if (pos >= config_.max_positions) {
    throw PositionOverflowError("gpt: position " + std::to_string(pos) + " exceeds position table of " +
                                std::to_string(config_.max_positions));
  }
  carry.batch = batch;

  const int h = config_.hidden;
  const int dk = h / config_.heads;
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));

  Tensor pos_row = ops::slice_rows(nullptr, pos_table_, pos, 1);
  Tensor pos_vec = Tensor::from_data({h}, std::vector<double>(pos_row.data(), pos_row.data() + h));
  Tensor x = ops::add(nullptr, input_proj_.apply(nullptr, input), pos_vec);

  for (size_t l = 0; l < blocks_.size(); ++l) {
    const Block& blk = blocks_[l];
    Tensor a = ops::layer_norm(nullptr, x, blk.ln1_g, blk.ln1_b);
    Tensor q = blk.wq.apply(nullptr, a);
    carry.gpt.k[l].push_back(blk.wk.apply(nullptr, a));
    carry.gpt.v[l].push_back(blk.wv.apply(nullptr, a));
    const auto& ks = carry.gpt.k[l];
    const auto& vs = carry.gpt.v[l];
    const int steps = static_cast<int>(ks.size());

    Tensor att = Tensor::zeros({batch, h});
    std::vector<double> logits(static_cast<size_t>(steps));
    for (int b = 0; b < batch; ++b) {
      for (int hd = 0; hd < config_.heads; ++hd) {
        const int off = hd * dk;
        const double* qp = q.data() + b * h + off;
        double mx = -1e300;
        for (int s = 0; s < steps; ++s) {
          const double* kp = ks[static_cast<size_t>(s)].data() + b * h + off;
          double dot = 0.0;
          for (int c = 0; c < dk; ++c) dot += qp[c] * kp[c];
          logits[static_cast<size_t>(s)] = dot * inv_sqrt_dk;
          mx = std::max(mx, logits[static_cast<size_t>(s)]);
        }
        double denom = 0.0;
        for (int s = 0; s < steps; ++s) {
          logits[static_cast<size_t>(s)] = std::exp(logits[static_cast<size_t>(s)] - mx);
          denom += logits[static_cast<size_t>(s)];
        }
        double* op = att.data() + b * h + off;
        for (int s = 0; s < steps; ++s) {
          const double w = logits[static_cast<size_t>(s)] / denom;
          const double* vp = vs[static_cast<size_t>(s)].data() + b * h + off;
          for (int c = 0; c < dk; ++c) op[c] += w * vp[c];
        }
      }
    }
    x = ops::add(nullptr, x, blk.proj.apply(nullptr, att));
    Tensor m = ops::layer_norm(nullptr, x, blk.ln2_g, blk.ln2_b);
    m = blk.fc2.apply(nullptr, ops::gelu(nullptr, blk.fc1.apply(nullptr, m)));
    x = ops::add(nullptr, x, m);
  }
  carry.gpt.len = pos + 1;
  return ops::layer_norm(nullptr, x, lnf_g, lnf_b);
}

void Gpt::collect_params(const std::string& prefix, std::vector<NamedParam>& out) {
  input_proj_.collect(prefix + ".input", out);
  out.push_back({prefix + ".pos", pos_table_});
  for (size_t l = 0; l < blocks_.size(); ++l) {
    const std::string p = prefix + ".l" + std::to_string(l);
    Block& blk = blocks_[l];
    out.push_back({p + ".ln1.g", blk.ln1_g});
    out.push_back({p + ".ln1.b", blk.ln1_b});
    blk.wq.collect(p + ".wq", out);
    blk.wk.collect(p + ".wk", out);
    blk.wv.collect(p + ".wv", out);
    blk.proj.collect(p + ".proj", out);
    out.push_back({p + ".ln2.g", blk.ln2_g});
    out.push_back({p + ".ln2.b", blk.ln2_b});
    blk.fc1.collect(p + ".fc1", out);
    blk.fc2.collect(p + ".fc2", out);
  }
  out.push_back({prefix + ".lnf.g", lnf_g});
  out.push_back({prefix + ".lnf.b", lnf_b});
}

}  // namespace regpomdp::models
