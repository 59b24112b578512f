#include "models/lru.hpp"

#include <cmath>
#include <stdexcept>

namespace regpomdp::models {

namespace {

std::vector<int64_t> lru_time_major(int batch, int timesteps) {
  std::vector<int64_t> idx(static_cast<size_t>(batch) * timesteps);
  int64_t at = 0;
  for (int t = 0; t < timesteps; ++t)
    for (int b = 0; b < batch; ++b) idx[static_cast<size_t>(at++)] = static_cast<int64_t>(b) * timesteps + t;
  return idx;
}

std::vector<int64_t> lru_batch_major(int batch, int timesteps) {
  std::vector<int64_t> idx(static_cast<size_t>(batch) * timesteps);
  int64_t at = 0;
  for (int b = 0; b < batch; ++b)
    for (int t = 0; t < timesteps; ++t) idx[static_cast<size_t>(at++)] = static_cast<int64_t>(t) * batch + b;
  return idx;
}

}  // namespace

LruRingInit lru_ring_init(int units, Rng& rng, double r_min, double r_max, double theta_max) {
  if (!(r_min >= 0.0 && r_min < r_max && r_max < 1.0)) {
    throw std::invalid_argument("lru_ring_init: need 0 <= r_min < r_max < 1");
  }
  if (theta_max < 0.0) throw std::invalid_argument("lru_ring_init: theta_max must be non-negative");
  LruRingInit init;
  init.nu.resize(static_cast<size_t>(units));
  init.theta.resize(static_cast<size_t>(units));
  init.gamma_log.resize(static_cast<size_t>(units));
  for (int i = 0; i < units; ++i) {
    const double u = rng.uniform();
    const double r = std::sqrt(u * (r_max * r_max - r_min * r_min) + r_min * r_min);
    init.nu[static_cast<size_t>(i)] = std::log(-std::log(r));
    init.theta[static_cast<size_t>(i)] = rng.uniform() * theta_max;
    init.gamma_log[static_cast<size_t>(i)] = 0.5 * std::log(1.0 - r * r);
  }
  return init;
}

Lru::Lru(LruConfig config, int input_size, Rng& rng) : config_(config), input_size_(input_size) {
  if (config_.hidden <= 0 || config_.layers <= 0) throw std::invalid_argument("lru: hidden and layers must be positive");
  const int h = config_.hidden;
  enc_ = Linear(input_size_, h, rng, 1.0 / std::sqrt(static_cast<double>(input_size_)));
  for (int l = 0; l < config_.layers; ++l) {
    Block blk;
    blk.ln_g = Tensor::full({h}, 1.0).set_requires_grad(true);
    blk.ln_b = Tensor::zeros({h}).set_requires_grad(true);
    LruRingInit init = lru_ring_init(h, rng, config_.r_min, config_.r_max, config_.theta_max);
    blk.nu = Tensor::from_data({h}, init.nu).set_requires_grad(true);
    blk.theta = Tensor::from_data({h}, init.theta).set_requires_grad(true);
    blk.gamma_log = Tensor::from_data({h}, init.gamma_log).set_requires_grad(true);
    blk.b_mat = Tensor::randn({h, 2 * h}, rng, 1.0 / std::sqrt(2.0 * h)).set_requires_grad(true);
    blk.c_re = Tensor::randn({h, h}, rng, 1.0 / std::sqrt(static_cast<double>(h))).set_requires_grad(true);
    blk.c_im = Tensor::randn({h, h}, rng, 1.0 / std::sqrt(static_cast<double>(h))).set_requires_grad(true);
    blk.d = Tensor::randn({h}, rng, 1.0).set_requires_grad(true);
    blk.glu_a = Linear(h, h, rng, 1.0 / std::sqrt(static_cast<double>(h)));
    blk.glu_b = Linear(h, h, rng, 1.0 / std::sqrt(static_cast<double>(h)));
    blocks_.push_back(std::move(blk));
  }
  lnf_g = Tensor::full({h}, 1.0).set_requires_grad(true);
  lnf_b = Tensor::zeros({h}).set_requires_grad(true);
}

std::vector<Tensor> lru_recurrence(Tape* tape, const std::vector<Tensor>& bu_steps, const Tensor& lam,
                                   const Tensor& init, LruMode mode) {
  const int timesteps = static_cast<int>(bu_steps.size());
  std::vector<Tensor> states;
  states.reserve(static_cast<size_t>(timesteps));
  if (mode == LruMode::kSequential) {
    Tensor state = init;
    for (int t = 0; t < timesteps; ++t) {
      state = ops::add(tape, ops::complex_pair_mul(tape, state, lam), bu_steps[static_cast<size_t>(t)]);
      states.push_back(state);
    }
    return states;
  }
  // Hillis-Steele inclusive scan of the affine maps (a, b): x -> a x + b
  // under (a1,b1)*(a2,b2) = (a1 a2, a2 b1 + b2), earlier map first.
  std::vector<Tensor> a_cum(static_cast<size_t>(timesteps), lam);
  std::vector<Tensor> b_cum = bu_steps;
  for (int d = 1; d < timesteps; d *= 2) {
    std::vector<Tensor> a_next = a_cum;
    std::vector<Tensor> b_next = b_cum;
    for (int t = timesteps - 1; t >= d; --t) {
      a_next[static_cast<size_t>(t)] =
          ops::complex_pair_mul(tape, a_cum[static_cast<size_t>(t - d)], a_cum[static_cast<size_t>(t)]);
      b_next[static_cast<size_t>(t)] =
          ops::add(tape, ops::complex_pair_mul(tape, b_cum[static_cast<size_t>(t - d)], a_cum[static_cast<size_t>(t)]),
                   b_cum[static_cast<size_t>(t)]);
    }
    a_cum = std::move(a_next);
    b_cum = std::move(b_next);
  }
  for (int t = 0; t < timesteps; ++t) {
    states.push_back(ops::add(tape, ops::complex_pair_mul(tape, init, a_cum[static_cast<size_t>(t)]),
                              b_cum[static_cast<size_t>(t)]));
  }
  return states;
}

Carry Lru::make_carry(int batch) const {
  Carry c;
  c.batch = batch;
  for (int l = 0; l < config_.layers; ++l) c.lru_state.push_back(Tensor::zeros({batch, 2 * config_.hidden}));
  return c;
}

Tensor Lru::forward(Tape* tape, const Tensor& flat, int batch, int timesteps, Carry* carry) {
  return forward_mode(tape, flat, batch, timesteps, carry, LruMode::kSequential);
}

Tensor Lru::forward_mode(Tape* tape, const Tensor& flat, int batch, int timesteps, Carry* carry, LruMode mode) {
  if (flat.dim(0) != static_cast<int64_t>(batch) * timesteps || flat.dim(1) != input_size_) {
    throw std::invalid_argument("lru forward: input shape " + shape_str(flat.shape()) + " does not match batch " +
                                std::to_string(batch) + " x timesteps " + std::to_string(timesteps));
  }
  Carry local = (carry && !carry->lru_state.empty()) ? *carry : make_carry(batch);
  if (static_cast<int>(local.lru_state.size()) != config_.layers || local.batch != batch ||
      local.lru_state[0].dim(1) != 2 * config_.hidden) {
    throw std::invalid_argument("lru forward: carry does not match config");
  }

  // Work time-major so per-step rows are contiguous.
  Tensor x = (batch == 1) ? flat : ops::gather_rows(tape, flat, lru_time_major(batch, timesteps));
  x = enc_.apply(tape, x);

  for (size_t l = 0; l < blocks_.size(); ++l) {
    const Block& blk = blocks_[l];
    Tensor z = ops::layer_norm(tape, x, blk.ln_g, blk.ln_b);

    // lambda and gamma as interleaved complex pairs [2h].
    Tensor radius = ops::exp(tape, ops::neg(tape, ops::exp(tape, blk.nu)));
    Tensor lam = ops::interleave_pairs(tape, ops::hadamard(tape, radius, ops::cos(tape, blk.theta)),
                                       ops::hadamard(tape, radius, ops::sin(tape, blk.theta)));
    Tensor gam = ops::exp(tape, blk.gamma_log);
    Tensor gam_pairs = ops::interleave_pairs(tape, gam, gam);

    Tensor bu = ops::hadamard(tape, ops::matmul(tape, z, blk.b_mat), gam_pairs);

    std::vector<Tensor> bu_steps;
    bu_steps.reserve(static_cast<size_t>(timesteps));
    for (int t = 0; t < timesteps; ++t)
      bu_steps.push_back(ops::slice_rows(tape, bu, static_cast<int64_t>(t) * batch, batch));
    std::vector<Tensor> states = lru_recurrence(tape, bu_steps, lam, local.lru_state[l], mode);
    local.lru_state[l] = states.back();
    Tensor states_tm = (timesteps == 1) ? states[0] : ops::concat_rows(tape, states);

    Tensor y = ops::sub(tape, ops::matmul(tape, ops::pair_real(tape, states_tm), blk.c_re),
                        ops::matmul(tape, ops::pair_imag(tape, states_tm), blk.c_im));
    y = ops::gelu(tape, ops::add(tape, y, ops::hadamard(tape, z, blk.d)));
    Tensor glu = ops::hadamard(tape, blk.glu_a.apply(tape, y), ops::sigmoid(tape, blk.glu_b.apply(tape, y)));
    x = ops::add(tape, x, glu);
  }

  if (carry) *carry = local;
  Tensor out = ops::layer_norm(tape, x, lnf_g, lnf_b);
  return (batch == 1) ? out : ops::gather_rows(tape, out, lru_batch_major(batch, timesteps));
}

Tensor Lru::step(const Tensor& input, Carry& carry) {
  return forward(nullptr, input, static_cast<int>(input.dim(0)), 1, &carry);
}

double Lru::max_lambda_magnitude() const {
  double mx = 0.0;
  for (const Block& blk : blocks_) {
    const double* nu = blk.nu.data();
    for (int64_t i = 0; i < blk.nu.numel(); ++i) mx = std::max(mx, std::exp(-std::exp(nu[i])));
  }
  return mx;
}

void Lru::collect_params(const std::string& prefix, std::vector<NamedParam>& out) {
  enc_.collect(prefix + ".enc", out);
  for (size_t l = 0; l < blocks_.size(); ++l) {
    const std::string p = prefix + ".l" + std::to_string(l);
    Block& blk = blocks_[l];
    out.push_back({p + ".ln.g", blk.ln_g});
    out.push_back({p + ".ln.b", blk.ln_b});
    out.push_back({p + ".nu", blk.nu});
    out.push_back({p + ".theta", blk.theta});
    out.push_back({p + ".gamma_log", blk.gamma_log});
    out.push_back({p + ".b", blk.b_mat});
    out.push_back({p + ".c_re", blk.c_re});
    out.push_back({p + ".c_im", blk.c_im});
    out.push_back({p + ".d", blk.d});
    blk.glu_a.collect(p + ".glu_a", out);
    blk.glu_b.collect(p + ".glu_b", out);
  }
  out.push_back({prefix + ".lnf.g", lnf_g});
  out.push_back({prefix + ".lnf.b", lnf_b});
}

}  // namespace regpomdp::models
