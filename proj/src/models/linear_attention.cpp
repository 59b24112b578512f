#include "models/linear_attention.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace regpomdp::models {

namespace {

double elu_plus_one(double x) { return x > 0.0 ? x + 1.0 : std::exp(x); }

std::vector<double> project(const Tensor& u, const Tensor& w) {
  const int64_t T = u.dim(0), in = u.dim(1), out = w.dim(1);
  std::vector<double> r(static_cast<size_t>(T * out), 0.0);
  for (int64_t t = 0; t < T; ++t)
    for (int64_t k = 0; k < in; ++k) {
      const double x = u.data()[t * in + k];
      for (int64_t c = 0; c < out; ++c) r[static_cast<size_t>(t * out + c)] += x * w.data()[k * out + c];
    }
  return r;
}

}  // namespace

LinearAttentionCheck linear_attention_dual_check(const Tensor& inputs, const Tensor& wq, const Tensor& wk,
                                                 const Tensor& wv) {
  if (inputs.ndim() != 2 || wq.ndim() != 2) throw std::invalid_argument("linear_attention_dual_check: 2-D inputs required");
  const int64_t T = inputs.dim(0);
  const int64_t h = wv.dim(1);
  const int64_t dk = wq.dim(1);

  std::vector<double> q = project(inputs, wq);
  std::vector<double> k = project(inputs, wk);
  std::vector<double> v = project(inputs, wv);
  for (double& x : q) x = elu_plus_one(x);
  for (double& x : k) x = elu_plus_one(x);

  LinearAttentionCheck result;
  result.parallel = Tensor::zeros({T, h});
  result.recurrent = Tensor::zeros({T, h});

  // Parallel route: full T x T kernel matrix with a causal cut.
  for (int64_t i = 0; i < T; ++i) {
    double denom = 0.0;
    std::vector<double> acc(static_cast<size_t>(h), 0.0);
    for (int64_t j = 0; j <= i; ++j) {
      double w = 0.0;
      for (int64_t c = 0; c < dk; ++c) w += q[static_cast<size_t>(i * dk + c)] * k[static_cast<size_t>(j * dk + c)];
      denom += w;
      for (int64_t c = 0; c < h; ++c) acc[static_cast<size_t>(c)] += w * v[static_cast<size_t>(j * h + c)];
    }
    for (int64_t c = 0; c < h; ++c) result.parallel.data()[i * h + c] = acc[static_cast<size_t>(c)] / denom;
  }

  // Recurrent route: running sums s [dk x h] and z [dk].
  std::vector<double> s(static_cast<size_t>(dk * h), 0.0);
  std::vector<double> z(static_cast<size_t>(dk), 0.0);
  for (int64_t i = 0; i < T; ++i) {
    for (int64_t c = 0; c < dk; ++c) {
      const double kc = k[static_cast<size_t>(i * dk + c)];
      z[static_cast<size_t>(c)] += kc;
      for (int64_t d = 0; d < h; ++d) s[static_cast<size_t>(c * h + d)] += kc * v[static_cast<size_t>(i * h + d)];
    }
    double denom = 0.0;
    for (int64_t c = 0; c < dk; ++c) denom += z[static_cast<size_t>(c)] * q[static_cast<size_t>(i * dk + c)];
    for (int64_t d = 0; d < h; ++d) {
      double num = 0.0;
      for (int64_t c = 0; c < dk; ++c) num += s[static_cast<size_t>(c * h + d)] * q[static_cast<size_t>(i * dk + c)];
      result.recurrent.data()[i * h + d] = num / denom;
    }
  }

  double mx = 0.0;
  for (int64_t i = 0; i < T * h; ++i) mx = std::max(mx, std::abs(result.parallel.data()[i] - result.recurrent.data()[i]));
  result.max_abs_diff = mx;
  return result;
}

LinearAttentionCheck linear_attention_dual_check(Rng& rng, int timesteps, int hidden) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(hidden));
  Tensor u = Tensor::randn({timesteps, hidden}, rng);
  Tensor wq = Tensor::randn({hidden, hidden}, rng, scale);
  Tensor wk = Tensor::randn({hidden, hidden}, rng, scale);
  Tensor wv = Tensor::randn({hidden, hidden}, rng, scale);
  return linear_attention_dual_check(u, wq, wk, wv);
}

}  // namespace regpomdp::models
