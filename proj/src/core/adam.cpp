#include "core/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace regpomdp {

Adam::Adam(std::vector<Tensor> params, AdamConfig config)
    : Adam(std::move(params), config, std::vector<double>()) {}

Adam::Adam(std::vector<Tensor> params, AdamConfig config, std::vector<double> lr_scales)
    : params_(std::move(params)), lr_scales_(std::move(lr_scales)), config_(config) {
  if (!lr_scales_.empty() && lr_scales_.size() != params_.size()) {
    throw std::invalid_argument("adam: lr_scales must match the parameter count");
  }
  if (lr_scales_.empty()) lr_scales_.assign(params_.size(), 1.0);
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Tensor& p : params_) {
    m_.emplace_back(static_cast<size_t>(p.numel()), 0.0);
    v_.emplace_back(static_cast<size_t>(p.numel()), 0.0);
  }
}

void Adam::step() {
  ++step_count_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_count_));
  for (size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = params_[i];
    const double* g = p.grad();
    double* m = m_[i].data();
    double* v = v_[i].data();
    double* x = p.data();
    const double lr = config_.lr * lr_scales_[i];
    const int64_t n = p.numel();
    for (int64_t j = 0; j < n; ++j) {
      if (!std::isfinite(g[j])) throw std::runtime_error("adam_step: non-finite gradient encountered");
      m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * g[j];
      v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      x[j] -= lr * mhat / (std::sqrt(vhat) + config_.eps);
    }
  }
}

void Adam::zero_grad() {
  for (Tensor& p : params_) p.zero_grad();
}

}  // namespace regpomdp
