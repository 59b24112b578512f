#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "core/ops.hpp"
#include "core/tensor.hpp"

namespace regpomdp::testutil {

using OpFn = std::function<Tensor(Tape*, std::vector<Tensor>&)>;

// Central-difference gradient oracle: builds loss = sum(f(inputs) . R) for a
// fixed random R, backpropagates, and compares every input gradient against
// (L(x + h e_j) - L(x - h e_j)) / 2h. Returns the worst relative error.
inline double gradcheck(const OpFn& f, std::vector<Tensor> inputs, Rng& rng, double h = 1e-5) {
  for (Tensor& t : inputs) t.set_requires_grad(true);

  Tape tape;
  Tensor out = f(&tape, inputs);
  Tensor r = Tensor::randn(out.shape(), rng);
  Tensor loss = ops::sum_all(&tape, ops::hadamard(&tape, out, r));
  tape.backward(loss);

  std::vector<std::vector<double>> analytic;
  for (Tensor& t : inputs) analytic.emplace_back(t.grad(), t.grad() + t.numel());

  auto eval = [&]() {
    Tensor o = f(nullptr, inputs);
    double s = 0.0;
    for (int64_t i = 0; i < o.numel(); ++i) s += o.data()[i] * r.data()[i];
    return s;
  };

  double worst = 0.0;
  for (size_t i = 0; i < inputs.size(); ++i) {
    Tensor& t = inputs[i];
    for (int64_t j = 0; j < t.numel(); ++j) {
      const double orig = t.data()[j];
      t.data()[j] = orig + h;
      const double lp = eval();
      t.data()[j] = orig - h;
      const double lm = eval();
      t.data()[j] = orig;
      const double numeric = (lp - lm) / (2.0 * h);
      const double a = analytic[i][static_cast<size_t>(j)];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  double mx = 0.0;
  for (int64_t i = 0; i < a.numel(); ++i) mx = std::max(mx, std::abs(a.data()[i] - b.data()[i]));
  return mx;
}

}  // namespace regpomdp::testutil
