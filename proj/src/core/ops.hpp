#pragma once

#include <vector>

#include "core/tensor.hpp"

namespace regpomdp::ops {

// Every op takes the recording tape first; pass nullptr for a pure forward
// pass. Output tensors require grad iff a tape is supplied and any input
// requires grad. Shape mismatches throw std::invalid_argument naming both
// shapes.

Tensor matmul(Tape* tape, const Tensor& a, const Tensor& b);     // [m,k]x[k,n]
Tensor matmul_nt(Tape* tape, const Tensor& a, const Tensor& b);  // [m,k]x[n,k]^T

// Elementwise; `b` may also be a row vector broadcast over a's rows.
Tensor add(Tape* tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape* tape, const Tensor& a, const Tensor& b);
Tensor hadamard(Tape* tape, const Tensor& a, const Tensor& b);

Tensor scale(Tape* tape, const Tensor& a, double c);
Tensor add_scalar(Tape* tape, const Tensor& a, double c);
Tensor neg(Tape* tape, const Tensor& a);

Tensor tanh(Tape* tape, const Tensor& a);
Tensor sigmoid(Tape* tape, const Tensor& a);
Tensor relu(Tape* tape, const Tensor& a);
Tensor gelu(Tape* tape, const Tensor& a);
Tensor exp(Tape* tape, const Tensor& a);
Tensor log(Tape* tape, const Tensor& a);
Tensor sqrt(Tape* tape, const Tensor& a);
Tensor sin(Tape* tape, const Tensor& a);
Tensor cos(Tape* tape, const Tensor& a);

Tensor softmax_rows(Tape* tape, const Tensor& a);  // 2-D, softmax per row
Tensor layer_norm(Tape* tape, const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-5);

Tensor concat_cols(Tape* tape, const Tensor& a, const Tensor& b);
Tensor concat_rows(Tape* tape, const std::vector<Tensor>& parts);
Tensor slice_cols(Tape* tape, const Tensor& a, int64_t begin, int64_t len);
Tensor slice_rows(Tape* tape, const Tensor& a, int64_t begin, int64_t len);
Tensor gather_rows(Tape* tape, const Tensor& a, const std::vector<int64_t>& row_idx);
Tensor take_per_row(Tape* tape, const Tensor& a, const std::vector<int64_t>& col_idx);  // [m,n] -> [m,1]
Tensor embedding_lookup(Tape* tape, const Tensor& table, const std::vector<int64_t>& ids);
Tensor transpose(Tape* tape, const Tensor& a);

// Last-dim pairs (re, im) treated as complex numbers. `b` may be a [2h] row
// vector broadcast over a's rows.
Tensor complex_pair_mul(Tape* tape, const Tensor& a, const Tensor& b);
Tensor interleave_pairs(Tape* tape, const Tensor& re, const Tensor& im);
Tensor pair_real(Tape* tape, const Tensor& a);
Tensor pair_imag(Tape* tape, const Tensor& a);

Tensor sum_all(Tape* tape, const Tensor& a);
Tensor mean_all(Tape* tape, const Tensor& a);

// Utilities outside the autodiff graph.
std::vector<int64_t> argmax_rows(const Tensor& a);  // 2-D

}  // namespace regpomdp::ops
