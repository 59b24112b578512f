#include "core/ops.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace regpomdp::ops {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Map = Eigen::Map<EMat>;
using CMap = Eigen::Map<const EMat>;

bool track(Tape* tape, const Tensor& a) { return tape != nullptr && a.requires_grad(); }
bool track(Tape* tape, const Tensor& a, const Tensor& b) {
  return tape != nullptr && (a.requires_grad() || b.requires_grad());
}

Tensor make_out(Shape shape, bool requires_grad) {
  Tensor t = Tensor::zeros(std::move(shape));
  t.set_requires_grad(requires_grad);
  return t;
}

void require_2d(const char* op, const Tensor& t) {
  if (t.ndim() != 2) {
    throw std::invalid_argument(std::string(op) + ": expected 2-D tensor, got shape " + shape_str(t.shape()));
  }
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " + shape_str(a.shape()) + " and " +
                              shape_str(b.shape()));
}

enum class Broadcast { kNone, kRow };

// Equal shapes, or b a row vector matching a's last dim.
Broadcast binary_mode(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) return Broadcast::kNone;
  if (a.ndim() == 2 && b.ndim() == 1 && a.dim(1) == b.dim(0)) return Broadcast::kRow;
  shape_error(op, a, b);
}

template <typename Fwd>
Tensor binary_elementwise(const char* op, Tape* tape, const Tensor& a, const Tensor& b, Fwd fwd,
                          double dda, double ddb) {
  Broadcast mode = binary_mode(op, a, b);
  Tensor out = make_out(a.shape(), track(tape, a, b));
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  const int64_t n = a.numel();
  const int64_t bn = b.numel();
  if (mode == Broadcast::kNone) {
    for (int64_t i = 0; i < n; ++i) po[i] = fwd(pa[i], pb[i]);
  } else {
    for (int64_t i = 0; i < n; ++i) po[i] = fwd(pa[i], pb[i % bn]);
  }
  if (out.requires_grad()) {
    Tensor ac = a, bc = b, oc = out;
    tape->record([ac, bc, oc, mode, dda, ddb]() mutable {
      const double* g = oc.grad();
      const int64_t n = ac.numel();
      const int64_t bn = bc.numel();
      if (ac.requires_grad()) {
        double* ga = ac.grad();
        for (int64_t i = 0; i < n; ++i) ga[i] += dda * g[i];
      }
      if (bc.requires_grad()) {
        double* gb = bc.grad();
        if (mode == Broadcast::kNone) {
          for (int64_t i = 0; i < n; ++i) gb[i] += ddb * g[i];
        } else {
          for (int64_t i = 0; i < n; ++i) gb[i % bn] += ddb * g[i];
        }
      }
    });
  }
  return out;
}

template <typename Fwd, typename Dfn>
Tensor unary_elementwise(Tape* tape, const Tensor& a, Fwd fwd, Dfn dfn) {
  Tensor out = make_out(a.shape(), track(tape, a));
  const double* pa = a.data();
  double* po = out.data();
  const int64_t n = a.numel();
  for (int64_t i = 0; i < n; ++i) po[i] = fwd(pa[i]);
  if (out.requires_grad()) {
    Tensor ac = a, oc = out;
    tape->record([ac, oc, dfn]() mutable {
      const double* g = oc.grad();
      const double* x = ac.data();
      const double* y = oc.data();
      double* ga = ac.grad();
      const int64_t n = ac.numel();
      for (int64_t i = 0; i < n; ++i) ga[i] += dfn(x[i], y[i]) * g[i];
    });
  }
  return out;
}

}  // namespace

Tensor matmul(Tape* tape, const Tensor& a, const Tensor& b) {
  require_2d("matmul", a);
  require_2d("matmul", b);
  if (a.dim(1) != b.dim(0)) shape_error("matmul", a, b);
  const int64_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Tensor out = make_out({m, n}, track(tape, a, b));
  Map(out.data(), m, n).noalias() = CMap(a.data(), m, k) * CMap(b.data(), k, n);
  if (out.requires_grad()) {
    Tensor ac = a, bc = b, oc = out;
    tape->record([ac, bc, oc, m, k, n]() mutable {
      CMap g(oc.grad(), m, n);
      if (ac.requires_grad()) Map(ac.grad(), m, k).noalias() += g * CMap(bc.data(), k, n).transpose();
      if (bc.requires_grad()) Map(bc.grad(), k, n).noalias() += CMap(ac.data(), m, k).transpose() * g;
    });
  }
  return out;
}

Tensor matmul_nt(Tape* tape, const Tensor& a, const Tensor& b) {
  require_2d("matmul_nt", a);
  require_2d("matmul_nt", b);
  if (a.dim(1) != b.dim(1)) shape_error("matmul_nt", a, b);
  const int64_t m = a.dim(0), k = a.dim(1), n = b.dim(0);
  Tensor out = make_out({m, n}, track(tape, a, b));
  Map(out.data(), m, n).noalias() = CMap(a.data(), m, k) * CMap(b.data(), n, k).transpose();
  if (out.requires_grad()) {
    Tensor ac = a, bc = b, oc = out;
    tape->record([ac, bc, oc, m, k, n]() mutable {
      CMap g(oc.grad(), m, n);
      if (ac.requires_grad()) Map(ac.grad(), m, k).noalias() += g * CMap(bc.data(), n, k);
      if (bc.requires_grad()) Map(bc.grad(), n, k).noalias() += g.transpose() * CMap(ac.data(), m, k);
    });
  }
  return out;
}

Tensor add(Tape* tape, const Tensor& a, const Tensor& b) {
  return binary_elementwise("add", tape, a, b, [](double x, double y) { return x + y; }, 1.0, 1.0);
}

Tensor sub(Tape* tape, const Tensor& a, const Tensor& b) {
  return binary_elementwise("sub", tape, a, b, [](double x, double y) { return x - y; }, 1.0, -1.0);
}

Tensor hadamard(Tape* tape, const Tensor& a, const Tensor& b) {
  Broadcast mode = binary_mode("hadamard", a, b);
  Tensor out = make_out(a.shape(), track(tape, a, b));
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  const int64_t n = a.numel(), bn = b.numel();
  if (mode == Broadcast::kNone) {
    for (int64_t i = 0; i < n; ++i) po[i] = pa[i] * pb[i];
  } else {
    for (int64_t i = 0; i < n; ++i) po[i] = pa[i] * pb[i % bn];
  }
  if (out.requires_grad()) {
    Tensor ac = a, bc = b, oc = out;
    tape->record([ac, bc, oc, mode]() mutable {
      const double* g = oc.grad();
      const int64_t n = ac.numel(), bn = bc.numel();
      const double* pa = ac.data();
      const double* pb = bc.data();
      if (ac.requires_grad()) {
        double* ga = ac.grad();
        if (mode == Broadcast::kNone) {
          for (int64_t i = 0; i < n; ++i) ga[i] += pb[i] * g[i];
        } else {
          for (int64_t i = 0; i < n; ++i) ga[i] += pb[i % bn] * g[i];
        }
      }
      if (bc.requires_grad()) {
        double* gb = bc.grad();
        if (mode == Broadcast::kNone) {
          for (int64_t i = 0; i < n; ++i) gb[i] += pa[i] * g[i];
        } else {
          for (int64_t i = 0; i < n; ++i) gb[i % bn] += pa[i] * g[i];
        }
      }
    });
  }
  return out;
}

Tensor scale(Tape* tape, const Tensor& a, double c) {
  return unary_elementwise(tape, a, [c](double x) { return c * x; }, [c](double, double) { return c; });
}

Tensor add_scalar(Tape* tape, const Tensor& a, double c) {
  return unary_elementwise(tape, a, [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

Tensor neg(Tape* tape, const Tensor& a) { return scale(tape, a, -1.0); }

Tensor tanh(Tape* tape, const Tensor& a) {
  return unary_elementwise(tape, a, [](double x) { return std::tanh(x); },
                           [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(Tape* tape, const Tensor& a) {
  return unary_elementwise(tape, a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
                           [](double, double y) { return y * (1.0 - y); });
}

Tensor relu(Tape* tape, const Tensor& a) {
  return unary_elementwise(tape, a, [](double x) { return x > 0.0 ? x : 0.0; },
                           [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor gelu(Tape* tape, const Tensor& a) {
  constexpr double kInvSqrt2 = 0.7071067811865476;
  constexpr double kInvSqrt2Pi = 0.3989422804014327;
  return unary_elementwise(tape, a,
                           [](double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); },
                           [](double x, double) {
                             const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
                             return cdf + x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
                           });
}

Tensor exp(Tape* tape, const Tensor& a) {
  return unary_elementwise(tape, a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(Tape* tape, const Tensor& a) {
  return unary_elementwise(tape, a, [](double x) { return std::log(x); },
                           [](double x, double) { return 1.0 / x; });
}

Tensor sqrt(Tape* tape, const Tensor& a) {
  return unary_elementwise(tape, a, [](double x) { return std::sqrt(x); },
                           [](double, double y) { return 0.5 / y; });
}

Tensor sin(Tape* tape, const Tensor& a) {
  return unary_elementwise(tape, a, [](double x) { return std::sin(x); },
                           [](double x, double) { return std::cos(x); });
}

Tensor cos(Tape* tape, const Tensor& a) {
  return unary_elementwise(tape, a, [](double x) { return std::cos(x); },
                           [](double x, double) { return -std::sin(x); });
}

Tensor softmax_rows(Tape* tape, const Tensor& a) {
  require_2d("softmax_rows", a);
  const int64_t rows = a.dim(0), cols = a.dim(1);
  Tensor out = make_out(a.shape(), track(tape, a));
  const double* pa = a.data();
  double* po = out.data();
  for (int64_t r = 0; r < rows; ++r) {
    const double* x = pa + r * cols;
    double* y = po + r * cols;
    double mx = x[0];
    for (int64_t c = 1; c < cols; ++c) mx = std::max(mx, x[c]);
    double sum = 0.0;
    for (int64_t c = 0; c < cols; ++c) {
      y[c] = std::exp(x[c] - mx);
      sum += y[c];
    }
    const double inv = 1.0 / sum;
    for (int64_t c = 0; c < cols; ++c) y[c] *= inv;
  }
  if (out.requires_grad()) {
    Tensor ac = a, oc = out;
    tape->record([ac, oc, rows, cols]() mutable {
      const double* g = oc.grad();
      const double* y = oc.data();
      double* ga = ac.grad();
      for (int64_t r = 0; r < rows; ++r) {
        const double* gr = g + r * cols;
        const double* yr = y + r * cols;
        double dot = 0.0;
        for (int64_t c = 0; c < cols; ++c) dot += gr[c] * yr[c];
        double* gar = ga + r * cols;
        for (int64_t c = 0; c < cols; ++c) gar[c] += yr[c] * (gr[c] - dot);
      }
    });
  }
  return out;
}

Tensor layer_norm(Tape* tape, const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  require_2d("layer_norm", x);
  const int64_t rows = x.dim(0), cols = x.dim(1);
  if (gain.ndim() != 1 || gain.dim(0) != cols) shape_error("layer_norm", x, gain);
  if (bias.ndim() != 1 || bias.dim(0) != cols) shape_error("layer_norm", x, bias);
  Tensor out = make_out(x.shape(), tape != nullptr && (x.requires_grad() || gain.requires_grad() || bias.requires_grad()));
  std::vector<double> inv_std(static_cast<size_t>(rows));
  std::vector<double> mean(static_cast<size_t>(rows));
  const double* px = x.data();
  const double* pg = gain.data();
  const double* pb = bias.data();
  double* po = out.data();
  for (int64_t r = 0; r < rows; ++r) {
    const double* xr = px + r * cols;
    double mu = 0.0;
    for (int64_t c = 0; c < cols; ++c) mu += xr[c];
    mu /= static_cast<double>(cols);
    double var = 0.0;
    for (int64_t c = 0; c < cols; ++c) {
      const double d = xr[c] - mu;
      var += d * d;
    }
    var /= static_cast<double>(cols);
    const double istd = 1.0 / std::sqrt(var + eps);
    mean[static_cast<size_t>(r)] = mu;
    inv_std[static_cast<size_t>(r)] = istd;
    double* yr = po + r * cols;
    for (int64_t c = 0; c < cols; ++c) yr[c] = (xr[c] - mu) * istd * pg[c] + pb[c];
  }
  if (out.requires_grad()) {
    Tensor xc = x, gc = gain, bc = bias, oc = out;
    tape->record([xc, gc, bc, oc, rows, cols, mean, inv_std]() mutable {
      const double* g = oc.grad();
      const double* px = xc.data();
      const double* pg = gc.data();
      double* gx = xc.requires_grad() ? xc.grad() : nullptr;
      double* gg = gc.requires_grad() ? gc.grad() : nullptr;
      double* gb = bc.requires_grad() ? bc.grad() : nullptr;
      for (int64_t r = 0; r < rows; ++r) {
        const double* xr = px + r * cols;
        const double* gr = g + r * cols;
        const double mu = mean[static_cast<size_t>(r)];
        const double istd = inv_std[static_cast<size_t>(r)];
        if (gg || gb) {
          for (int64_t c = 0; c < cols; ++c) {
            const double xhat = (xr[c] - mu) * istd;
            if (gg) gg[c] += gr[c] * xhat;
            if (gb) gb[c] += gr[c];
          }
        }
        if (gx) {
          // dL/dx via the usual per-row reduction of dL/dxhat.
          double sum_gh = 0.0, sum_gh_xhat = 0.0;
          for (int64_t c = 0; c < cols; ++c) {
            const double gh = gr[c] * pg[c];
            const double xhat = (xr[c] - mu) * istd;
            sum_gh += gh;
            sum_gh_xhat += gh * xhat;
          }
          const double n = static_cast<double>(cols);
          double* gxr = gx + r * cols;
          for (int64_t c = 0; c < cols; ++c) {
            const double gh = gr[c] * pg[c];
            const double xhat = (xr[c] - mu) * istd;
            gxr[c] += istd * (gh - sum_gh / n - xhat * sum_gh_xhat / n);
          }
        }
      }
    });
  }
  return out;
}

Tensor concat_cols(Tape* tape, const Tensor& a, const Tensor& b) {
  require_2d("concat_cols", a);
  require_2d("concat_cols", b);
  if (a.dim(0) != b.dim(0)) shape_error("concat_cols", a, b);
  const int64_t rows = a.dim(0), ca = a.dim(1), cb = b.dim(1);
  Tensor out = make_out({rows, ca + cb}, track(tape, a, b));
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  for (int64_t r = 0; r < rows; ++r) {
    std::copy(pa + r * ca, pa + (r + 1) * ca, po + r * (ca + cb));
    std::copy(pb + r * cb, pb + (r + 1) * cb, po + r * (ca + cb) + ca);
  }
  if (out.requires_grad()) {
    Tensor ac = a, bc = b, oc = out;
    tape->record([ac, bc, oc, rows, ca, cb]() mutable {
      const double* g = oc.grad();
      if (ac.requires_grad()) {
        double* ga = ac.grad();
        for (int64_t r = 0; r < rows; ++r)
          for (int64_t c = 0; c < ca; ++c) ga[r * ca + c] += g[r * (ca + cb) + c];
      }
      if (bc.requires_grad()) {
        double* gb = bc.grad();
        for (int64_t r = 0; r < rows; ++r)
          for (int64_t c = 0; c < cb; ++c) gb[r * cb + c] += g[r * (ca + cb) + ca + c];
      }
    });
  }
  return out;
}

Tensor concat_rows(Tape* tape, const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: empty part list");
  require_2d("concat_rows", parts[0]);
  const int64_t cols = parts[0].dim(1);
  int64_t rows = 0;
  bool rg = false;
  for (const Tensor& p : parts) {
    require_2d("concat_rows", p);
    if (p.dim(1) != cols) shape_error("concat_rows", parts[0], p);
    rows += p.dim(0);
    rg = rg || p.requires_grad();
  }
  Tensor out = make_out({rows, cols}, tape != nullptr && rg);
  double* po = out.data();
  int64_t at = 0;
  for (const Tensor& p : parts) {
    std::copy(p.data(), p.data() + p.numel(), po + at);
    at += p.numel();
  }
  if (out.requires_grad()) {
    std::vector<Tensor> pc = parts;
    Tensor oc = out;
    tape->record([pc, oc]() mutable {
      const double* g = oc.grad();
      int64_t at = 0;
      for (Tensor& p : pc) {
        if (p.requires_grad()) {
          double* gp = p.grad();
          const int64_t n = p.numel();
          for (int64_t i = 0; i < n; ++i) gp[i] += g[at + i];
        }
        at += p.numel();
      }
    });
  }
  return out;
}

Tensor slice_cols(Tape* tape, const Tensor& a, int64_t begin, int64_t len) {
  require_2d("slice_cols", a);
  if (begin < 0 || len <= 0 || begin + len > a.dim(1)) {
    throw std::invalid_argument("slice_cols: range [" + std::to_string(begin) + ", " + std::to_string(begin + len) +
                                ") out of bounds for shape " + shape_str(a.shape()));
  }
  const int64_t rows = a.dim(0), cols = a.dim(1);
  Tensor out = make_out({rows, len}, track(tape, a));
  const double* pa = a.data();
  double* po = out.data();
  for (int64_t r = 0; r < rows; ++r) std::copy(pa + r * cols + begin, pa + r * cols + begin + len, po + r * len);
  if (out.requires_grad()) {
    Tensor ac = a, oc = out;
    tape->record([ac, oc, begin, len, rows, cols]() mutable {
      const double* g = oc.grad();
      double* ga = ac.grad();
      for (int64_t r = 0; r < rows; ++r)
        for (int64_t c = 0; c < len; ++c) ga[r * cols + begin + c] += g[r * len + c];
    });
  }
  return out;
}

Tensor slice_rows(Tape* tape, const Tensor& a, int64_t begin, int64_t len) {
  require_2d("slice_rows", a);
  if (begin < 0 || len <= 0 || begin + len > a.dim(0)) {
    throw std::invalid_argument("slice_rows: range [" + std::to_string(begin) + ", " + std::to_string(begin + len) +
                                ") out of bounds for shape " + shape_str(a.shape()));
  }
  const int64_t cols = a.dim(1);
  Tensor out = make_out({len, cols}, track(tape, a));
  std::copy(a.data() + begin * cols, a.data() + (begin + len) * cols, out.data());
  if (out.requires_grad()) {
    Tensor ac = a, oc = out;
    tape->record([ac, oc, begin, len, cols]() mutable {
      const double* g = oc.grad();
      double* ga = ac.grad();
      const int64_t n = len * cols;
      for (int64_t i = 0; i < n; ++i) ga[begin * cols + i] += g[i];
    });
  }
  return out;
}

Tensor gather_rows(Tape* tape, const Tensor& a, const std::vector<int64_t>& row_idx) {
  require_2d("gather_rows", a);
  const int64_t rows = a.dim(0), cols = a.dim(1);
  for (int64_t r : row_idx) {
    if (r < 0 || r >= rows) {
      throw std::invalid_argument("gather_rows: index " + std::to_string(r) + " out of bounds for shape " +
                                  shape_str(a.shape()));
    }
  }
  Tensor out = make_out({static_cast<int64_t>(row_idx.size()), cols}, track(tape, a));
  const double* pa = a.data();
  double* po = out.data();
  for (size_t i = 0; i < row_idx.size(); ++i)
    std::copy(pa + row_idx[i] * cols, pa + (row_idx[i] + 1) * cols, po + static_cast<int64_t>(i) * cols);
  if (out.requires_grad()) {
    Tensor ac = a, oc = out;
    std::vector<int64_t> idx = row_idx;
    tape->record([ac, oc, idx, cols]() mutable {
      const double* g = oc.grad();
      double* ga = ac.grad();
      for (size_t i = 0; i < idx.size(); ++i)
        for (int64_t c = 0; c < cols; ++c) ga[idx[i] * cols + c] += g[static_cast<int64_t>(i) * cols + c];
    });
  }
  return out;
}

Tensor take_per_row(Tape* tape, const Tensor& a, const std::vector<int64_t>& col_idx) {
  require_2d("take_per_row", a);
  const int64_t rows = a.dim(0), cols = a.dim(1);
  if (static_cast<int64_t>(col_idx.size()) != rows) {
    throw std::invalid_argument("take_per_row: need one column index per row, got " +
                                std::to_string(col_idx.size()) + " for shape " + shape_str(a.shape()));
  }
  for (int64_t c : col_idx) {
    if (c < 0 || c >= cols) {
      throw std::invalid_argument("take_per_row: column " + std::to_string(c) + " out of bounds for shape " +
                                  shape_str(a.shape()));
    }
  }
  Tensor out = make_out({rows, 1}, track(tape, a));
  for (int64_t r = 0; r < rows; ++r) out.data()[r] = a.data()[r * cols + col_idx[static_cast<size_t>(r)]];
  if (out.requires_grad()) {
    Tensor ac = a, oc = out;
    std::vector<int64_t> idx = col_idx;
    tape->record([ac, oc, idx, cols]() mutable {
      const double* g = oc.grad();
      double* ga = ac.grad();
      for (size_t r = 0; r < idx.size(); ++r) ga[static_cast<int64_t>(r) * cols + idx[r]] += g[r];
    });
  }
  return out;
}

Tensor embedding_lookup(Tape* tape, const Tensor& table, const std::vector<int64_t>& ids) {
  return gather_rows(tape, table, ids);
}

Tensor transpose(Tape* tape, const Tensor& a) {
  require_2d("transpose", a);
  const int64_t m = a.dim(0), n = a.dim(1);
  Tensor out = make_out({n, m}, track(tape, a));
  Map(out.data(), n, m) = CMap(a.data(), m, n).transpose();
  if (out.requires_grad()) {
    Tensor ac = a, oc = out;
    tape->record([ac, oc, m, n]() mutable { Map(ac.grad(), m, n) += CMap(oc.grad(), n, m).transpose(); });
  }
  return out;
}

Tensor complex_pair_mul(Tape* tape, const Tensor& a, const Tensor& b) {
  Broadcast mode = binary_mode("complex_pair_mul", a, b);
  if (a.shape().back() % 2 != 0) {
    throw std::invalid_argument("complex_pair_mul: last dim must be even, got shape " + shape_str(a.shape()));
  }
  Tensor out = make_out(a.shape(), track(tape, a, b));
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  const int64_t n = a.numel(), bn = b.numel();
  for (int64_t i = 0; i < n; i += 2) {
    const int64_t j = (mode == Broadcast::kNone) ? i : i % bn;
    const double ar = pa[i], ai = pa[i + 1];
    const double br = pb[j], bi = pb[j + 1];
    po[i] = ar * br - ai * bi;
    po[i + 1] = ar * bi + ai * br;
  }
  if (out.requires_grad()) {
    Tensor ac = a, bc = b, oc = out;
    tape->record([ac, bc, oc, mode]() mutable {
      const double* g = oc.grad();
      const double* pa = ac.data();
      const double* pb = bc.data();
      const int64_t n = ac.numel(), bn = bc.numel();
      double* ga = ac.requires_grad() ? ac.grad() : nullptr;
      double* gb = bc.requires_grad() ? bc.grad() : nullptr;
      for (int64_t i = 0; i < n; i += 2) {
        const int64_t j = (mode == Broadcast::kNone) ? i : i % bn;
        const double gr = g[i], gi = g[i + 1];
        if (ga) {
          ga[i] += gr * pb[j] + gi * pb[j + 1];
          ga[i + 1] += -gr * pb[j + 1] + gi * pb[j];
        }
        if (gb) {
          gb[j] += gr * pa[i] + gi * pa[i + 1];
          gb[j + 1] += -gr * pa[i + 1] + gi * pa[i];
        }
      }
    });
  }
  return out;
}

Tensor interleave_pairs(Tape* tape, const Tensor& re, const Tensor& im) {
  if (re.shape() != im.shape()) shape_error("interleave_pairs", re, im);
  Shape out_shape = re.shape();
  out_shape.back() *= 2;
  Tensor out = make_out(out_shape, track(tape, re, im));
  const int64_t n = re.numel();
  const double* pr = re.data();
  const double* pi = im.data();
  double* po = out.data();
  for (int64_t i = 0; i < n; ++i) {
    po[2 * i] = pr[i];
    po[2 * i + 1] = pi[i];
  }
  if (out.requires_grad()) {
    Tensor rc = re, ic = im, oc = out;
    tape->record([rc, ic, oc]() mutable {
      const double* g = oc.grad();
      const int64_t n = rc.numel();
      if (rc.requires_grad()) {
        double* gr = rc.grad();
        for (int64_t i = 0; i < n; ++i) gr[i] += g[2 * i];
      }
      if (ic.requires_grad()) {
        double* gi = ic.grad();
        for (int64_t i = 0; i < n; ++i) gi[i] += g[2 * i + 1];
      }
    });
  }
  return out;
}

namespace {
Tensor pair_part(Tape* tape, const Tensor& a, int offset) {
  if (a.shape().back() % 2 != 0) {
    throw std::invalid_argument("pair_part: last dim must be even, got shape " + shape_str(a.shape()));
  }
  Shape out_shape = a.shape();
  out_shape.back() /= 2;
  Tensor out = make_out(out_shape, track(tape, a));
  const int64_t n = out.numel();
  const double* pa = a.data();
  double* po = out.data();
  for (int64_t i = 0; i < n; ++i) po[i] = pa[2 * i + offset];
  if (out.requires_grad()) {
    Tensor ac = a, oc = out;
    tape->record([ac, oc, offset]() mutable {
      const double* g = oc.grad();
      double* ga = ac.grad();
      const int64_t n = oc.numel();
      for (int64_t i = 0; i < n; ++i) ga[2 * i + offset] += g[i];
    });
  }
  return out;
}
}  // namespace

Tensor pair_real(Tape* tape, const Tensor& a) { return pair_part(tape, a, 0); }
Tensor pair_imag(Tape* tape, const Tensor& a) { return pair_part(tape, a, 1); }

Tensor sum_all(Tape* tape, const Tensor& a) {
  Tensor out = make_out({1}, track(tape, a));
  double s = 0.0;
  const double* pa = a.data();
  const int64_t n = a.numel();
  for (int64_t i = 0; i < n; ++i) s += pa[i];
  out.data()[0] = s;
  if (out.requires_grad()) {
    Tensor ac = a, oc = out;
    tape->record([ac, oc]() mutable {
      const double g = oc.grad()[0];
      double* ga = ac.grad();
      const int64_t n = ac.numel();
      for (int64_t i = 0; i < n; ++i) ga[i] += g;
    });
  }
  return out;
}

Tensor mean_all(Tape* tape, const Tensor& a) { return scale(tape, sum_all(tape, a), 1.0 / static_cast<double>(a.numel())); }

std::vector<int64_t> argmax_rows(const Tensor& a) {
  require_2d("argmax_rows", a);
  const int64_t rows = a.dim(0), cols = a.dim(1);
  std::vector<int64_t> out(static_cast<size_t>(rows));
  const double* pa = a.data();
  for (int64_t r = 0; r < rows; ++r) {
    int64_t best = 0;
    for (int64_t c = 1; c < cols; ++c)
      if (pa[r * cols + c] > pa[r * cols + best]) best = c;
    out[static_cast<size_t>(r)] = best;
  }
  return out;
}

}  // namespace regpomdp::ops
