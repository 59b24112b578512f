#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace regpomdp {

using Shape = std::vector<int64_t>;

std::string shape_str(const Shape& shape);
int64_t shape_numel(const Shape& shape);

// Dense 64-bit tensor with shared storage and an optional gradient buffer.
// Cheap to copy; copies alias the same storage.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double value);
  static Tensor from_data(Shape shape, std::vector<double> data);
  static Tensor scalar(double value);
  static Tensor randn(Shape shape, Rng& rng, double stddev = 1.0);
  static Tensor rand_uniform(Shape shape, Rng& rng, double lo, double hi);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const;
  int ndim() const;
  int64_t dim(int i) const;
  int64_t numel() const;

  double* data();
  const double* data() const;
  double item() const;  // requires numel() == 1

  Tensor& set_requires_grad(bool value);
  bool requires_grad() const;

  double* grad();              // allocates zero-filled on first touch
  const double* grad() const;  // nullptr when never touched
  bool has_grad() const;
  void zero_grad();

  Tensor detached_copy() const;
  void copy_data_from(const Tensor& other);  // shapes must match

  bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }

 private:
  struct Impl {
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad;
    bool requires_grad = false;
  };
  explicit Tensor(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  Impl& impl();
  const Impl& impl() const;
  std::shared_ptr<Impl> impl_;
};

// Wengert list. Ops append backward closures in forward order; backward()
// replays them in reverse, so each node is visited exactly once.
class Tape {
 public:
  void record(std::function<void()> backward_fn) { nodes_.push_back(std::move(backward_fn)); }

  // Seeds d(loss)/d(loss) = 1 and propagates. loss must be scalar.
  void backward(Tensor& loss);

  size_t node_count() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  std::vector<std::function<void()>> nodes_;
};

}  // namespace regpomdp
