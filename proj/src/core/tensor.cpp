#include "core/tensor.hpp"

#include <sstream>
#include <stdexcept>

namespace regpomdp {

std::string shape_str(const Shape& shape) {
  std::ostringstream out;
  out << "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ", ";
    out << shape[i];
  }
  out << "]";
  return out.str();
}

int64_t shape_numel(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

Tensor Tensor::zeros(Shape shape) {
  auto impl = std::make_shared<Impl>();
  impl->data.assign(static_cast<size_t>(shape_numel(shape)), 0.0);
  impl->shape = std::move(shape);
  return Tensor(std::move(impl));
}

Tensor Tensor::full(Shape shape, double value) {
  Tensor t = zeros(std::move(shape));
  for (int64_t i = 0; i < t.numel(); ++i) t.data()[i] = value;
  return t;
}

Tensor Tensor::from_data(Shape shape, std::vector<double> data) {
  if (shape_numel(shape) != static_cast<int64_t>(data.size())) {
    throw std::invalid_argument("from_data: shape " + shape_str(shape) + " does not match data length " +
                                std::to_string(data.size()));
  }
  auto impl = std::make_shared<Impl>();
  impl->shape = std::move(shape);
  impl->data = std::move(data);
  return Tensor(std::move(impl));
}

Tensor Tensor::scalar(double value) { return from_data({1}, {value}); }

Tensor Tensor::randn(Shape shape, Rng& rng, double stddev) {
  Tensor t = zeros(std::move(shape));
  for (int64_t i = 0; i < t.numel(); ++i) t.data()[i] = stddev * rng.normal();
  return t;
}

Tensor Tensor::rand_uniform(Shape shape, Rng& rng, double lo, double hi) {
  Tensor t = zeros(std::move(shape));
  for (int64_t i = 0; i < t.numel(); ++i) t.data()[i] = rng.uniform(lo, hi);
  return t;
}

Tensor::Impl& Tensor::impl() {
  if (!impl_) throw std::runtime_error("use of undefined tensor");
  return *impl_;
}

const Tensor::Impl& Tensor::impl() const {
  if (!impl_) throw std::runtime_error("use of undefined tensor");
  return *impl_;
}

const Shape& Tensor::shape() const { return impl().shape; }
int Tensor::ndim() const { return static_cast<int>(impl().shape.size()); }

int64_t Tensor::dim(int i) const {
  const Shape& s = impl().shape;
  if (i < 0 || i >= static_cast<int>(s.size())) {
    throw std::invalid_argument("dim index " + std::to_string(i) + " out of range for shape " + shape_str(s));
  }
  return s[i];
}

int64_t Tensor::numel() const { return static_cast<int64_t>(impl().data.size()); }

double* Tensor::data() { return impl().data.data(); }
const double* Tensor::data() const { return impl().data.data(); }

double Tensor::item() const {
  if (numel() != 1) {
    throw std::invalid_argument("item() requires a scalar tensor, got shape " + shape_str(shape()));
  }
  return impl().data[0];
}

Tensor& Tensor::set_requires_grad(bool value) {
  impl().requires_grad = value;
  return *this;
}

bool Tensor::requires_grad() const { return impl_ && impl_->requires_grad; }

double* Tensor::grad() {
  Impl& im = impl();
  if (im.grad.size() != im.data.size()) im.grad.assign(im.data.size(), 0.0);
  return im.grad.data();
}

const double* Tensor::grad() const {
  const Impl& im = impl();
  return im.grad.size() == im.data.size() ? im.grad.data() : nullptr;
}

bool Tensor::has_grad() const { return impl_ && impl_->grad.size() == impl_->data.size(); }

void Tensor::zero_grad() {
  Impl& im = impl();
  im.grad.assign(im.data.size(), 0.0);
}

Tensor Tensor::detached_copy() const {
  const Impl& im = impl();
  return from_data(im.shape, im.data);
}

void Tensor::copy_data_from(const Tensor& other) {
  if (shape() != other.shape()) {
    throw std::invalid_argument("copy_data_from: shape " + shape_str(shape()) + " vs " + shape_str(other.shape()));
  }
  impl().data = other.impl().data;
}

void Tape::backward(Tensor& loss) {
  if (loss.numel() != 1) {
    throw std::invalid_argument("backward: loss must be scalar, got shape " + shape_str(loss.shape()));
  }
  loss.grad()[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) (*it)();
}

}  // namespace regpomdp
