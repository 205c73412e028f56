#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "di/errors.hpp"

namespace di {

inline int64_t shape_numel(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (int64_t d : shape) {
    if (d < 0) throw ShapeError("negative tensor dimension");
    n *= d;
  }
  return n;
}

inline std::string shape_str(const std::vector<int64_t>& shape) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ")";
  return os.str();
}

// Dense row-major tensor. Data length always equals the product of the
// dims; `checked` construction additionally rejects NaN/Inf.
template <typename T>
class Tensor {
public:
  Tensor() = default;

  explicit Tensor(std::vector<int64_t> shape)
      : shape_(std::move(shape)), data_(static_cast<size_t>(shape_numel(shape_)), T(0)) {}

  Tensor(std::vector<int64_t> shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (static_cast<int64_t>(data_.size()) != shape_numel(shape_))
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match shape " + shape_str(shape_));
  }

  static Tensor zeros(std::vector<int64_t> shape) { return Tensor(std::move(shape)); }

  static Tensor full(std::vector<int64_t> shape, T value) {
    Tensor t(std::move(shape));
    for (T& v : t.data_) v = value;
    return t;
  }

  // Checked mode: rejects non-finite values at construction.
  static Tensor checked(std::vector<int64_t> shape, std::vector<T> data) {
    Tensor t(std::move(shape), std::move(data));
    t.require_finite();
    return t;
  }

  const std::vector<int64_t>& shape() const { return shape_; }
  int64_t dim(size_t i) const { return shape_.at(i); }
  size_t rank() const { return shape_.size(); }
  int64_t numel() const { return static_cast<int64_t>(data_.size()); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> view() { return std::span<T>(data_); }
  std::span<const T> view() const { return std::span<const T>(data_); }
  T& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
  const T& operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  // Reshape preserving the element count.
  Tensor reshaped(std::vector<int64_t> shape) const {
    if (shape_numel(shape) != numel())
      throw ShapeError("reshape " + shape_str(shape_) + " -> " + shape_str(shape) +
                       " changes element count");
    return Tensor(std::move(shape), data_);
  }

  void fill(T value) {
    for (T& v : data_) v = value;
  }

  void require_finite() const {
    for (const T& v : data_)
      if (!std::isfinite(static_cast<double>(v)))
        throw ShapeError("tensor contains non-finite value");
  }

  template <typename U>
  Tensor<U> cast() const {
    std::vector<U> out(data_.size());
    for (size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
    return Tensor<U>(shape_, std::move(out));
  }

private:
  std::vector<int64_t> shape_;
  std::vector<T> data_;
};

// Ordered map of name -> tensor; names unique, order = insertion order
// (which is also the serialization order).
template <typename T>
class ParamSet {
public:
  void add(const std::string& name, Tensor<T> value) {
    if (find(name)) throw ConfigError("duplicate parameter name: " + name);
    items_.emplace_back(name, std::move(value));
  }

  Tensor<T>* find(const std::string& name) {
    for (auto& [k, v] : items_)
      if (k == name) return &v;
    return nullptr;
  }

  const Tensor<T>* find(const std::string& name) const {
    for (const auto& [k, v] : items_)
      if (k == name) return &v;
    return nullptr;
  }

  Tensor<T>& at(const std::string& name) {
    Tensor<T>* t = find(name);
    if (!t) throw ConfigError("unknown parameter name: " + name);
    return *t;
  }

  const Tensor<T>& at(const std::string& name) const {
    const Tensor<T>* t = find(name);
    if (!t) throw ConfigError("unknown parameter name: " + name);
    return *t;
  }

  size_t size() const { return items_.size(); }
  auto begin() { return items_.begin(); }
  auto end() { return items_.end(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

private:
  std::vector<std::pair<std::string, Tensor<T>>> items_;
};

// SGD-with-momentum state; velocity shapes mirror the parameter shapes.
template <typename T>
struct OptimState {
  T learning_rate{};
  T momentum{};
  ParamSet<T> velocity;

  static OptimState init(const ParamSet<T>& params, T learning_rate, T momentum) {
    if (!(learning_rate > T(0))) throw ConfigError("learning rate must be positive");
    if (!(momentum >= T(0) && momentum < T(1))) throw ConfigError("momentum must be in [0,1)");
    OptimState s;
    s.learning_rate = learning_rate;
    s.momentum = momentum;
    for (const auto& [name, p] : params) s.velocity.add(name, Tensor<T>::zeros(p.shape()));
    return s;
  }
};

// v <- momentum*v - lr*g;  p <- p + v
template <typename T>
void sgd_update(Tensor<T>& param, const Tensor<T>& grad, Tensor<T>& velocity, T lr, T momentum) {
  if (!param.same_shape(grad) || !param.same_shape(velocity))
    throw ShapeError("sgd_update: gradient/velocity shape does not mirror parameter shape");
  T* p = param.data();
  const T* g = grad.data();
  T* v = velocity.data();
  const int64_t n = param.numel();
  for (int64_t i = 0; i < n; ++i) {
    v[i] = momentum * v[i] - lr * g[i];
    p[i] += v[i];
  }
}

template <typename T>
void sgd_step(ParamSet<T>& params, const ParamSet<T>& grads, OptimState<T>& state) {
  for (auto& [name, p] : params) {
    const Tensor<T>* g = grads.find(name);
    if (!g) throw ShapeError("sgd_step: missing gradient for " + name);
    sgd_update(p, *g, state.velocity.at(name), state.learning_rate, state.momentum);
  }
}

}  // namespace di
