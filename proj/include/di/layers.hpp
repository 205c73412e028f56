#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "di/errors.hpp"
#include "di/gemm.hpp"
#include "di/rng.hpp"
#include "di/tensor.hpp"

namespace di {

template <typename T>
struct NamedTensorRef {
  std::string name;
  Tensor<T>* value = nullptr;
  Tensor<T>* grad = nullptr;  // null for non-trainable state (running stats)
  bool trainable = false;
};

// One layer of a sequential network. forward() caches whatever backward()
// needs; backward() consumes the most recent forward() call, accumulates
// parameter gradients and returns the gradient w.r.t. its input.
template <typename T>
class Layer {
public:
  virtual ~Layer() = default;
  virtual Tensor<T> forward(const Tensor<T>& x, bool train) = 0;
  virtual Tensor<T> backward(const Tensor<T>& grad_out) = 0;
  virtual void collect(const std::string& prefix, std::vector<NamedTensorRef<T>>& out) {}
  virtual void zero_grads() {}
};

template <typename T>
void fill_kaiming_uniform(Tensor<T>& w, int64_t fan_in, CounterRng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (int64_t i = 0; i < w.numel(); ++i) w[i] = static_cast<T>(rng.next_uniform(-bound, bound));
}

// ---------------------------------------------------------------------------
// Convolution

template <typename T>
class Conv2d : public Layer<T> {
public:
  Conv2d(int64_t in_ch, int64_t out_ch, int64_t ksize, int64_t stride, int64_t pad)
      : in_ch_(in_ch), out_ch_(out_ch), ksize_(ksize), stride_(stride), pad_(pad),
        weight_({out_ch, in_ch, ksize, ksize}), bias_({out_ch}),
        wgrad_({out_ch, in_ch, ksize, ksize}), bgrad_({out_ch}) {
    if (stride < 1) throw ConfigError("conv2d: stride must be >= 1");
    if (pad < 0) throw ConfigError("conv2d: padding must be >= 0");
  }

  void init(CounterRng& rng) { fill_kaiming_uniform(weight_, in_ch_ * ksize_ * ksize_, rng); }

  Tensor<T> forward(const Tensor<T>& x, bool /*train*/) override {
    if (x.rank() != 4 || x.dim(1) != in_ch_)
      throw ShapeError("conv2d: expected input (B," + std::to_string(in_ch_) + ",H,W), got " +
                       shape_str(x.shape()));
    const int64_t batch = x.dim(0), in_h = x.dim(2), in_w = x.dim(3);
    out_h_ = (in_h + 2 * pad_ - ksize_) / stride_ + 1;
    out_w_ = (in_w + 2 * pad_ - ksize_) / stride_ + 1;
    if (out_h_ < 1 || out_w_ < 1)
      throw ShapeError("conv2d: kernel " + std::to_string(ksize_) + " does not fit input " +
                       shape_str(x.shape()));
    in_h_ = in_h;
    in_w_ = in_w;
    const int64_t col_rows = in_ch_ * ksize_ * ksize_;
    const int64_t col_cols = out_h_ * out_w_;
    cols_.assign(static_cast<size_t>(batch * col_rows * col_cols), T(0));

    Tensor<T> y({batch, out_ch_, out_h_, out_w_});
    for (int64_t b = 0; b < batch; ++b) {
      T* col = cols_.data() + b * col_rows * col_cols;
      im2col(x.data() + b * in_ch_ * in_h * in_w, col);
      T* yb = y.data() + b * out_ch_ * col_cols;
      gemm_nn_acc(weight_.data(), col, yb, out_ch_, col_rows, col_cols);
      for (int64_t oc = 0; oc < out_ch_; ++oc) {
        const T bv = bias_[oc];
        T* row = yb + oc * col_cols;
        for (int64_t i = 0; i < col_cols; ++i) row[i] += bv;
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) override {
    const int64_t batch = gy.dim(0);
    const int64_t col_rows = in_ch_ * ksize_ * ksize_;
    const int64_t col_cols = out_h_ * out_w_;
    Tensor<T> dx({batch, in_ch_, in_h_, in_w_});
    std::vector<T> dcol(static_cast<size_t>(col_rows * col_cols));
    for (int64_t b = 0; b < batch; ++b) {
      const T* gyb = gy.data() + b * out_ch_ * col_cols;
      const T* col = cols_.data() + b * col_rows * col_cols;
      // dW += gy * col^T ; db += row sums of gy
      gemm_nt_acc(gyb, col, wgrad_.data(), out_ch_, col_cols, col_rows);
      for (int64_t oc = 0; oc < out_ch_; ++oc) {
        const T* row = gyb + oc * col_cols;
        T s = T(0);
        for (int64_t i = 0; i < col_cols; ++i) s += row[i];
        bgrad_[oc] += s;
      }
      // dcol = W^T * gy ; dx = col2im(dcol)
      std::fill(dcol.begin(), dcol.end(), T(0));
      gemm_tn_acc(weight_.data(), gyb, dcol.data(), col_rows, out_ch_, col_cols);
      col2im(dcol.data(), dx.data() + b * in_ch_ * in_h_ * in_w_);
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<NamedTensorRef<T>>& out) override {
    out.push_back({prefix + ".weight", &weight_, &wgrad_, true});
    out.push_back({prefix + ".bias", &bias_, &bgrad_, true});
  }

  void zero_grads() override {
    wgrad_.fill(T(0));
    bgrad_.fill(T(0));
  }

  Tensor<T>& weight() { return weight_; }
  Tensor<T>& bias() { return bias_; }

private:
  void im2col(const T* img, T* col) const {
    const int64_t col_cols = out_h_ * out_w_;
    for (int64_t c = 0; c < in_ch_; ++c) {
      const T* chan = img + c * in_h_ * in_w_;
      for (int64_t ki = 0; ki < ksize_; ++ki) {
        for (int64_t kj = 0; kj < ksize_; ++kj) {
          T* crow = col + ((c * ksize_ + ki) * ksize_ + kj) * col_cols;
          for (int64_t oh = 0; oh < out_h_; ++oh) {
            const int64_t ih = oh * stride_ - pad_ + ki;
            if (ih < 0 || ih >= in_h_) continue;  // stays zero
            const T* src = chan + ih * in_w_;
            T* dst = crow + oh * out_w_;
            for (int64_t ow = 0; ow < out_w_; ++ow) {
              const int64_t iw = ow * stride_ - pad_ + kj;
              if (iw >= 0 && iw < in_w_) dst[ow] = src[iw];
            }
          }
        }
      }
    }
  }

  void col2im(const T* col, T* img) const {
    const int64_t col_cols = out_h_ * out_w_;
    for (int64_t c = 0; c < in_ch_; ++c) {
      T* chan = img + c * in_h_ * in_w_;
      for (int64_t ki = 0; ki < ksize_; ++ki) {
        for (int64_t kj = 0; kj < ksize_; ++kj) {
          const T* crow = col + ((c * ksize_ + ki) * ksize_ + kj) * col_cols;
          for (int64_t oh = 0; oh < out_h_; ++oh) {
            const int64_t ih = oh * stride_ - pad_ + ki;
            if (ih < 0 || ih >= in_h_) continue;
            T* dst = chan + ih * in_w_;
            const T* src = crow + oh * out_w_;
            for (int64_t ow = 0; ow < out_w_; ++ow) {
              const int64_t iw = ow * stride_ - pad_ + kj;
              if (iw >= 0 && iw < in_w_) dst[iw] += src[ow];
            }
          }
        }
      }
    }
  }

  int64_t in_ch_, out_ch_, ksize_, stride_, pad_;
  int64_t in_h_ = 0, in_w_ = 0, out_h_ = 0, out_w_ = 0;
  Tensor<T> weight_, bias_, wgrad_, bgrad_;
  std::vector<T> cols_;
};

// ---------------------------------------------------------------------------
// Batch normalization (per channel over batch x spatial)

template <typename T>
class BatchNorm2d : public Layer<T> {
public:
  explicit BatchNorm2d(int64_t channels, T eps = T(1e-5), T stat_momentum = T(0.1))
      : channels_(channels), eps_(eps), stat_momentum_(stat_momentum),
        gamma_(Tensor<T>::full({channels}, T(1))), beta_({channels}),
        ggrad_({channels}), bgrad_({channels}),
        running_mean_({channels}), running_var_(Tensor<T>::full({channels}, T(1))),
        invstd_({channels}) {}

  Tensor<T> forward(const Tensor<T>& x, bool train) override {
    if (x.rank() != 4 || x.dim(1) != channels_)
      throw ShapeError("batchnorm: expected (B," + std::to_string(channels_) + ",H,W), got " +
                       shape_str(x.shape()));
    const int64_t batch = x.dim(0), h = x.dim(2), w = x.dim(3);
    if (train && batch < 2)
      throw ShapeError("batchnorm: train mode requires batch >= 2 (variance undefined)");
    train_mode_ = train;
    const int64_t plane = h * w;
    const int64_t n = batch * plane;
    xhat_ = Tensor<T>(x.shape());
    Tensor<T> y(x.shape());
    for (int64_t c = 0; c < channels_; ++c) {
      T mean, var;
      if (train) {
        // population statistics over batch x spatial
        T sum = T(0);
        for (int64_t b = 0; b < batch; ++b)
          sum += sum8(x.data() + (b * channels_ + c) * plane, plane);
        mean = sum / static_cast<T>(n);
        T sq = T(0);
        for (int64_t b = 0; b < batch; ++b)
          sq += sumsq_centered8(x.data() + (b * channels_ + c) * plane, plane, mean);
        var = sq / static_cast<T>(n);
        running_mean_[c] = (T(1) - stat_momentum_) * running_mean_[c] + stat_momentum_ * mean;
        running_var_[c] = (T(1) - stat_momentum_) * running_var_[c] + stat_momentum_ * var;
      } else {
        mean = running_mean_[c];
        var = running_var_[c];
      }
      const T invstd = T(1) / std::sqrt(var + eps_);
      invstd_[c] = invstd;
      const T g = gamma_[c], bta = beta_[c];
      for (int64_t b = 0; b < batch; ++b) {
        const T* p = x.data() + (b * channels_ + c) * plane;
        T* xh = xhat_.data() + (b * channels_ + c) * plane;
        T* yp = y.data() + (b * channels_ + c) * plane;
        for (int64_t i = 0; i < plane; ++i) {
          xh[i] = (p[i] - mean) * invstd;
          yp[i] = g * xh[i] + bta;
        }
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) override {
    const int64_t batch = gy.dim(0), plane = gy.dim(2) * gy.dim(3);
    const int64_t n = batch * plane;
    Tensor<T> dx(gy.shape());
    for (int64_t c = 0; c < channels_; ++c) {
      T dbeta = T(0), dgamma = T(0);
      for (int64_t b = 0; b < batch; ++b) {
        T s, d;
        sum_and_dot8(gy.data() + (b * channels_ + c) * plane,
                     xhat_.data() + (b * channels_ + c) * plane, plane, s, d);
        dbeta += s;
        dgamma += d;
      }
      ggrad_[c] += dgamma;
      bgrad_[c] += dbeta;
      const T scale = gamma_[c] * invstd_[c];
      if (train_mode_) {
        const T inv_n = T(1) / static_cast<T>(n);
        for (int64_t b = 0; b < batch; ++b) {
          const T* g = gy.data() + (b * channels_ + c) * plane;
          const T* xh = xhat_.data() + (b * channels_ + c) * plane;
          T* d = dx.data() + (b * channels_ + c) * plane;
          for (int64_t i = 0; i < plane; ++i)
            d[i] = scale * (g[i] - inv_n * dbeta - xh[i] * inv_n * dgamma);
        }
      } else {
        // running statistics are constants, so the map is affine
        for (int64_t b = 0; b < batch; ++b) {
          const T* g = gy.data() + (b * channels_ + c) * plane;
          T* d = dx.data() + (b * channels_ + c) * plane;
          for (int64_t i = 0; i < plane; ++i) d[i] = scale * g[i];
        }
      }
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<NamedTensorRef<T>>& out) override {
    out.push_back({prefix + ".gamma", &gamma_, &ggrad_, true});
    out.push_back({prefix + ".beta", &beta_, &bgrad_, true});
    out.push_back({prefix + ".running_mean", &running_mean_, nullptr, false});
    out.push_back({prefix + ".running_var", &running_var_, nullptr, false});
  }

  void zero_grads() override {
    ggrad_.fill(T(0));
    bgrad_.fill(T(0));
  }

  Tensor<T>& gamma() { return gamma_; }
  Tensor<T>& beta() { return beta_; }
  Tensor<T>& running_mean() { return running_mean_; }
  Tensor<T>& running_var() { return running_var_; }

private:
  int64_t channels_;
  T eps_, stat_momentum_;
  Tensor<T> gamma_, beta_, ggrad_, bgrad_, running_mean_, running_var_;
  Tensor<T> xhat_, invstd_;
  bool train_mode_ = false;
};

// ---------------------------------------------------------------------------
// Elementwise activations

template <typename T>
class ReLU : public Layer<T> {
public:
  Tensor<T> forward(const Tensor<T>& x, bool /*train*/) override {
    y_ = Tensor<T>(x.shape());
    for (int64_t i = 0; i < x.numel(); ++i) y_[i] = x[i] > T(0) ? x[i] : T(0);
    return y_;
  }

  Tensor<T> backward(const Tensor<T>& gy) override {
    Tensor<T> dx(gy.shape());
    for (int64_t i = 0; i < gy.numel(); ++i) dx[i] = y_[i] > T(0) ? gy[i] : T(0);
    return dx;
  }

private:
  Tensor<T> y_;  // kept for the backward mask
};

template <typename T>
inline T stable_sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T>
class Sigmoid : public Layer<T> {
public:
  Tensor<T> forward(const Tensor<T>& x, bool /*train*/) override {
    y_ = Tensor<T>(x.shape());
    for (int64_t i = 0; i < x.numel(); ++i) y_[i] = stable_sigmoid(x[i]);
    return y_;
  }

  Tensor<T> backward(const Tensor<T>& gy) override {
    Tensor<T> dx(gy.shape());
    for (int64_t i = 0; i < gy.numel(); ++i) dx[i] = gy[i] * y_[i] * (T(1) - y_[i]);
    return dx;
  }

private:
  Tensor<T> y_;
};

// ---------------------------------------------------------------------------
// 2x2 max pooling, stride 2

template <typename T>
class MaxPool2 : public Layer<T> {
public:
  Tensor<T> forward(const Tensor<T>& x, bool /*train*/) override {
    const int64_t batch = x.dim(0), ch = x.dim(1), h = x.dim(2), w = x.dim(3);
    if (h < 2 || w < 2) throw ShapeError("maxpool: input spatial dims must be >= 2");
    in_shape_ = x.shape();
    const int64_t oh = (h - 2) / 2 + 1, ow = (w - 2) / 2 + 1;
    Tensor<T> y({batch, ch, oh, ow});
    argmax_.assign(static_cast<size_t>(y.numel()), 0);
    int64_t o = 0;
    for (int64_t b = 0; b < batch; ++b) {
      for (int64_t c = 0; c < ch; ++c) {
        const T* plane = x.data() + (b * ch + c) * h * w;
        const int64_t base = (b * ch + c) * h * w;
        for (int64_t i = 0; i < oh; ++i) {
          for (int64_t j = 0; j < ow; ++j) {
            // ties resolve to the first element in scan order
            int64_t best = 2 * i * w + 2 * j;
            T bv = plane[best];
            const int64_t cand[3] = {2 * i * w + 2 * j + 1, (2 * i + 1) * w + 2 * j,
                                     (2 * i + 1) * w + 2 * j + 1};
            for (int64_t idx : cand) {
              if (plane[idx] > bv) {
                bv = plane[idx];
                best = idx;
              }
            }
            y[o] = bv;
            argmax_[static_cast<size_t>(o)] = base + best;
            ++o;
          }
        }
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) override {
    Tensor<T> dx(in_shape_);
    for (int64_t i = 0; i < gy.numel(); ++i) dx[argmax_[static_cast<size_t>(i)]] += gy[i];
    return dx;
  }

private:
  std::vector<int64_t> in_shape_;
  std::vector<int64_t> argmax_;
};

// ---------------------------------------------------------------------------
// Flatten (B,C,H,W) -> (B, C*H*W)

template <typename T>
class Flatten : public Layer<T> {
public:
  Tensor<T> forward(const Tensor<T>& x, bool /*train*/) override {
    in_shape_ = x.shape();
    return x.reshaped({x.dim(0), x.numel() / x.dim(0)});
  }

  Tensor<T> backward(const Tensor<T>& gy) override { return gy.reshaped(in_shape_); }

private:
  std::vector<int64_t> in_shape_;
};

// ---------------------------------------------------------------------------
// Fully connected

template <typename T>
class Linear : public Layer<T> {
public:
  Linear(int64_t in_features, int64_t out_features)
      : in_(in_features), out_(out_features), weight_({out_features, in_features}),
        bias_({out_features}), wgrad_({out_features, in_features}), bgrad_({out_features}) {}

  void init(CounterRng& rng) { fill_kaiming_uniform(weight_, in_, rng); }

  Tensor<T> forward(const Tensor<T>& x, bool /*train*/) override {
    if (x.rank() != 2 || x.dim(1) != in_)
      throw ShapeError("linear: expected input (B," + std::to_string(in_) + "), got " +
                       shape_str(x.shape()));
    x_ = x;
    const int64_t batch = x.dim(0);
    Tensor<T> y({batch, out_});
    gemm_nt_acc(x.data(), weight_.data(), y.data(), batch, in_, out_);
    for (int64_t b = 0; b < batch; ++b) {
      T* row = y.data() + b * out_;
      for (int64_t j = 0; j < out_; ++j) row[j] += bias_[j];
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) override {
    const int64_t batch = gy.dim(0);
    gemm_tn_acc(gy.data(), x_.data(), wgrad_.data(), out_, batch, in_);
    for (int64_t b = 0; b < batch; ++b) {
      const T* row = gy.data() + b * out_;
      for (int64_t j = 0; j < out_; ++j) bgrad_[j] += row[j];
    }
    Tensor<T> dx({batch, in_});
    gemm_nn_acc(gy.data(), weight_.data(), dx.data(), batch, out_, in_);
    return dx;
  }

  void collect(const std::string& prefix, std::vector<NamedTensorRef<T>>& out) override {
    out.push_back({prefix + ".weight", &weight_, &wgrad_, true});
    out.push_back({prefix + ".bias", &bias_, &bgrad_, true});
  }

  void zero_grads() override {
    wgrad_.fill(T(0));
    bgrad_.fill(T(0));
  }

  Tensor<T>& weight() { return weight_; }
  Tensor<T>& bias() { return bias_; }

private:
  int64_t in_, out_;
  Tensor<T> weight_, bias_, wgrad_, bgrad_;
  Tensor<T> x_;
};

// ---------------------------------------------------------------------------
// Sequential network

template <typename T>
class Network {
public:
  void add(const std::string& name, std::unique_ptr<Layer<T>> layer) {
    names_.push_back(name);
    layers_.push_back(std::move(layer));
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    Tensor<T> cur = x;
    for (auto& layer : layers_) cur = layer->forward(cur, train);
    return cur;
  }

  // Gradient w.r.t. the network input for the most recent forward().
  Tensor<T> backward(const Tensor<T>& grad_out) {
    Tensor<T> cur = grad_out;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) cur = (*it)->backward(cur);
    return cur;
  }

  void zero_grads() {
    for (auto& layer : layers_) layer->zero_grads();
  }

  std::vector<NamedTensorRef<T>> tensors() {
    std::vector<NamedTensorRef<T>> out;
    for (size_t i = 0; i < layers_.size(); ++i) layers_[i]->collect(names_[i], out);
    return out;
  }

  ParamSet<T> snapshot() {
    ParamSet<T> ps;
    for (const auto& ref : tensors()) ps.add(ref.name, *ref.value);
    return ps;
  }

  void load(const ParamSet<T>& ps) {
    for (auto& ref : tensors()) {
      const Tensor<T>& src = ps.at(ref.name);
      if (!src.same_shape(*ref.value))
        throw ShapeError("load: shape mismatch for " + ref.name + ": " +
                         shape_str(src.shape()) + " vs " + shape_str(ref.value->shape()));
      *ref.value = src;
    }
  }

  size_t layer_count() const { return layers_.size(); }
  Layer<T>* layer(size_t i) { return layers_[i].get(); }
  const std::string& layer_name(size_t i) const { return names_[i]; }

private:
  std::vector<std::string> names_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

// ---------------------------------------------------------------------------
// Softmax cross entropy

template <typename T>
void softmax_rows(const Tensor<T>& logits, Tensor<T>& probs) {
  const int64_t batch = logits.dim(0), classes = logits.dim(1);
  for (int64_t b = 0; b < batch; ++b) {
    const T* row = logits.data() + b * classes;
    T* prow = probs.data() + b * classes;
    T mx = row[0];
    for (int64_t c = 1; c < classes; ++c) mx = std::max(mx, row[c]);
    T denom = T(0);
    for (int64_t c = 0; c < classes; ++c) {
      prow[c] = std::exp(row[c] - mx);
      denom += prow[c];
    }
    for (int64_t c = 0; c < classes; ++c) prow[c] /= denom;
  }
}

template <typename T>
struct SoftmaxCeResult {
  double loss = 0.0;               // mean over the batch of -log P(true class)
  Tensor<T> logit_gradient;        // (P - onehot) / batch
};

template <typename T>
SoftmaxCeResult<T> softmax_cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels) {
  if (logits.rank() != 2) throw ShapeError("softmax_cross_entropy: logits must be (B,C)");
  const int64_t batch = logits.dim(0), classes = logits.dim(1);
  if (static_cast<int64_t>(labels.size()) != batch)
    throw ShapeError("softmax_cross_entropy: label count does not match batch");
  for (int lbl : labels)
    if (lbl < 0 || lbl >= classes)
      throw ConfigError("softmax_cross_entropy: label " + std::to_string(lbl) +
                        " out of range [0," + std::to_string(classes) + ")");
  SoftmaxCeResult<T> res;
  res.logit_gradient = Tensor<T>(logits.shape());
  softmax_rows(logits, res.logit_gradient);
  double loss = 0.0;
  for (int64_t b = 0; b < batch; ++b) {
    T* prow = res.logit_gradient.data() + b * classes;
    // log P via log-sum-exp on the already-normalized row is redundant;
    // recompute from logits to keep the loss stable for extreme inputs.
    const T* row = logits.data() + b * classes;
    T mx = row[0];
    for (int64_t c = 1; c < classes; ++c) mx = std::max(mx, row[c]);
    T lse = T(0);
    for (int64_t c = 0; c < classes; ++c) lse += std::exp(row[c] - mx);
    loss += -static_cast<double>(row[labels[static_cast<size_t>(b)]] - mx - std::log(lse));
    prow[labels[static_cast<size_t>(b)]] -= T(1);
    for (int64_t c = 0; c < classes; ++c) prow[c] /= static_cast<T>(batch);
  }
  res.loss = loss / static_cast<double>(batch);
  return res;
}

// d(loss)/d(input), parameters untouched. Runs the network in inference
// mode unless `train` is set (finite-difference checks exercise both).
template <typename T>
Tensor<T> input_gradient(Network<T>& net, const Tensor<T>& x, const std::vector<int>& labels,
                         bool train = false) {
  net.zero_grads();
  Tensor<T> logits = net.forward(x, train);
  auto ce = softmax_cross_entropy(logits, labels);
  return net.backward(ce.logit_gradient);
}

template <typename T>
std::vector<int> argmax_rows(const Tensor<T>& logits) {
  const int64_t batch = logits.dim(0), classes = logits.dim(1);
  std::vector<int> out(static_cast<size_t>(batch));
  for (int64_t b = 0; b < batch; ++b) {
    const T* row = logits.data() + b * classes;
    int best = 0;
    for (int64_t c = 1; c < classes; ++c)
      if (row[c] > row[best]) best = static_cast<int>(c);  // ties keep the lowest index
    out[static_cast<size_t>(b)] = best;
  }
  return out;
}

}  // namespace di
