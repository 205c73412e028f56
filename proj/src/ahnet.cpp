#include "di/ahnet.hpp"

#include <cmath>
#include <cstdio>

#include "di/rng.hpp"

namespace di {

Network<float> build_dcnn(int64_t rows, int64_t cols, int n_classes, int hidden,
                          bool strict_paper_arch, uint64_t init_seed) {
  if (rows < 8 || cols < 8)
    throw ConfigError("dcnn: sample shape must be at least 8x8 for three pooling stages");
  if (n_classes < 2) throw ConfigError("dcnn: need at least 2 classes");
  if (hidden < 1) throw ConfigError("dcnn: hidden width must be positive");

  Network<float> net;
  const int kernels[3] = {16, 32, 64};
  int64_t h = rows, w = cols;
  int64_t in_ch = 1;
  int layer_idx = 0;
  for (int block = 0; block < 3; ++block) {
    auto conv = std::make_unique<Conv2d<float>>(in_ch, kernels[block], 3, 1, 1);
    CounterRng rng(init_seed, "init", {static_cast<uint64_t>(layer_idx++)});
    conv->init(rng);
    net.add("conv" + std::to_string(block + 1), std::move(conv));
    net.add("bn" + std::to_string(block + 1), std::make_unique<BatchNorm2d<float>>(kernels[block]));
    net.add("relu" + std::to_string(block + 1), std::make_unique<ReLU<float>>());
    net.add("pool" + std::to_string(block + 1), std::make_unique<MaxPool2<float>>());
    in_ch = kernels[block];
    h = (h - 2) / 2 + 1;
    w = (w - 2) / 2 + 1;
  }
  net.add("flatten", std::make_unique<Flatten<float>>());
  const int64_t flat = in_ch * h * w;
  auto fc1 = std::make_unique<Linear<float>>(flat, hidden);
  CounterRng rng1(init_seed, "init", {static_cast<uint64_t>(layer_idx++)});
  fc1->init(rng1);
  net.add("fc1", std::move(fc1));
  net.add("sigmoid1", std::make_unique<Sigmoid<float>>());
  auto fc2 = std::make_unique<Linear<float>>(hidden, n_classes);
  CounterRng rng2(init_seed, "init", {static_cast<uint64_t>(layer_idx++)});
  fc2->init(rng2);
  net.add("fc2", std::move(fc2));
  if (strict_paper_arch) net.add("sigmoid2", std::make_unique<Sigmoid<float>>());
  return net;
}

namespace {

Tensor<float> gather_batch(const Dataset& ds, std::span<const int64_t> idx) {
  const int64_t n = static_cast<int64_t>(idx.size());
  Tensor<float> x({n, 1, ds.rows, ds.cols});
  for (int64_t i = 0; i < n; ++i) {
    const auto s = ds.sample(idx[static_cast<size_t>(i)]);
    std::copy(s.begin(), s.end(), x.data() + i * ds.sample_size());
  }
  return x;
}

std::vector<int> gather_labels(std::span<const uint16_t> labels, std::span<const int64_t> idx) {
  std::vector<int> out(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) out[i] = labels[static_cast<size_t>(idx[i])];
  return out;
}

}  // namespace

CnnModel train_cnn(const Dataset& ds, CnnKind kind, const CnnHyper& hp) {
  ds.validate();
  if (ds.count() == 0) throw ConfigError("train: dataset is empty");
  if (hp.epochs < 0 || hp.batch < 2) throw ConfigError("train: need epochs >= 0 and batch >= 2");
  if (!(hp.learning_rate > 0)) throw ConfigError("train: learning rate must be positive");
  if (!(hp.momentum >= 0 && hp.momentum < 1)) throw ConfigError("train: momentum must be in [0,1)");
  const int n_classes = (kind == CnnKind::domain) ? ds.n_domains : ds.n_gestures;
  if (n_classes < 2)
    throw ConfigError("train: dataset has " + std::to_string(n_classes) +
                      " classes; a softmax classifier needs at least 2");

  CnnModel model;
  model.kind = kind;
  model.rows = ds.rows;
  model.cols = ds.cols;
  model.n_classes = n_classes;
  model.hidden = hp.hidden;
  model.strict_paper_arch = hp.strict_paper_arch;
  model.net = build_dcnn(ds.rows, ds.cols, n_classes, hp.hidden, hp.strict_paper_arch, hp.seed);

  auto refs = model.net.tensors();
  std::vector<Tensor<float>> velocity;
  for (const auto& r : refs)
    velocity.push_back(r.trainable ? Tensor<float>::zeros(r.value->shape()) : Tensor<float>());

  const auto labels = model.labels_of(ds);
  const auto lr = static_cast<float>(hp.learning_rate);
  const auto mom = static_cast<float>(hp.momentum);
  std::vector<int64_t> order(static_cast<size_t>(ds.count()));
  for (int64_t i = 0; i < ds.count(); ++i) order[static_cast<size_t>(i)] = i;

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    CounterRng shuffle_rng(hp.seed, "shuffle", {static_cast<uint64_t>(epoch)});
    shuffle_indices(order, shuffle_rng);
    double epoch_loss = 0.0;
    int64_t seen = 0, correct = 0;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(hp.batch)) {
      const size_t end = std::min(order.size(), start + static_cast<size_t>(hp.batch));
      if (end - start < 2) break;  // a trailing singleton cannot be batch-normalized; skip it
      const std::span<const int64_t> idx(order.data() + start, end - start);
      Tensor<float> x = gather_batch(ds, idx);
      const std::vector<int> y = gather_labels(labels, idx);

      model.net.zero_grads();
      Tensor<float> logits = model.net.forward(x, /*train=*/true);
      auto ce = softmax_cross_entropy(logits, y);
      if (!std::isfinite(ce.loss))
        throw ShapeError("train: loss diverged (NaN/Inf) at epoch " + std::to_string(epoch));
      model.net.backward(ce.logit_gradient);
      for (size_t r = 0; r < refs.size(); ++r)
        if (refs[r].trainable) sgd_update(*refs[r].value, *refs[r].grad, velocity[r], lr, mom);

      epoch_loss += ce.loss * static_cast<double>(idx.size());
      const auto pred = argmax_rows(logits);
      for (size_t i = 0; i < pred.size(); ++i) correct += (pred[i] == y[i]);
      seen += static_cast<int64_t>(idx.size());
    }
    EpochStats stats;
    stats.loss = seen ? epoch_loss / static_cast<double>(seen) : 0.0;
    stats.accuracy = seen ? static_cast<double>(correct) / static_cast<double>(seen) : 0.0;
    model.trace.push_back(stats);
    if (hp.verbose)
      std::fprintf(stderr, "epoch %3d  loss %.4f  train acc %.4f\n", epoch, stats.loss,
                   stats.accuracy);
  }
  return model;
}

namespace {

constexpr int64_t kInferBatch = 64;

void check_sample_shape(const CnnModel& model, const Dataset& ds) {
  if (ds.rows != model.rows || ds.cols != model.cols)
    throw ShapeError("model expects samples " + std::to_string(model.rows) + "x" +
                     std::to_string(model.cols) + ", dataset has " + std::to_string(ds.rows) +
                     "x" + std::to_string(ds.cols));
}

}  // namespace

std::vector<uint16_t> cnn_predict(CnnModel& model, const Dataset& ds) {
  check_sample_shape(model, ds);
  std::vector<uint16_t> out(static_cast<size_t>(ds.count()));
  std::vector<int64_t> idx;
  for (int64_t start = 0; start < ds.count(); start += kInferBatch) {
    const int64_t end = std::min(ds.count(), start + kInferBatch);
    idx.clear();
    for (int64_t i = start; i < end; ++i) idx.push_back(i);
    Tensor<float> x = gather_batch(ds, idx);
    Tensor<float> logits = model.net.forward(x, /*train=*/false);
    const auto pred = argmax_rows(logits);
    for (int64_t i = start; i < end; ++i)
      out[static_cast<size_t>(i)] = static_cast<uint16_t>(pred[static_cast<size_t>(i - start)]);
  }
  return out;
}

double cnn_accuracy(CnnModel& model, const Dataset& ds) {
  const auto pred = cnn_predict(model, ds);
  const auto truth = model.labels_of(ds);
  int64_t correct = 0;
  for (size_t i = 0; i < pred.size(); ++i) correct += (pred[i] == truth[i]);
  return ds.count() ? static_cast<double>(correct) / static_cast<double>(ds.count()) : 0.0;
}

std::vector<int8_t> sign_map(CnnModel& model, std::span<const float> x, int label) {
  if (static_cast<int64_t>(x.size()) != model.rows * model.cols)
    throw ShapeError("sign_map: sample size does not match model input");
  if (label < 0 || label >= model.n_classes)
    throw ConfigError("sign_map: label " + std::to_string(label) + " out of range [0," +
                      std::to_string(model.n_classes) + ")");
  Tensor<float> xt({1, 1, model.rows, model.cols},
                   std::vector<float>(x.begin(), x.end()));
  Tensor<float> g = input_gradient(model.net, xt, {label}, /*train=*/false);
  std::vector<int8_t> s(x.size());
  for (int64_t i = 0; i < g.numel(); ++i)
    s[static_cast<size_t>(i)] = (g[i] > 0.0f) ? int8_t{1} : (g[i] < 0.0f ? int8_t{-1} : int8_t{0});
  return s;
}

std::vector<int8_t> dataset_sign_maps(CnnModel& model, const Dataset& ds, LabelSource source) {
  check_sample_shape(model, ds);
  if (model.kind != CnnKind::domain)
    throw ConfigError("sign maps are derived from the domain classifier");
  const int64_t size = ds.sample_size();
  std::vector<int8_t> signs(static_cast<size_t>(ds.count() * size));
  std::vector<int64_t> idx;
  for (int64_t start = 0; start < ds.count(); start += kInferBatch) {
    const int64_t end = std::min(ds.count(), start + kInferBatch);
    idx.clear();
    for (int64_t i = start; i < end; ++i) idx.push_back(i);
    Tensor<float> x = gather_batch(ds, idx);
    std::vector<int> y;
    if (source == LabelSource::true_label) {
      y = std::vector<int>(idx.size());
      for (size_t i = 0; i < idx.size(); ++i) y[i] = ds.domains[static_cast<size_t>(idx[i])];
    } else {
      model.net.zero_grads();
      Tensor<float> logits = model.net.forward(x, /*train=*/false);
      y = argmax_rows(logits);
    }
    Tensor<float> g = input_gradient(model.net, x, y, /*train=*/false);
    for (int64_t i = 0; i < g.numel(); ++i) {
      signs[static_cast<size_t>(start * size + i)] =
          (g[i] > 0.0f) ? int8_t{1} : (g[i] < 0.0f ? int8_t{-1} : int8_t{0});
    }
  }
  return signs;
}

void apply_dge(std::span<const float> x, std::span<const int8_t> s, double alpha,
               std::span<float> out) {
  if (x.size() != s.size() || x.size() != out.size())
    throw ShapeError("apply_dge: sample, sign map and output sizes differ");
  for (size_t i = 0; i < x.size(); ++i)
    out[i] = static_cast<float>(static_cast<double>(x[i]) + alpha * static_cast<double>(s[i]));
}

std::vector<float> make_domain_independent(CnnModel& model, std::span<const float> x, int label,
                                           const DgeConfig& cfg) {
  cfg.validate();
  int y;
  if (cfg.label_source == LabelSource::true_label) {
    if (label < 0) throw ConfigError("make_domain_independent: true label requested but none given");
    y = label;
  } else {
    Tensor<float> xt({1, 1, model.rows, model.cols}, std::vector<float>(x.begin(), x.end()));
    Tensor<float> logits = model.net.forward(xt, /*train=*/false);
    y = argmax_rows(logits)[0];
  }
  const auto s = sign_map(model, x, y);
  std::vector<float> out(x.size());
  apply_dge(x, s, cfg.alpha, out);
  return out;
}

Dataset apply_dge_dataset(const Dataset& ds, const std::vector<int8_t>& signs, double alpha) {
  if (!(alpha > 0)) throw ConfigError("apply_dge: alpha must be positive");
  if (signs.size() != ds.samples.size())
    throw ShapeError("apply_dge: sign map count does not match dataset");
  Dataset out = ds.like();
  out.domains = ds.domains;
  out.gestures = ds.gestures;
  out.samples.resize(ds.samples.size());
  apply_dge(ds.samples, signs, alpha, out.samples);
  return out;
}

Dataset convert_dataset(CnnModel& model, const Dataset& ds, const DgeConfig& cfg) {
  cfg.validate();
  return apply_dge_dataset(ds, dataset_sign_maps(model, ds, cfg.label_source), cfg.alpha);
}

FgsmResult fgsm_adversarial(CnnModel& model, std::span<const float> x, int label, double epsilon) {
  if (epsilon < 0) throw ConfigError("fgsm: epsilon must be >= 0");
  FgsmResult res;
  res.adversarial.assign(x.begin(), x.end());
  Tensor<float> xt({1, 1, model.rows, model.cols}, std::vector<float>(x.begin(), x.end()));
  Tensor<float> logits = model.net.forward(xt, /*train=*/false);
  const int before = argmax_rows(logits)[0];
  if (epsilon > 0) {
    const auto s = sign_map(model, x, label);
    apply_dge(x, s, epsilon, res.adversarial);
  }
  Tensor<float> at({1, 1, model.rows, model.cols},
                   std::vector<float>(res.adversarial.begin(), res.adversarial.end()));
  Tensor<float> adv_logits = model.net.forward(at, /*train=*/false);
  res.flipped = (argmax_rows(adv_logits)[0] != before);
  return res;
}

std::vector<double> per_sample_domain_loss(CnnModel& model, const Dataset& ds,
                                           std::span<const uint16_t> labels) {
  check_sample_shape(model, ds);
  if (static_cast<int64_t>(labels.size()) != ds.count())
    throw ShapeError("per_sample_domain_loss: label count mismatch");
  std::vector<double> losses(static_cast<size_t>(ds.count()));
  std::vector<int64_t> idx;
  for (int64_t start = 0; start < ds.count(); start += kInferBatch) {
    const int64_t end = std::min(ds.count(), start + kInferBatch);
    idx.clear();
    for (int64_t i = start; i < end; ++i) idx.push_back(i);
    Tensor<float> x = gather_batch(ds, idx);
    Tensor<float> logits = model.net.forward(x, /*train=*/false);
    const int64_t classes = logits.dim(1);
    for (int64_t b = 0; b < end - start; ++b) {
      const float* row = logits.data() + b * classes;
      float mx = row[0];
      for (int64_t c = 1; c < classes; ++c) mx = std::max(mx, row[c]);
      double lse = 0.0;
      for (int64_t c = 0; c < classes; ++c) lse += std::exp(static_cast<double>(row[c] - mx));
      const int lbl = labels[static_cast<size_t>(start + b)];
      if (lbl >= classes) throw ConfigError("per_sample_domain_loss: label out of range");
      losses[static_cast<size_t>(start + b)] =
          -(static_cast<double>(row[lbl] - mx) - std::log(lse));
    }
  }
  return losses;
}

}  // namespace di
