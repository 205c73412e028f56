#include "di/recognizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "di/gemm.hpp"
#include "di/rng.hpp"

namespace di {

KnnModel knn_fit(const Dataset& train, int k) {
  if (train.count() == 0) throw ConfigError("knn_fit: empty training set");
  train.validate();
  if (k < 1) throw ConfigError("knn_fit: k must be >= 1");
  if (k > train.count())
    throw ConfigError("knn_fit: k=" + std::to_string(k) + " exceeds training size " +
                      std::to_string(train.count()));
  KnnModel m;
  m.k = k;
  m.dim = train.sample_size();
  m.rows = train.rows;
  m.cols = train.cols;
  m.n_classes = train.n_gestures;
  m.train_data = train.samples;
  m.train_labels = train.gestures;
  return m;
}

uint16_t knn_predict(const KnnModel& m, std::span<const float> x) {
  if (static_cast<int64_t>(x.size()) != m.dim)
    throw ShapeError("knn_predict: query dimension mismatch");
  // (squared distance, training index); index breaks distance ties
  std::vector<std::pair<double, int64_t>> dist(static_cast<size_t>(m.size()));
  for (int64_t i = 0; i < m.size(); ++i) {
    const float* row = m.train_data.data() + i * m.dim;
    double d = 0.0;
    for (int64_t j = 0; j < m.dim; ++j) {
      const double diff = static_cast<double>(row[j]) - static_cast<double>(x[j]);
      d += diff * diff;
    }
    dist[static_cast<size_t>(i)] = {d, i};
  }
  std::partial_sort(dist.begin(), dist.begin() + m.k, dist.end());

  std::vector<int> votes(static_cast<size_t>(m.n_classes), 0);
  std::vector<double> dist_sum(static_cast<size_t>(m.n_classes), 0.0);
  for (int i = 0; i < m.k; ++i) {
    const auto cls = m.train_labels[static_cast<size_t>(dist[static_cast<size_t>(i)].second)];
    votes[cls] += 1;
    dist_sum[cls] += std::sqrt(dist[static_cast<size_t>(i)].first);
  }
  int best = -1;
  double best_mean = std::numeric_limits<double>::infinity();
  for (int c = 0; c < m.n_classes; ++c) {
    if (votes[static_cast<size_t>(c)] == 0) continue;
    const double mean = dist_sum[static_cast<size_t>(c)] / votes[static_cast<size_t>(c)];
    if (best < 0 || votes[static_cast<size_t>(c)] > votes[static_cast<size_t>(best)] ||
        (votes[static_cast<size_t>(c)] == votes[static_cast<size_t>(best)] && mean < best_mean)) {
      best = c;
      best_mean = mean;
    }
    // equal votes and equal mean distance keep the smaller label index
  }
  return static_cast<uint16_t>(best);
}

std::vector<uint16_t> knn_predict_all(const KnnModel& m, const Dataset& ds) {
  if (ds.sample_size() != m.dim) throw ShapeError("knn_predict: dataset shape mismatch");
  std::vector<uint16_t> out(static_cast<size_t>(ds.count()));
  for (int64_t i = 0; i < ds.count(); ++i) out[static_cast<size_t>(i)] = knn_predict(m, ds.sample(i));
  return out;
}

SvmModel svm_fit(const Dataset& train, const SvmHyper& hp) {
  if (train.count() == 0) throw ConfigError("svm_fit: empty training set");
  train.validate();
  if (!(hp.lambda > 0)) throw ConfigError("svm_fit: lambda must be positive");
  if (hp.epochs < 1) throw ConfigError("svm_fit: epochs must be >= 1");
  int present = 0;
  {
    std::vector<char> seen(static_cast<size_t>(train.n_gestures), 0);
    for (uint16_t g : train.gestures)
      if (!seen[g]) {
        seen[g] = 1;
        ++present;
      }
  }
  if (present < 2) throw ConfigError("svm_fit: training set has a single gesture class");

  SvmModel m;
  m.n_classes = train.n_gestures;
  m.dim = train.sample_size();
  m.rows = train.rows;
  m.cols = train.cols;
  m.lambda = hp.lambda;
  m.weights.assign(static_cast<size_t>(m.n_classes) * m.dim, 0.0f);
  m.bias.assign(static_cast<size_t>(m.n_classes), 0.0f);

  std::vector<int64_t> order(static_cast<size_t>(train.count()));
  for (int64_t i = 0; i < train.count(); ++i) order[static_cast<size_t>(i)] = i;
  const auto lr = static_cast<float>(hp.learning_rate);
  const auto shrink = static_cast<float>(1.0 - hp.learning_rate * hp.lambda);

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    CounterRng rng(hp.seed, "svm-shuffle", {static_cast<uint64_t>(epoch)});
    shuffle_indices(order, rng);
    for (int64_t i : order) {
      const float* x = train.samples.data() + i * m.dim;
      const int truth = train.gestures[static_cast<size_t>(i)];
      for (int c = 0; c < m.n_classes; ++c) {
        float* w = m.weights.data() + static_cast<int64_t>(c) * m.dim;
        const float y = (c == truth) ? 1.0f : -1.0f;
        const float margin = y * (dot8(w, x, m.dim) + m.bias[static_cast<size_t>(c)]);
        // L2 shrink every step; hinge subgradient only when the margin is violated
        for (int64_t j = 0; j < m.dim; ++j) w[j] *= shrink;
        if (margin < 1.0f) {
          const float step = lr * y;
          for (int64_t j = 0; j < m.dim; ++j) w[j] += step * x[j];
          m.bias[static_cast<size_t>(c)] += step;
        }
      }
    }
  }
  return m;
}

uint16_t svm_predict(const SvmModel& m, std::span<const float> x) {
  if (static_cast<int64_t>(x.size()) != m.dim)
    throw ShapeError("svm_predict: query dimension mismatch");
  int best = 0;
  float best_v = -std::numeric_limits<float>::infinity();
  for (int c = 0; c < m.n_classes; ++c) {
    const float v = dot8(m.weights.data() + static_cast<int64_t>(c) * m.dim, x.data(), m.dim) +
                    m.bias[static_cast<size_t>(c)];
    if (v > best_v) {  // strict > keeps the smallest label on ties
      best_v = v;
      best = c;
    }
  }
  return static_cast<uint16_t>(best);
}

std::vector<uint16_t> svm_predict_all(const SvmModel& m, const Dataset& ds) {
  if (ds.sample_size() != m.dim) throw ShapeError("svm_predict: dataset shape mismatch");
  std::vector<uint16_t> out(static_cast<size_t>(ds.count()));
  for (int64_t i = 0; i < ds.count(); ++i) out[static_cast<size_t>(i)] = svm_predict(m, ds.sample(i));
  return out;
}

double accuracy(std::span<const uint16_t> predictions, std::span<const uint16_t> truth) {
  if (predictions.size() != truth.size())
    throw ConfigError("accuracy: prediction and truth lengths differ");
  if (predictions.empty()) throw ConfigError("accuracy: empty label lists");
  int64_t correct = 0;
  for (size_t i = 0; i < predictions.size(); ++i) correct += (predictions[i] == truth[i]);
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

}  // namespace di
