#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "di/ahnet.hpp"
#include "di/dataset.hpp"

namespace di {

// K-nearest-neighbours over flattened samples, Euclidean metric. Ties:
// majority vote, then smallest mean distance among tied classes, then
// smallest label index.
struct KnnModel {
  int k = 5;
  int64_t dim = 0;
  int64_t rows = 0, cols = 0;
  int n_classes = 0;
  std::vector<float> train_data;      // n x dim
  std::vector<uint16_t> train_labels; // n

  int64_t size() const { return static_cast<int64_t>(train_labels.size()); }
};

KnnModel knn_fit(const Dataset& train, int k);
uint16_t knn_predict(const KnnModel& model, std::span<const float> x);
std::vector<uint16_t> knn_predict_all(const KnnModel& model, const Dataset& ds);

// One-vs-rest linear SVM: hinge loss + L2, deterministic seeded
// subgradient descent. Prediction is the argmax decision value, smallest
// label on ties.
struct SvmHyper {
  double lambda = 1e-4;
  int epochs = 50;
  double learning_rate = 0.05;
  uint64_t seed = 1;
};

struct SvmModel {
  int n_classes = 0;
  int64_t dim = 0;
  int64_t rows = 0, cols = 0;
  double lambda = 0.0;
  std::vector<float> weights;  // n_classes x dim
  std::vector<float> bias;     // n_classes
};

SvmModel svm_fit(const Dataset& train, const SvmHyper& hyper);
uint16_t svm_predict(const SvmModel& model, std::span<const float> x);
std::vector<uint16_t> svm_predict_all(const SvmModel& model, const Dataset& ds);

inline CnnModel gesture_cnn_fit(const Dataset& train, const CnnHyper& hyper) {
  return train_cnn(train, CnnKind::gesture, hyper);
}

// N_correct / N_all.
double accuracy(std::span<const uint16_t> predictions, std::span<const uint16_t> truth);

}  // namespace di
