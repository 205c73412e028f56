#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "di/dataset.hpp"
#include "di/layers.hpp"

namespace di {

// The network family used for both the domain classifier and the CNN
// gesture recognizer: three conv blocks (16/32/64 kernels of 3x3, each
// followed by batchnorm, ReLU and 2x2 max pooling), then two fully
// connected layers. The hidden FC is always sigmoid-activated; the output
// FC emits raw logits unless strict_paper_arch puts a sigmoid there too.
struct CnnHyper {
  int epochs = 30;
  double learning_rate = 0.01;
  double momentum = 0.9;
  int batch = 32;
  int hidden = 128;
  bool strict_paper_arch = false;
  uint64_t seed = 1;
  bool verbose = false;
};

struct EpochStats {
  double loss = 0.0;      // mean cross entropy over the epoch
  double accuracy = 0.0;  // train accuracy from the same forward passes
};

enum class CnnKind { domain, gesture };

struct CnnModel {
  Network<float> net;
  CnnKind kind = CnnKind::domain;
  int64_t rows = 0, cols = 0;
  int n_classes = 0;
  int hidden = 128;
  bool strict_paper_arch = false;
  std::vector<EpochStats> trace;

  std::span<const uint16_t> labels_of(const Dataset& ds) const {
    return kind == CnnKind::domain ? std::span<const uint16_t>(ds.domains)
                                   : std::span<const uint16_t>(ds.gestures);
  }
};

Network<float> build_dcnn(int64_t rows, int64_t cols, int n_classes, int hidden,
                          bool strict_paper_arch, uint64_t init_seed);

// Trains with softmax cross entropy and momentum SGD over seeded-shuffled
// minibatches. Rejects datasets with fewer than 2 label classes; raises
// on divergence (NaN loss) naming the epoch. epochs == 0 returns the
// freshly initialized model.
CnnModel train_cnn(const Dataset& train, CnnKind kind, const CnnHyper& hyper);

inline CnnModel train_domain_dcnn(const Dataset& train, const CnnHyper& hyper) {
  return train_cnn(train, CnnKind::domain, hyper);
}

// Batched inference; argmax with lowest-index tie break.
std::vector<uint16_t> cnn_predict(CnnModel& model, const Dataset& ds);
double cnn_accuracy(CnnModel& model, const Dataset& ds);

// ---------------------------------------------------------------------------
// Domain gap elimination

enum class LabelSource { true_label, predicted_label };

struct DgeConfig {
  double alpha = 0.1;
  LabelSource label_source = LabelSource::predicted_label;

  void validate() const {
    if (!(alpha > 0)) throw ConfigError("dge: alpha must be positive");
  }
};

// sign(d loss / d x) per element, entries in {-1, 0, +1}.
std::vector<int8_t> sign_map(CnnModel& model, std::span<const float> x, int label);

// Sign maps for a whole dataset in one pass; labels resolved per `source`.
std::vector<int8_t> dataset_sign_maps(CnnModel& model, const Dataset& ds, LabelSource source);

// x_DI = x + alpha * s, computed in double and rounded once to f32.
// No clamping. Shapes must match.
void apply_dge(std::span<const float> x, std::span<const int8_t> s, double alpha,
               std::span<float> out);

// Resolve the label per cfg (true label requires `label` >= 0), then
// sign_map + apply_dge.
std::vector<float> make_domain_independent(CnnModel& model, std::span<const float> x, int label,
                                           const DgeConfig& cfg);

// Whole-dataset conversion used by the experiment pipeline.
Dataset convert_dataset(CnnModel& model, const Dataset& ds, const DgeConfig& cfg);
Dataset apply_dge_dataset(const Dataset& ds, const std::vector<int8_t>& signs, double alpha);

// FGSM with epsilon in place of alpha; also reports whether the argmax
// classification flipped. epsilon == 0 returns the input unchanged.
struct FgsmResult {
  std::vector<float> adversarial;
  bool flipped = false;
};
FgsmResult fgsm_adversarial(CnnModel& model, std::span<const float> x, int label, double epsilon);

// Mean cross-entropy losses per sample against the given labels (used by
// the first-order ascent checks).
std::vector<double> per_sample_domain_loss(CnnModel& model, const Dataset& ds,
                                           std::span<const uint16_t> labels);

}  // namespace di
