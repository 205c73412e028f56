#include <doctest.h>

#include <array>
#include <cstring>
#include <numeric>
#include <span>
#include <vector>

#include "di/recognizers.hpp"
#include "di/rng.hpp"
#include "di/synth.hpp"

using di::accuracy;
using di::CnnHyper;
using di::CnnKind;
using di::ConfigError;
using di::CounterRng;
using di::Dataset;
using di::KnnModel;
using di::ShapeError;
using di::SvmHyper;
using di::SvmModel;

namespace {

// 2-D labelled points as a 1x2-sample dataset (recognizers only; too
// small for the dcnn path).
Dataset points(const std::vector<std::array<float, 2>>& xs,
               const std::vector<uint16_t>& labels, int n_classes) {
  Dataset d;
  d.rows = 1;
  d.cols = 2;
  d.n_gestures = n_classes;
  d.n_domains = 1;
  d.provenance = "unit";
  for (size_t i = 0; i < xs.size(); ++i)
    d.append(std::span<const float>(xs[i].data(), 2), 0, labels[i]);
  d.validate();
  return d;
}

di::GeneratorConfig tiny_cfg(int domains, int gestures, int reps, uint64_t seed) {
  di::GeneratorConfig cfg;
  cfg.n_domains = domains;
  cfg.n_gestures = gestures;
  cfg.reps = reps;
  cfg.rows = 8;
  cfg.cols = 8;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("knn k=1 echoes exact training matches and is perfect on its own set") {
  Dataset d = points({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {0, 1, 2, 3}, 4);
  KnnModel m = di::knn_fit(d, 1);
  CHECK(m.k == 1);
  CHECK(m.dim == 2);
  for (int64_t i = 0; i < d.count(); ++i)
    CHECK(di::knn_predict(m, d.sample(i)) == d.gestures[static_cast<size_t>(i)]);
  auto preds = di::knn_predict_all(m, d);
  CHECK(accuracy(preds, d.gestures) == 1.0);
}

TEST_CASE("knn k=3 majority vote {2,2,7} -> 2") {
  Dataset d = points({{0.1f, 0}, {-0.1f, 0}, {0, 0.1f}, {5, 5}}, {2, 2, 7, 1}, 8);
  KnnModel m = di::knn_fit(d, 3);
  std::vector<float> q = {0, 0};
  CHECK(di::knn_predict(m, q) == 2);
}

TEST_CASE("knn vote ties fall back to mean distance, then label index") {
  // equal votes, equal mean distances -> smallest label
  Dataset even = points({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}, {1, 1, 2, 2}, 3);
  std::vector<float> q = {0, 0};
  CHECK(di::knn_predict(di::knn_fit(even, 4), q) == 1);

  // equal votes but class 2 sits closer -> class 2 despite larger label
  Dataset closer = points({{1, 0}, {-1, 0}, {0, 0.5f}, {0, -0.5f}}, {1, 1, 2, 2}, 3);
  CHECK(di::knn_predict(di::knn_fit(closer, 4), q) == 2);
}

TEST_CASE("knn input validation") {
  Dataset d = points({{0, 0}, {1, 1}}, {0, 1}, 2);
  CHECK_THROWS_AS(di::knn_fit(d, 3), ConfigError);   // k > train size
  CHECK_THROWS_AS(di::knn_fit(d, 0), ConfigError);
  CHECK_THROWS_AS(di::knn_fit(Dataset{}, 1), ConfigError);
  KnnModel m = di::knn_fit(d, 1);
  std::vector<float> bad = {1, 2, 3};
  CHECK_THROWS_AS(di::knn_predict(m, bad), ShapeError);
  Dataset wide = points({{0, 0}, {1, 1}}, {0, 1}, 2);
  wide.cols = 1;
  wide.samples.resize(2);
  CHECK_THROWS_AS(di::knn_predict_all(m, wide), ShapeError);
}

TEST_CASE("svm crafted decision values and tiebreaks") {
  SvmModel m;
  m.n_classes = 2;
  m.dim = 2;
  m.rows = 1;
  m.cols = 2;
  m.lambda = 1e-4;
  m.weights = {1, 0, 0, 0};  // class 0: w=[1,0]; class 1: w=0
  m.bias = {0, 0};
  std::vector<float> right = {2, 0};
  std::vector<float> left = {-2, 0};
  CHECK(di::svm_predict(m, right) == 0);  // decision +2 beats 0
  CHECK(di::svm_predict(m, left) == 1);   // decision -2 loses to 0

  // argmax is invariant under a common shift of every decision value
  SvmModel shifted = m;
  shifted.bias = {5, 5};
  CHECK(di::svm_predict(shifted, right) == di::svm_predict(m, right));
  CHECK(di::svm_predict(shifted, left) == di::svm_predict(m, left));

  SvmModel zero = m;
  zero.weights = {0, 0, 0, 0};
  zero.bias = {0, 0};
  CHECK(di::svm_predict(zero, right) == 0);  // all equal -> smallest label
}

TEST_CASE("svm separates two seeded point clouds perfectly") {
  CounterRng rng(7, "svm-clouds");
  std::vector<std::array<float, 2>> xs;
  std::vector<uint16_t> ys;
  for (int i = 0; i < 10; ++i) {
    xs.push_back({0.25f + 0.05f * static_cast<float>(rng.next_normal()),
                  0.25f + 0.05f * static_cast<float>(rng.next_normal())});
    ys.push_back(0);
    xs.push_back({0.75f + 0.05f * static_cast<float>(rng.next_normal()),
                  0.75f + 0.05f * static_cast<float>(rng.next_normal())});
    ys.push_back(1);
  }
  Dataset d = points(xs, ys, 2);
  SvmModel m = di::svm_fit(d, SvmHyper{});
  auto preds = di::svm_predict_all(m, d);
  CHECK(accuracy(preds, d.gestures) == 1.0);

  SvmModel again = di::svm_fit(d, SvmHyper{});
  REQUIRE(again.weights.size() == m.weights.size());
  CHECK(std::memcmp(again.weights.data(), m.weights.data(),
                    m.weights.size() * sizeof(float)) == 0);
  CHECK(std::memcmp(again.bias.data(), m.bias.data(), m.bias.size() * sizeof(float)) == 0);
}

TEST_CASE("svm input validation") {
  Dataset single = points({{0, 0}, {1, 1}}, {1, 1}, 2);
  CHECK_THROWS_AS(di::svm_fit(single, SvmHyper{}), ConfigError);
  CHECK_THROWS_AS(di::svm_fit(Dataset{}, SvmHyper{}), ConfigError);

  Dataset d = points({{0, 0}, {1, 1}}, {0, 1}, 2);
  SvmHyper bad;
  bad.lambda = 0.0;
  CHECK_THROWS_AS(di::svm_fit(d, bad), ConfigError);
  bad = SvmHyper{};
  bad.epochs = 0;
  CHECK_THROWS_AS(di::svm_fit(d, bad), ConfigError);

  SvmModel m = di::svm_fit(d, SvmHyper{});
  std::vector<float> wrong = {1, 2, 3};
  CHECK_THROWS_AS(di::svm_predict(m, wrong), ShapeError);
}

TEST_CASE("gesture cnn with zero epochs returns the seeded initialization") {
  Dataset ds = di::generate_dataset(tiny_cfg(2, 3, 2, 11));
  CnnHyper hp;
  hp.epochs = 0;
  hp.hidden = 8;
  hp.seed = 5;
  auto model = di::gesture_cnn_fit(ds, hp);
  CHECK(model.kind == CnnKind::gesture);
  CHECK(model.n_classes == 3);
  auto ref = di::build_dcnn(8, 8, 3, 8, false, 5);
  auto got = model.net.tensors();
  auto want = ref.tensors();
  REQUIRE(got.size() == want.size());
  for (size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].name == want[i].name);
    REQUIRE(got[i].value->numel() == want[i].value->numel());
    CHECK(std::memcmp(got[i].value->data(), want[i].value->data(),
                      static_cast<size_t>(got[i].value->numel()) * sizeof(float)) == 0);
  }
}

TEST_CASE("gesture cnn masters a noise-free single-domain subset") {
  auto cfg = tiny_cfg(1, 3, 8, 19);
  cfg.noise_sigma = 0.0;  // repetitions of a gesture are bit-identical
  Dataset ds = di::generate_dataset(cfg);
  CnnHyper hp;
  hp.epochs = 15;
  hp.learning_rate = 0.05;
  hp.batch = 4;
  hp.hidden = 8;
  hp.seed = 3;
  auto model = di::gesture_cnn_fit(ds, hp);
  CHECK(di::cnn_accuracy(model, ds) >= 0.99);
}

TEST_CASE("cnn prediction is invariant to a constant shift of all logits") {
  Dataset ds = di::generate_dataset(tiny_cfg(2, 3, 2, 23));
  CnnHyper hp;
  hp.epochs = 0;
  hp.hidden = 8;
  hp.seed = 9;
  auto model = di::gesture_cnn_fit(ds, hp);
  const std::vector<uint16_t> before = di::cnn_predict(model, ds);

  for (auto& ref : model.net.tensors())
    if (ref.name == "fc2.bias")
      for (int64_t i = 0; i < ref.value->numel(); ++i) (*ref.value)[i] += 3.25f;

  CHECK(di::cnn_predict(model, ds) == before);
}

TEST_CASE("accuracy oracles") {
  std::vector<uint16_t> truth(50, 0);
  std::vector<uint16_t> preds(50, 0);
  for (int i = 0; i < 5; ++i) preds[static_cast<size_t>(i)] = 1;
  CHECK(accuracy(preds, truth) == 0.9);
  CHECK(accuracy(truth, truth) == 1.0);
  std::vector<uint16_t> wrong(50, 2);
  CHECK(accuracy(wrong, truth) == 0.0);

  std::vector<uint16_t> empty;
  CHECK_THROWS_AS(accuracy(empty, empty), ConfigError);
  std::vector<uint16_t> three = {0, 1, 2};
  CHECK_THROWS_AS(accuracy(preds, three), ConfigError);
}

TEST_CASE("accuracy is invariant under pair permutations") {
  CounterRng rng(13, "acc-perm");
  std::vector<uint16_t> preds, truth;
  for (int i = 0; i < 40; ++i) {
    preds.push_back(static_cast<uint16_t>(rng.next_below(4)));
    truth.push_back(static_cast<uint16_t>(rng.next_below(4)));
  }
  const double base = accuracy(preds, truth);
  std::vector<int64_t> order(40);
  std::iota(order.begin(), order.end(), 0);
  di::shuffle_indices(order, rng);
  std::vector<uint16_t> p2, t2;
  for (auto idx : order) {
    p2.push_back(preds[static_cast<size_t>(idx)]);
    t2.push_back(truth[static_cast<size_t>(idx)]);
  }
  CHECK(accuracy(p2, t2) == base);
}
