#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "di/di.h"

using nlohmann::json;

namespace {

constexpr const char* kSmallCfg =
    R"({"gestures":3,"domains":2,"reps":4,"rows":8,"cols":8,"seed":7})";

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/di_capi_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

di_dataset* must_generate(const char* cfg) {
  di_dataset* ds = nullptr;
  REQUIRE(di_dataset_generate(cfg, &ds) == DI_OK);
  REQUIRE(ds != nullptr);
  return ds;
}

std::vector<float> sample_of(const di_dataset* ds, int64_t i) {
  json info;
  {
    char* text = nullptr;
    REQUIRE(di_dataset_info_json(ds, &text) == DI_OK);
    info = json::parse(text);
    di_string_free(text);
  }
  std::vector<float> out(info["rows"].get<size_t>() * info["cols"].get<size_t>());
  REQUIRE(di_dataset_sample(ds, i, out.data()) == DI_OK);
  return out;
}

di_model* small_domain_model(const di_dataset* train) {
  di_model* model = nullptr;
  REQUIRE(di_train_domain_dcnn(
              train, R"({"epochs":2,"lr":0.05,"batch":4,"hidden":8,"seed":3})",
              &model) == DI_OK);
  REQUIRE(model != nullptr);
  return model;
}

}  // namespace

TEST_CASE("version and error plumbing never return null") {
  REQUIRE(di_version() != nullptr);
  CHECK(std::strlen(di_version()) > 0);
  REQUIRE(di_last_error() != nullptr);
  di_string_free(nullptr);  // free(NULL) semantics
}

TEST_CASE("generate populates info, labels and samples deterministically") {
  di_dataset* ds = must_generate(kSmallCfg);
  CHECK(di_dataset_count(ds) == 24);

  char* text = nullptr;
  REQUIRE(di_dataset_info_json(ds, &text) == DI_OK);
  json info = json::parse(text);
  di_string_free(text);
  CHECK(info["count"] == 24);
  CHECK(info["rows"] == 8);
  CHECK(info["cols"] == 8);
  CHECK(info["gestures"] == 3);
  CHECK(info["domains"] == 2);
  CHECK(info["seed"] == 7);
  CHECK(info["provenance"].is_string());
  CHECK_FALSE(info["provenance"].get<std::string>().empty());

  std::vector<uint16_t> domains(24), gestures(24);
  REQUIRE(di_dataset_labels(ds, domains.data(), gestures.data()) == DI_OK);
  for (uint16_t d : domains) CHECK(d < 2);
  for (uint16_t g : gestures) CHECK(g < 3);
  REQUIRE(di_dataset_labels(ds, nullptr, nullptr) == DI_OK);  // both channels optional

  for (int64_t i : {int64_t{0}, int64_t{23}}) {
    auto s = sample_of(ds, i);
    for (float v : s) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
  }
  float buf[64];
  CHECK(di_dataset_sample(ds, -1, buf) == DI_ERROR_CONFIG);
  CHECK(di_dataset_sample(ds, 24, buf) == DI_ERROR_CONFIG);

  di_dataset* again = must_generate(kSmallCfg);
  for (int64_t i = 0; i < 24; ++i) {
    auto a = sample_of(ds, i);
    auto b = sample_of(again, i);
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
  }
  di_dataset_free(again);
  di_dataset_free(ds);
}

TEST_CASE("configuration strings are strictly validated") {
  di_dataset* ds = nullptr;
  CHECK(di_dataset_generate("{", &ds) == DI_ERROR_CONFIG);
  CHECK(std::strlen(di_last_error()) > 0);
  CHECK(di_dataset_generate(R"({"bogus":1})", &ds) == DI_ERROR_CONFIG);
  CHECK(di_dataset_generate(R"({"rows":4})", &ds) == DI_ERROR_CONFIG);
  CHECK(di_dataset_generate("[1,2]", &ds) == DI_ERROR_CONFIG);
  CHECK(di_dataset_generate("{}", nullptr) == DI_ERROR_CONFIG);
  CHECK(ds == nullptr);  // out-param untouched on failure
}

TEST_CASE("mixed and lodo splits through the api") {
  di_dataset* ds = must_generate(kSmallCfg);

  di_dataset* train = nullptr;
  di_dataset* test = nullptr;
  REQUIRE(di_dataset_split(ds, R"({"protocol":"mixed","train_frac":0.75,"seed":9})",
                           &train, &test) == DI_OK);
  CHECK(di_dataset_count(train) == 18);
  CHECK(di_dataset_count(test) == 6);
  di_dataset_free(train);
  di_dataset_free(test);

  train = test = nullptr;
  REQUIRE(di_dataset_split(ds, R"({"protocol":"lodo","held_domain":1})", &train, &test) ==
          DI_OK);
  CHECK(di_dataset_count(train) == 12);
  CHECK(di_dataset_count(test) == 12);
  std::vector<uint16_t> held(12);
  REQUIRE(di_dataset_labels(test, held.data(), nullptr) == DI_OK);
  for (uint16_t d : held) CHECK(d == 1);
  di_dataset_free(train);
  di_dataset_free(test);

  train = test = nullptr;
  CHECK(di_dataset_split(ds, R"({"protocol":"stratified"})", &train, &test) ==
        DI_ERROR_CONFIG);
  CHECK(di_dataset_split(ds, R"({"protocol":"lodo","held_domain":5})", &train, &test) ==
        DI_ERROR_CONFIG);
  CHECK(di_dataset_split(ds, R"({"protocol":"mixed","train_frac":1.0})", &train, &test) ==
        DI_ERROR_CONFIG);
  CHECK(train == nullptr);
  CHECK(test == nullptr);
  di_dataset_free(ds);
}

TEST_CASE("domain model, sign maps and dge conversion through the api") {
  di_dataset* ds = must_generate(kSmallCfg);
  di_model* model = small_domain_model(ds);

  char* text = nullptr;
  REQUIRE(di_model_info_json(model, &text) == DI_OK);
  json info = json::parse(text);
  di_string_free(text);
  CHECK(info["kind"] == "domain_dcnn");
  CHECK(info["classes"] == 2);

  std::vector<uint16_t> preds(24);
  REQUIRE(di_model_predict(model, ds, preds.data()) == DI_OK);
  for (uint16_t p : preds) CHECK(p < 2);
  double acc = -1;
  REQUIRE(di_model_accuracy(model, ds, &acc) == DI_OK);
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);

  di_signmap* maps = nullptr;
  REQUIRE(di_signmap_compute(model, ds, R"({"label_source":"true"})", &maps) == DI_OK);
  CHECK(di_signmap_count(maps) == 24);
  std::vector<int8_t> signs(64);
  REQUIRE(di_signmap_values(maps, 0, signs.data()) == DI_OK);
  for (int8_t v : signs) CHECK((v == -1 || v == 0 || v == 1));
  CHECK(di_signmap_values(maps, 24, signs.data()) == DI_ERROR_CONFIG);

  const double alpha = 0.1;
  di_dataset* applied = nullptr;
  REQUIRE(di_dataset_apply_dge(ds, maps, alpha, &applied) == DI_OK);
  CHECK(di_dataset_count(applied) == 24);
  for (int64_t i = 0; i < 24; ++i) {
    REQUIRE(di_signmap_values(maps, i, signs.data()) == DI_OK);
    auto x = sample_of(ds, i);
    auto y = sample_of(applied, i);
    for (size_t j = 0; j < x.size(); ++j) {
      const float want = static_cast<float>(static_cast<double>(x[j]) +
                                            alpha * static_cast<double>(signs[j]));
      CHECK(y[j] == want);
    }
  }
  std::vector<uint16_t> doms_in(24), doms_out(24);
  REQUIRE(di_dataset_labels(ds, doms_in.data(), nullptr) == DI_OK);
  REQUIRE(di_dataset_labels(applied, doms_out.data(), nullptr) == DI_OK);
  CHECK(doms_in == doms_out);

  // one-shot convert == signmap + apply
  di_dataset* converted = nullptr;
  REQUIRE(di_dataset_convert(model, ds, R"({"alpha":0.1,"label_source":"true"})",
                             &converted) == DI_OK);
  for (int64_t i = 0; i < 24; ++i) {
    auto a = sample_of(applied, i);
    auto b = sample_of(converted, i);
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
  }

  di_dataset* bad = nullptr;
  CHECK(di_dataset_convert(model, ds, R"({"label_source":"oracle"})", &bad) ==
        DI_ERROR_CONFIG);
  CHECK(di_dataset_convert(model, ds, R"({"alpha":0.0})", &bad) == DI_ERROR_CONFIG);
  CHECK(di_signmap_compute(model, ds, R"({"mode":1})", &maps) == DI_ERROR_CONFIG);
  CHECK(bad == nullptr);

  di_dataset_free(converted);
  di_dataset_free(applied);
  di_signmap_free(maps);
  di_model_free(model);
  di_dataset_free(ds);
}

TEST_CASE("recognizers fit, predict and reject junk kinds") {
  di_dataset* ds = must_generate(kSmallCfg);

  di_model* knn = nullptr;
  REQUIRE(di_fit_recognizer(ds, R"({"kind":"knn","k":1})", &knn) == DI_OK);
  double self_acc = 0;
  REQUIRE(di_model_accuracy(knn, ds, &self_acc) == DI_OK);
  CHECK(self_acc == 1.0);  // k=1 on its own training set

  di_model* svm = nullptr;
  REQUIRE(di_fit_recognizer(ds, R"({"kind":"svm","epochs":10})", &svm) == DI_OK);
  di_model* cnn = nullptr;
  REQUIRE(di_fit_recognizer(ds, R"({"kind":"cnn","epochs":0,"hidden":8})", &cnn) == DI_OK);

  char* text = nullptr;
  REQUIRE(di_model_info_json(svm, &text) == DI_OK);
  CHECK(json::parse(text)["kind"] == "svm");
  di_string_free(text);
  REQUIRE(di_model_info_json(cnn, &text) == DI_OK);
  CHECK(json::parse(text)["kind"] == "gesture_cnn");
  di_string_free(text);

  di_model* bad = nullptr;
  CHECK(di_fit_recognizer(ds, R"({"kind":"forest"})", &bad) == DI_ERROR_CONFIG);
  CHECK(di_fit_recognizer(ds, R"({"kind":"knn","k":100})", &bad) == DI_ERROR_CONFIG);
  CHECK(bad == nullptr);

  // sign maps require a domain model, not a recognizer
  di_signmap* maps = nullptr;
  CHECK(di_signmap_compute(cnn, ds, "{}", &maps) == DI_ERROR_CONFIG);

  di_model_free(knn);
  di_model_free(svm);
  di_model_free(cnn);
  di_dataset_free(ds);
}

TEST_CASE("dataset and model files round trip through the api") {
  di_dataset* ds = must_generate(kSmallCfg);
  TempFile dsf("set.diset");
  REQUIRE(di_dataset_save(ds, dsf.path.c_str()) == DI_OK);
  di_dataset* back = nullptr;
  REQUIRE(di_dataset_load(dsf.path.c_str(), &back) == DI_OK);
  REQUIRE(di_dataset_count(back) == 24);
  for (int64_t i = 0; i < 24; ++i) {
    auto a = sample_of(ds, i);
    auto b = sample_of(back, i);
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
  }
  char* ia = nullptr;
  char* ib = nullptr;
  REQUIRE(di_dataset_info_json(ds, &ia) == DI_OK);
  REQUIRE(di_dataset_info_json(back, &ib) == DI_OK);
  CHECK(std::string(ia) == ib);
  di_string_free(ia);
  di_string_free(ib);
  di_dataset_free(back);

  di_model* model = nullptr;
  REQUIRE(di_fit_recognizer(ds, R"({"kind":"knn","k":3})", &model) == DI_OK);
  TempFile mf("model.dimdl");
  REQUIRE(di_model_save(model, mf.path.c_str()) == DI_OK);
  di_model* loaded = nullptr;
  REQUIRE(di_model_load(mf.path.c_str(), &loaded) == DI_OK);
  std::vector<uint16_t> a(24), b(24);
  REQUIRE(di_model_predict(model, ds, a.data()) == DI_OK);
  REQUIRE(di_model_predict(loaded, ds, b.data()) == DI_OK);
  CHECK(a == b);
  di_model_free(loaded);
  di_model_free(model);

  di_dataset* missing = nullptr;
  CHECK(di_dataset_load("/tmp/di_capi_missing.diset", &missing) == DI_ERROR_CONFIG);
  di_model* missing_model = nullptr;
  CHECK(di_model_load("/tmp/di_capi_missing.dimdl", &missing_model) == DI_ERROR_CONFIG);
  CHECK(missing == nullptr);
  CHECK(missing_model == nullptr);
  di_dataset_free(ds);
}

TEST_CASE("a model container with mismatched tensor shapes is a runtime error") {
  // hand-written DIMDL: valid header, but conv1.weight has a bogus shape
  TempFile f("mangled.dimdl");
  json header = {
      {"arch",
       {{"kind", "domain_dcnn"},
        {"classes", 2},
        {"shape", {8, 8}},
        {"hidden", 8},
        {"strict_paper_arch", false}}},
      {"tensors", json::array({{{"name", "conv1.weight"}, {"dtype", "f32"}, {"shape", {1}}}})}};
  const std::string head = header.dump();
  FILE* fp = std::fopen(f.path.c_str(), "wb");
  REQUIRE(fp != nullptr);
  std::fwrite("DIMDL", 1, 5, fp);
  const uint16_t version = 1;
  std::fwrite(&version, sizeof(version), 1, fp);
  const uint32_t len = static_cast<uint32_t>(head.size());
  std::fwrite(&len, sizeof(len), 1, fp);
  std::fwrite(head.data(), 1, head.size(), fp);
  const float payload = 0.0f;
  std::fwrite(&payload, sizeof(payload), 1, fp);
  std::fclose(fp);

  di_model* model = nullptr;
  CHECK(di_model_load(f.path.c_str(), &model) == DI_ERROR_RUNTIME);
  CHECK(model == nullptr);
  CHECK(std::strlen(di_last_error()) > 0);
}

TEST_CASE("analysis utilities: pca, kalman, sha256") {
  di_dataset* ds = must_generate(kSmallCfg);
  std::vector<double> pc1(24), pc2(24);
  REQUIRE(di_pca_project(ds, pc1.data(), pc2.data()) == DI_OK);
  double s1 = 0, s2 = 0;
  for (int i = 0; i < 24; ++i) {
    CHECK(std::isfinite(pc1[static_cast<size_t>(i)]));
    CHECK(std::isfinite(pc2[static_cast<size_t>(i)]));
    s1 += pc1[static_cast<size_t>(i)];
    s2 += pc2[static_cast<size_t>(i)];
  }
  CHECK(std::abs(s1) < 1e-6);
  CHECK(std::abs(s2) < 1e-6);
  CHECK(di_pca_project(ds, nullptr, pc2.data()) == DI_ERROR_CONFIG);
  di_dataset_free(ds);

  const double series[5] = {3.5, 3.5, 3.5, 3.5, 3.5};
  double out[5] = {0};
  REQUIRE(di_kalman_denoise(series, 5, "{}", out) == DI_OK);
  for (double v : out) CHECK(v == 3.5);
  REQUIRE(di_kalman_denoise(series, 5, R"({"q":1e-5,"r":1e-2,"p0":1.0})", out) == DI_OK);
  CHECK(di_kalman_denoise(series, 5, R"({"q":-1})", out) == DI_ERROR_CONFIG);
  CHECK(di_kalman_denoise(series, 0, "{}", out) == DI_ERROR_CONFIG);
  CHECK(di_kalman_denoise(nullptr, 5, "{}", out) == DI_ERROR_CONFIG);

  TempFile abc("abc.txt");
  {
    FILE* fp = std::fopen(abc.path.c_str(), "wb");
    REQUIRE(fp != nullptr);
    std::fputs("abc", fp);
    std::fclose(fp);
  }
  char* hex = nullptr;
  REQUIRE(di_file_sha256(abc.path.c_str(), &hex) == DI_OK);
  CHECK(std::string(hex) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  di_string_free(hex);
  CHECK(di_file_sha256("/tmp/di_capi_nothing_here", &hex) == DI_ERROR_CONFIG);
}

TEST_CASE("null handles are rejected, not dereferenced") {
  CHECK(di_dataset_count(nullptr) == 0);
  CHECK(di_signmap_count(nullptr) == 0);
  std::vector<uint16_t> labels(1);
  CHECK(di_dataset_labels(nullptr, labels.data(), nullptr) == DI_ERROR_CONFIG);
  double acc = 0;
  CHECK(di_model_accuracy(nullptr, nullptr, &acc) == DI_ERROR_CONFIG);
  di_model* model = nullptr;
  CHECK(di_train_domain_dcnn(nullptr, "{}", &model) == DI_ERROR_CONFIG);
  CHECK(model == nullptr);
}
