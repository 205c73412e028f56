#include "di/di.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "di/ahnet.hpp"
#include "di/container.hpp"
#include "di/dataset.hpp"
#include "di/errors.hpp"
#include "di/model_io.hpp"
#include "di/pca.hpp"
#include "di/recognizers.hpp"
#include "di/signal.hpp"
#include "di/synth.hpp"

using nlohmann::json;

struct di_dataset {
  di::Dataset ds;
};

struct di_model {
  di::ModelAny m;
};

struct di_signmap {
  int64_t rows = 0, cols = 0;
  int64_t count = 0;
  std::vector<int8_t> signs;  // count * rows * cols
};

namespace {

thread_local std::string g_last_error;

template <typename F>
di_status guard(F&& f) noexcept {
  try {
    f();
    return DI_OK;
  } catch (const di::ConfigError& e) {
    g_last_error = e.what();
    return DI_ERROR_CONFIG;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DI_ERROR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown failure";
    return DI_ERROR_RUNTIME;
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw di::ConfigError(what);
}

json parse_config(const char* text, std::initializer_list<const char*> allowed) {
  if (text == nullptr || *text == '\0') return json::object();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw di::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require(j.is_object(), "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    require(known, "unknown config key: " + key);
  }
  return j;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

di::CnnHyper cnn_hyper_from(const json& j) {
  di::CnnHyper h;
  h.epochs = j.value("epochs", h.epochs);
  h.learning_rate = j.value("lr", h.learning_rate);
  h.momentum = j.value("momentum", h.momentum);
  h.batch = j.value("batch", h.batch);
  h.hidden = j.value("hidden", h.hidden);
  h.strict_paper_arch = j.value("strict_paper_arch", h.strict_paper_arch);
  h.seed = j.value("seed", h.seed);
  h.verbose = j.value("verbose", h.verbose);
  return h;
}

di::LabelSource label_source_from(const json& j) {
  const std::string s = j.value("label_source", "predicted");
  if (s == "true") return di::LabelSource::true_label;
  if (s == "predicted") return di::LabelSource::predicted_label;
  throw di::ConfigError("label_source must be \"true\" or \"predicted\", got " + s);
}

di::CnnModel& domain_model_of(const di_model* model) {
  require(model != nullptr, "null model handle");
  auto* cnn = std::get_if<di::CnnModel>(&const_cast<di_model*>(model)->m);
  require(cnn != nullptr && cnn->kind == di::CnnKind::domain,
          "operation requires a domain-classifier model");
  return *cnn;
}

const di::Dataset& dataset_of(const di_dataset* dataset) {
  require(dataset != nullptr, "null dataset handle");
  return dataset->ds;
}

di::KalmanParams kalman_from(const json& j) {
  di::KalmanParams p;
  p.process_variance = j.value("q", p.process_variance);
  p.measurement_variance = j.value("r", p.measurement_variance);
  p.initial_variance = j.value("p0", p.initial_variance);
  p.validate();
  return p;
}

}  // namespace

extern "C" {

const char* di_version(void) { return "0.1.0"; }

const char* di_last_error(void) { return g_last_error.c_str(); }

void di_string_free(char* s) { std::free(s); }

/* ---- datasets ------------------------------------------------------- */

di_status di_dataset_generate(const char* config_json, di_dataset** out) {
  return guard([&] {
    require(out != nullptr, "null out pointer");
    json j = parse_config(config_json,
                          {"gestures", "domains", "reps", "rows", "cols", "noise_sigma",
                           "gain_spread", "offset_spread", "warp_spread", "seed"});
    di::GeneratorConfig cfg;
    cfg.n_gestures = j.value("gestures", cfg.n_gestures);
    cfg.n_domains = j.value("domains", cfg.n_domains);
    cfg.reps = j.value("reps", cfg.reps);
    cfg.rows = j.value("rows", cfg.rows);
    cfg.cols = j.value("cols", cfg.cols);
    cfg.noise_sigma = j.value("noise_sigma", cfg.noise_sigma);
    cfg.gain_strength = j.value("gain_spread", cfg.gain_strength);
    cfg.offset_strength = j.value("offset_spread", cfg.offset_strength);
    cfg.warp_strength = j.value("warp_spread", cfg.warp_strength);
    cfg.seed = j.value("seed", cfg.seed);
    *out = new di_dataset{di::generate_dataset(cfg)};
  });
}

di_status di_dataset_import(const char* manifest_json, di_dataset** out) {
  return guard([&] {
    require(out != nullptr, "null out pointer");
    json j = parse_config(manifest_json,
                          {"entries", "target_cols", "kalman", "gestures", "domains"});
    require(j.contains("entries") && j["entries"].is_array() && !j["entries"].empty(),
            "import manifest needs a non-empty entries array");
    const int64_t target_cols = j.value("target_cols", int64_t{128});
    di::KalmanParams params = kalman_from(j.value("kalman", json::object()));

    di::Dataset ds;
    ds.cols = target_cols;
    ds.provenance = "imported";
    int max_domain = -1, max_gesture = -1;
    for (const auto& entry : j["entries"]) {
      require(entry.is_object() && entry.contains("path") && entry.contains("domain") &&
                  entry.contains("gesture"),
              "each import entry needs path, domain and gesture");
      const std::string path = entry["path"].get<std::string>();
      const int domain = entry["domain"].get<int>();
      const int gesture = entry["gesture"].get<int>();
      require(domain >= 0 && domain < 65536 && gesture >= 0 && gesture < 65536,
              "labels must fit in uint16");
      auto frames = di::import_ndjson(path);
      auto sample = di::frame_stream_to_sample(frames, params, target_cols);
      const int64_t rows = static_cast<int64_t>(sample.size()) / target_cols;
      if (ds.rows == 0) ds.rows = rows;
      require(rows == ds.rows, path + ": channel count " + std::to_string(rows) +
                                   " differs from earlier streams (" +
                                   std::to_string(ds.rows) + ")");
      ds.append(sample, static_cast<uint16_t>(domain), static_cast<uint16_t>(gesture));
      max_domain = std::max(max_domain, domain);
      max_gesture = std::max(max_gesture, gesture);
    }
    ds.n_domains = j.value("domains", max_domain + 1);
    ds.n_gestures = j.value("gestures", max_gesture + 1);
    ds.validate();
    *out = new di_dataset{std::move(ds)};
  });
}

di_status di_dataset_load(const char* path, di_dataset** out) {
  return guard([&] {
    require(out != nullptr && path != nullptr, "null argument");
    *out = new di_dataset{di::read_diset(path)};
  });
}

di_status di_dataset_save(const di_dataset* dataset, const char* path) {
  return guard([&] {
    require(path != nullptr, "null path");
    di::write_diset(path, dataset_of(dataset));
  });
}

di_status di_dataset_info_json(const di_dataset* dataset, char** out_json) {
  return guard([&] {
    require(out_json != nullptr, "null out pointer");
    const di::Dataset& ds = dataset_of(dataset);
    json j = {
        {"count", ds.count()},       {"rows", ds.rows},
        {"cols", ds.cols},           {"gestures", ds.n_gestures},
        {"domains", ds.n_domains},   {"seed", ds.seed},
        {"provenance", ds.provenance},
    };
    *out_json = dup_string(j.dump());
  });
}

int64_t di_dataset_count(const di_dataset* dataset) {
  return dataset ? dataset->ds.count() : 0;
}

di_status di_dataset_labels(const di_dataset* dataset, uint16_t* domains,
                            uint16_t* gestures) {
  return guard([&] {
    const di::Dataset& ds = dataset_of(dataset);
    if (domains)
      std::memcpy(domains, ds.domains.data(), ds.domains.size() * sizeof(uint16_t));
    if (gestures)
      std::memcpy(gestures, ds.gestures.data(), ds.gestures.size() * sizeof(uint16_t));
  });
}

di_status di_dataset_sample(const di_dataset* dataset, int64_t index, float* out) {
  return guard([&] {
    require(out != nullptr, "null out pointer");
    const di::Dataset& ds = dataset_of(dataset);
    require(index >= 0 && index < ds.count(), "sample index out of range");
    auto s = ds.sample(index);
    std::memcpy(out, s.data(), s.size() * sizeof(float));
  });
}

di_status di_dataset_split(const di_dataset* dataset, const char* split_json,
                           di_dataset** out_train, di_dataset** out_test) {
  return guard([&] {
    require(out_train != nullptr && out_test != nullptr, "null out pointer");
    const di::Dataset& ds = dataset_of(dataset);
    json j = parse_config(split_json, {"protocol", "train_frac", "held_domain", "seed"});
    const std::string protocol = j.value("protocol", "mixed");
    di::SplitProtocol split;
    if (protocol == "mixed") {
      di::MixedSplit m;
      m.train_frac = j.value("train_frac", m.train_frac);
      m.seed = j.value("seed", m.seed);
      split = m;
    } else if (protocol == "lodo") {
      di::LodoSplit l;
      l.held_domain = j.value("held_domain", l.held_domain);
      split = l;
    } else {
      throw di::ConfigError("protocol must be \"mixed\" or \"lodo\", got " + protocol);
    }
    auto [train, test] = di::split_dataset(ds, split);
    *out_train = new di_dataset{std::move(train)};
    *out_test = new di_dataset{std::move(test)};
  });
}

void di_dataset_free(di_dataset* dataset) { delete dataset; }

/* ---- models --------------------------------------------------------- */

di_status di_train_domain_dcnn(const di_dataset* train, const char* hyper_json,
                               di_model** out) {
  return guard([&] {
    require(out != nullptr, "null out pointer");
    json j = parse_config(hyper_json, {"epochs", "lr", "momentum", "batch", "hidden",
                                       "strict_paper_arch", "seed", "verbose"});
    auto model = di::train_domain_dcnn(dataset_of(train), cnn_hyper_from(j));
    *out = new di_model{std::move(model)};
  });
}

di_status di_fit_recognizer(const di_dataset* train, const char* config_json,
                            di_model** out) {
  return guard([&] {
    require(out != nullptr, "null out pointer");
    json j = parse_config(config_json,
                          {"kind", "k", "lambda", "epochs", "lr", "momentum", "batch",
                           "hidden", "strict_paper_arch", "seed", "verbose"});
    const std::string kind = j.value("kind", "knn");
    const di::Dataset& ds = dataset_of(train);
    if (kind == "knn") {
      *out = new di_model{di::knn_fit(ds, j.value("k", 5))};
    } else if (kind == "svm") {
      di::SvmHyper h;
      h.lambda = j.value("lambda", h.lambda);
      h.epochs = j.value("epochs", h.epochs);
      h.learning_rate = j.value("lr", h.learning_rate);
      h.seed = j.value("seed", h.seed);
      *out = new di_model{di::svm_fit(ds, h)};
    } else if (kind == "cnn") {
      *out = new di_model{di::gesture_cnn_fit(ds, cnn_hyper_from(j))};
    } else {
      throw di::ConfigError("recognizer kind must be knn, svm or cnn, got " + kind);
    }
  });
}

di_status di_model_load(const char* path, di_model** out) {
  return guard([&] {
    require(out != nullptr && path != nullptr, "null argument");
    *out = new di_model{di::load_model(path)};
  });
}

di_status di_model_save(const di_model* model, const char* path) {
  return guard([&] {
    require(model != nullptr && path != nullptr, "null argument");
    di::save_model(path, model->m);
  });
}

di_status di_model_info_json(const di_model* model, char** out_json) {
  return guard([&] {
    require(model != nullptr && out_json != nullptr, "null argument");
    json j;
    if (const auto* cnn = std::get_if<di::CnnModel>(&model->m)) {
      j = {{"kind", cnn->kind == di::CnnKind::domain ? "domain_dcnn" : "gesture_cnn"},
           {"classes", cnn->n_classes},
           {"rows", cnn->rows},
           {"cols", cnn->cols},
           {"hidden", cnn->hidden},
           {"strict_paper_arch", cnn->strict_paper_arch}};
    } else if (const auto* knn = std::get_if<di::KnnModel>(&model->m)) {
      j = {{"kind", "knn"},
           {"classes", knn->n_classes},
           {"rows", knn->rows},
           {"cols", knn->cols},
           {"k", knn->k},
           {"train_size", knn->size()}};
    } else {
      const auto& svm = std::get<di::SvmModel>(model->m);
      j = {{"kind", "svm"},
           {"classes", svm.n_classes},
           {"rows", svm.rows},
           {"cols", svm.cols},
           {"lambda", svm.lambda}};
    }
    *out_json = dup_string(j.dump());
  });
}

namespace {

std::vector<uint16_t> predict_any(di::ModelAny& m, const di::Dataset& ds) {
  if (auto* cnn = std::get_if<di::CnnModel>(&m)) {
    require(ds.rows == cnn->rows && ds.cols == cnn->cols,
            "dataset shape does not match the model");
    return di::cnn_predict(*cnn, ds);
  }
  if (auto* knn = std::get_if<di::KnnModel>(&m)) {
    require(ds.sample_size() == knn->dim, "dataset shape does not match the model");
    return di::knn_predict_all(*knn, ds);
  }
  auto& svm = std::get<di::SvmModel>(m);
  require(ds.sample_size() == svm.dim, "dataset shape does not match the model");
  return di::svm_predict_all(svm, ds);
}

}  // namespace

di_status di_model_predict(const di_model* model, const di_dataset* dataset,
                           uint16_t* out_labels) {
  return guard([&] {
    require(model != nullptr && out_labels != nullptr, "null argument");
    const di::Dataset& ds = dataset_of(dataset);
    auto pred = predict_any(const_cast<di_model*>(model)->m, ds);
    std::memcpy(out_labels, pred.data(), pred.size() * sizeof(uint16_t));
  });
}

di_status di_model_accuracy(const di_model* model, const di_dataset* dataset,
                            double* out_accuracy) {
  return guard([&] {
    require(model != nullptr && out_accuracy != nullptr, "null argument");
    const di::Dataset& ds = dataset_of(dataset);
    auto& m = const_cast<di_model*>(model)->m;
    auto pred = predict_any(m, ds);
    const auto* cnn = std::get_if<di::CnnModel>(&m);
    const auto& truth = (cnn && cnn->kind == di::CnnKind::domain) ? ds.domains : ds.gestures;
    *out_accuracy = di::accuracy(pred, truth);
  });
}

void di_model_free(di_model* model) { delete model; }

/* ---- domain-gap elimination ----------------------------------------- */

di_status di_signmap_compute(const di_model* domain_model, const di_dataset* dataset,
                             const char* opts_json, di_signmap** out) {
  return guard([&] {
    require(out != nullptr, "null out pointer");
    json j = parse_config(opts_json, {"label_source"});
    di::CnnModel& model = domain_model_of(domain_model);
    const di::Dataset& ds = dataset_of(dataset);
    require(ds.rows == model.rows && ds.cols == model.cols,
            "dataset shape does not match the model");
    auto signs = di::dataset_sign_maps(model, ds, label_source_from(j));
    *out = new di_signmap{ds.rows, ds.cols, ds.count(), std::move(signs)};
  });
}

int64_t di_signmap_count(const di_signmap* maps) { return maps ? maps->count : 0; }

di_status di_signmap_values(const di_signmap* maps, int64_t index, int8_t* out) {
  return guard([&] {
    require(maps != nullptr && out != nullptr, "null argument");
    require(index >= 0 && index < maps->count, "sign map index out of range");
    const int64_t n = maps->rows * maps->cols;
    std::memcpy(out, maps->signs.data() + index * n, static_cast<size_t>(n));
  });
}

di_status di_dataset_apply_dge(const di_dataset* dataset, const di_signmap* maps,
                               double alpha, di_dataset** out) {
  return guard([&] {
    require(out != nullptr && maps != nullptr, "null argument");
    const di::Dataset& ds = dataset_of(dataset);
    require(maps->rows == ds.rows && maps->cols == ds.cols && maps->count == ds.count(),
            "sign maps do not match the dataset");
    *out = new di_dataset{di::apply_dge_dataset(ds, maps->signs, alpha)};
  });
}

di_status di_dataset_convert(const di_model* domain_model, const di_dataset* dataset,
                             const char* opts_json, di_dataset** out) {
  return guard([&] {
    require(out != nullptr, "null out pointer");
    json j = parse_config(opts_json, {"alpha", "label_source"});
    di::DgeConfig cfg;
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.label_source = label_source_from(j);
    di::CnnModel& model = domain_model_of(domain_model);
    *out = new di_dataset{di::convert_dataset(model, dataset_of(dataset), cfg)};
  });
}

void di_signmap_free(di_signmap* maps) { delete maps; }

/* ---- analysis utilities --------------------------------------------- */

di_status di_pca_project(const di_dataset* dataset, double* pc1, double* pc2) {
  return guard([&] {
    require(pc1 != nullptr && pc2 != nullptr, "null out pointer");
    const di::Dataset& ds = dataset_of(dataset);
    auto res = di::pca2(ds);
    std::memcpy(pc1, res.pc1.data(), res.pc1.size() * sizeof(double));
    std::memcpy(pc2, res.pc2.data(), res.pc2.size() * sizeof(double));
  });
}

di_status di_kalman_denoise(const double* series, int64_t n, const char* params_json,
                            double* out) {
  return guard([&] {
    require(series != nullptr && out != nullptr, "null argument");
    require(n >= 1, "series must be non-empty");
    json j = parse_config(params_json, {"q", "r", "p0"});
    di::KalmanParams params = kalman_from(j);
    std::vector<float> in(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) in[static_cast<size_t>(i)] = static_cast<float>(series[i]);
    auto filtered = di::kalman_denoise(in, params);
    for (int64_t i = 0; i < n; ++i) out[i] = filtered[static_cast<size_t>(i)];
  });
}

di_status di_file_sha256(const char* path, char** out_hex) {
  return guard([&] {
    require(path != nullptr && out_hex != nullptr, "null argument");
    *out_hex = dup_string(di::sha256_file_hex(path));
  });
}

}  // extern "C"
