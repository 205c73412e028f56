#include "di/model_io.hpp"

#include "di/container.hpp"

namespace di {

namespace {

nlohmann::json shape_json(int64_t rows, int64_t cols) {
  return nlohmann::json::array({rows, cols});
}

}  // namespace

void save_model(const std::string& path, const CnnModel& model) {
  std::vector<NamedTensorF> tensors;
  // const_cast: collecting tensor refs does not modify the network
  auto& net = const_cast<Network<float>&>(model.net);
  for (const auto& ref : net.tensors())
    tensors.push_back({ref.name, ref.value->shape(),
                       std::vector<float>(ref.value->data(), ref.value->data() + ref.value->numel())});
  nlohmann::json arch = {
      {"kind", model.kind == CnnKind::domain ? "domain_dcnn" : "gesture_cnn"},
      {"classes", model.n_classes},
      {"shape", shape_json(model.rows, model.cols)},
      {"hidden", model.hidden},
      {"strict_paper_arch", model.strict_paper_arch},
  };
  write_dimdl(path, tensors, &arch);
}

void save_model(const std::string& path, const KnnModel& model) {
  std::vector<NamedTensorF> tensors;
  tensors.push_back({"train_data", {model.size(), model.dim}, model.train_data});
  std::vector<float> labels(model.train_labels.begin(), model.train_labels.end());
  tensors.push_back({"train_labels", {model.size()}, std::move(labels)});
  nlohmann::json arch = {
      {"kind", "knn"},
      {"classes", model.n_classes},
      {"shape", shape_json(model.rows, model.cols)},
      {"k", model.k},
  };
  write_dimdl(path, tensors, &arch);
}

void save_model(const std::string& path, const SvmModel& model) {
  std::vector<NamedTensorF> tensors;
  tensors.push_back({"weights", {model.n_classes, model.dim}, model.weights});
  tensors.push_back({"bias", {model.n_classes}, model.bias});
  nlohmann::json arch = {
      {"kind", "svm"},
      {"classes", model.n_classes},
      {"shape", shape_json(model.rows, model.cols)},
      {"lambda", model.lambda},
  };
  write_dimdl(path, tensors, &arch);
}

void save_model(const std::string& path, const ModelAny& model) {
  std::visit([&](const auto& m) { save_model(path, m); }, model);
}

ModelAny load_model(const std::string& path) {
  DimdlFile file = read_dimdl(path);
  if (file.arch.is_null()) throw ConfigError(path + " carries no model architecture block");
  const std::string kind = file.arch.at("kind").get<std::string>();
  const auto shape = file.arch.at("shape").get<std::vector<int64_t>>();
  if (shape.size() != 2) throw ConfigError(path + ": model shape must have 2 dims");
  const int classes = file.arch.at("classes").get<int>();

  auto tensor = [&](const std::string& name) -> NamedTensorF& {
    for (auto& t : file.tensors)
      if (t.name == name) return t;
    throw ConfigError(path + ": missing tensor " + name);
  };

  if (kind == "domain_dcnn" || kind == "gesture_cnn") {
    CnnModel m;
    m.kind = (kind == "domain_dcnn") ? CnnKind::domain : CnnKind::gesture;
    m.rows = shape[0];
    m.cols = shape[1];
    m.n_classes = classes;
    m.hidden = file.arch.value("hidden", 128);
    m.strict_paper_arch = file.arch.value("strict_paper_arch", false);
    m.net = build_dcnn(m.rows, m.cols, m.n_classes, m.hidden, m.strict_paper_arch, /*seed=*/0);
    ParamSet<float> ps;
    for (auto& t : file.tensors) ps.add(t.name, Tensor<float>(t.shape, std::move(t.data)));
    m.net.load(ps);
    return m;
  }
  if (kind == "knn") {
    KnnModel m;
    m.k = file.arch.at("k").get<int>();
    m.rows = shape[0];
    m.cols = shape[1];
    m.dim = m.rows * m.cols;
    m.n_classes = classes;
    auto& data = tensor("train_data");
    if (data.shape.size() != 2 || data.shape[1] != m.dim)
      throw ConfigError(path + ": knn train_data shape mismatch");
    m.train_data = std::move(data.data);
    auto& labels = tensor("train_labels");
    m.train_labels.reserve(labels.data.size());
    for (float v : labels.data) m.train_labels.push_back(static_cast<uint16_t>(v));
    if (m.k < 1 || m.k > m.size()) throw ConfigError(path + ": knn k out of range");
    return m;
  }
  if (kind == "svm") {
    SvmModel m;
    m.rows = shape[0];
    m.cols = shape[1];
    m.dim = m.rows * m.cols;
    m.n_classes = classes;
    m.lambda = file.arch.value("lambda", 0.0);
    auto& w = tensor("weights");
    if (w.shape.size() != 2 || w.shape[0] != classes || w.shape[1] != m.dim)
      throw ConfigError(path + ": svm weights shape mismatch");
    m.weights = std::move(w.data);
    m.bias = std::move(tensor("bias").data);
    if (static_cast<int>(m.bias.size()) != classes)
      throw ConfigError(path + ": svm bias shape mismatch");
    return m;
  }
  throw ConfigError(path + ": unknown model kind " + kind);
}

const char* model_kind_name(const ModelAny& model) {
  if (const auto* cnn = std::get_if<CnnModel>(&model))
    return cnn->kind == CnnKind::domain ? "domain_dcnn" : "gesture_cnn";
  if (std::holds_alternative<KnnModel>(model)) return "knn";
  return "svm";
}

}  // namespace di
