// Experiment harness for the domain-independent gesture recognition
// library. Everything model/data related goes through the public C API.
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "di/di.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(di_status st) {
  std::cerr << "error: " << di_last_error() << "\n";
  std::exit(static_cast<int>(st));
}

void check(di_status st) {
  if (st != DI_OK) fail(st);
}

[[noreturn]] void fail_config(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  std::exit(2);
}

template <typename T, void (*FreeFn)(T*)>
struct Handle {
  T* h = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& other) noexcept : h(other.h) { other.h = nullptr; }
  Handle& operator=(Handle&& other) noexcept {
    std::swap(h, other.h);
    return *this;
  }
  ~Handle() {
    if (h) FreeFn(h);
  }
  T** out() {
    if (h) {
      FreeFn(h);
      h = nullptr;
    }
    return &h;
  }
  operator T*() const { return h; }
  explicit operator bool() const { return h != nullptr; }
};

using DatasetH = Handle<di_dataset, di_dataset_free>;
using ModelH = Handle<di_model, di_model_free>;

// Shortest round-trip decimal form, locale independent.
std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string file_sha256(const std::string& path) {
  char* hex = nullptr;
  check(di_file_sha256(path.c_str(), &hex));
  std::string out(hex);
  di_string_free(hex);
  return out;
}

json dataset_info(di_dataset* ds) {
  char* text = nullptr;
  check(di_dataset_info_json(ds, &text));
  json j = json::parse(text);
  di_string_free(text);
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_config("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) {
    std::cerr << "error: write failed for " << path << "\n";
    std::exit(3);
  }
}

void write_manifest(const fs::path& dir, json manifest,
                    const std::vector<fs::path>& artifacts) {
  json hashes = json::object();
  for (const auto& p : artifacts) hashes[p.filename().string()] = file_sha256(p.string());
  manifest["version"] = di_version();
  manifest["artifacts"] = hashes;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// ---------------------------------------------------------------------------
// shared flag groups

struct GenFlags {
  int gestures = 10, domains = 10, reps = 20;
  int64_t rows = 90, cols = 128;
  double noise_sigma = 0.05, gain_spread = 0.25, offset_spread = 2.2, warp_spread = 0.05;

  json to_json(uint64_t seed) const {
    return {{"gestures", gestures},         {"domains", domains},
            {"reps", reps},                 {"rows", rows},
            {"cols", cols},                 {"noise_sigma", noise_sigma},
            {"gain_spread", gain_spread},   {"offset_spread", offset_spread},
            {"warp_spread", warp_spread},   {"seed", seed}};
  }
};

void add_gen_flags(CLI::App* cmd, GenFlags& g) {
  cmd->add_option("--gestures", g.gestures, "gesture classes (M)");
  cmd->add_option("--domains", g.domains, "domain classes (N)");
  cmd->add_option("--reps", g.reps, "samples per (gesture, domain) cell");
  cmd->add_option("--rows", g.rows, "channels per sample");
  cmd->add_option("--cols", g.cols, "time steps per sample");
  cmd->add_option("--noise-sigma", g.noise_sigma, "additive noise sigma");
  cmd->add_option("--gain-spread", g.gain_spread, "per-domain channel gain spread");
  cmd->add_option("--offset-spread", g.offset_spread, "per-domain channel offset spread");
  cmd->add_option("--warp-spread", g.warp_spread, "per-domain temporal warp spread");
}

struct TrainFlags {
  int epochs = 6;
  int domain_epochs = 0;  // 0: follow --epochs
  double lr = 0.02, momentum = 0.9;
  int batch = 32, hidden = 128;
  bool strict_paper_arch = false;
  bool verbose = false;

  json to_json(uint64_t seed) const {
    return {{"epochs", epochs},
            {"lr", lr},
            {"momentum", momentum},
            {"batch", batch},
            {"hidden", hidden},
            {"strict_paper_arch", strict_paper_arch},
            {"seed", seed},
            {"verbose", verbose}};
  }
  json domain_to_json(uint64_t seed) const {
    json j = to_json(seed);
    if (domain_epochs > 0) j["epochs"] = domain_epochs;
    return j;
  }
};

void add_train_flags(CLI::App* cmd, TrainFlags& t) {
  cmd->add_option("--epochs", t.epochs, "training epochs (domain model and CNN recognizer)");
  cmd->add_option("--domain-epochs", t.domain_epochs,
                  "override epochs for the domain model only (0: same as --epochs)");
  cmd->add_option("--lr", t.lr, "SGD learning rate");
  cmd->add_option("--momentum", t.momentum, "SGD momentum");
  cmd->add_option("--batch", t.batch, "minibatch size");
  cmd->add_option("--hidden", t.hidden, "hidden fully-connected width");
  cmd->add_flag("--strict-paper-arch", t.strict_paper_arch,
                "sigmoid on the output layer as printed in the paper");
  cmd->add_flag("-v,--verbose", t.verbose, "per-epoch training log on stderr");
}

struct ReportRow {
  std::string protocol, recognizer;
  double alpha = 0.0;
  bool with_dge = false;
  double accuracy = 0.0;
  double domain_acc_on_inputs = 0.0;
};

void write_report_csv(const fs::path& path, const std::vector<ReportRow>& rows) {
  std::string text =
      "protocol,recognizer,alpha,with_dge,accuracy,domain_classifier_accuracy_on_inputs\n";
  for (const auto& r : rows) {
    text += r.protocol + "," + r.recognizer + "," + fmt(r.alpha) + "," +
            (r.with_dge ? "true" : "false") + "," + fmt(r.accuracy) + "," +
            fmt(r.domain_acc_on_inputs) + "\n";
  }
  write_text(path, text);
}

// ---------------------------------------------------------------------------
// experiment pipeline shared by `run` and `sweep-alpha`

struct PipelineFlags {
  std::string data;  // DISET path; empty -> generate benchmark
  std::string out;
  uint64_t seed = 42;
  GenFlags gen;
  TrainFlags train;
  std::string protocol = "lodo";
  double train_frac = 0.8;
  int held_domain = 0;
  std::string recognizer = "cnn";
  std::string label_source = "predicted";
  int k = 5;
  double lambda = 1e-4;
  bool save_converted = false;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& p) {
  cmd->add_option("--data", p.data, "input DISET file (default: generate the benchmark)");
  cmd->add_option("--out", p.out, "output directory")->required();
  cmd->add_option("--seed", p.seed, "seed for generation, split and training");
  add_gen_flags(cmd, p.gen);
  add_train_flags(cmd, p.train);
  cmd->add_option("--protocol", p.protocol, "evaluation protocol")
      ->check(CLI::IsMember({"mixed", "lodo"}));
  cmd->add_option("--train-frac", p.train_frac, "train fraction for the mixed protocol");
  cmd->add_option("--held-domain", p.held_domain, "held-out domain for the lodo protocol");
  cmd->add_option("--recognizer", p.recognizer, "gesture recognizer")
      ->check(CLI::IsMember({"knn", "svm", "cnn"}));
  cmd->add_option("--label-source", p.label_source,
                  "domain label source for test-set conversion")
      ->check(CLI::IsMember({"true", "predicted"}));
  cmd->add_option("--k", p.k, "KNN neighbour count");
  cmd->add_option("--lambda", p.lambda, "SVM L2 regularization");
  cmd->add_flag("--save-converted", p.save_converted,
                "also write the DGE-converted train/test DISET files");
}

json recognizer_config(const PipelineFlags& p) {
  if (p.recognizer == "knn") return {{"kind", "knn"}, {"k", p.k}};
  if (p.recognizer == "svm")
    return {{"kind", "svm"}, {"lambda", p.lambda}, {"seed", p.seed}};
  json j = p.train.to_json(p.seed);
  j["kind"] = "cnn";
  return j;
}

json split_config(const PipelineFlags& p) {
  if (p.protocol == "mixed")
    return {{"protocol", "mixed"}, {"train_frac", p.train_frac}, {"seed", p.seed}};
  return {{"protocol", "lodo"}, {"held_domain", p.held_domain}};
}

struct Pipeline {
  DatasetH data, train, test;
  ModelH domain_model;
  json config;          // echoed into the manifest
  json timings = json::object();
  std::string data_note;

  void prepare(const PipelineFlags& p) {
    if (!p.data.empty()) {
      check(di_dataset_load(p.data.c_str(), data.out()));
      data_note = p.data;
    } else {
      check(di_dataset_generate(p.gen.to_json(p.seed).dump().c_str(), data.out()));
      data_note = "generated";
    }
    check(di_dataset_split(data, split_config(p).dump().c_str(), train.out(), test.out()));
    json info = dataset_info(data);
    std::cerr << "dataset: " << info["count"] << " samples, "
              << di_dataset_count(train) << " train / " << di_dataset_count(test)
              << " test\n";

    double t0 = now_ms();
    check(di_train_domain_dcnn(train, p.train.domain_to_json(p.seed).dump().c_str(),
                               domain_model.out()));
    timings["train_domain_ms"] = now_ms() - t0;
  }

  // One experiment at a given alpha. Returns the report row; fills
  // conv_train/conv_test when DGE is applied.
  ReportRow evaluate(const PipelineFlags& p, double alpha, bool with_dge,
                     DatasetH* conv_train_out = nullptr,
                     DatasetH* conv_test_out = nullptr) {
    DatasetH conv_train, conv_test;
    di_dataset* fit_set = train;
    di_dataset* eval_set = test;
    if (with_dge) {
      json train_opts = {{"alpha", alpha}, {"label_source", "true"}};
      json test_opts = {{"alpha", alpha}, {"label_source", p.label_source}};
      double t0 = now_ms();
      check(di_dataset_convert(domain_model, train, train_opts.dump().c_str(),
                               conv_train.out()));
      check(di_dataset_convert(domain_model, test, test_opts.dump().c_str(),
                               conv_test.out()));
      timings["convert_ms"] = now_ms() - t0;
      fit_set = conv_train;
      eval_set = conv_test;
    }

    double t0 = now_ms();
    ModelH rec;
    check(di_fit_recognizer(fit_set, recognizer_config(p).dump().c_str(), rec.out()));
    timings["fit_recognizer_ms"] = now_ms() - t0;

    ReportRow row;
    row.protocol = p.protocol;
    row.recognizer = p.recognizer;
    row.alpha = alpha;
    row.with_dge = with_dge;
    check(di_model_accuracy(rec, eval_set, &row.accuracy));
    check(di_model_accuracy(domain_model, eval_set, &row.domain_acc_on_inputs));

    if (with_dge && conv_train_out) *conv_train_out = std::move(conv_train);
    if (with_dge && conv_test_out) *conv_test_out = std::move(conv_test);
    last_recognizer = std::move(rec);
    return row;
  }

  ModelH last_recognizer;
};

int cmd_run(PipelineFlags& p, double alpha, bool use_dge, bool with_baseline) {
  fs::create_directories(p.out);
  const fs::path dir = p.out;
  double t_start = now_ms();

  Pipeline pipe;
  pipe.prepare(p);

  std::vector<ReportRow> rows;
  double baseline_acc = -1.0;
  if (with_baseline || !use_dge) {
    ReportRow base = pipe.evaluate(p, alpha, false);
    baseline_acc = base.accuracy;
    rows.push_back(base);
  }
  DatasetH conv_train, conv_test;
  if (use_dge) {
    rows.push_back(pipe.evaluate(p, alpha, true, &conv_train, &conv_test));
  }

  std::vector<fs::path> artifacts;
  write_report_csv(dir / "report.csv", rows);
  artifacts.push_back(dir / "report.csv");
  check(di_model_save(pipe.domain_model, (dir / "domain_model.dimdl").string().c_str()));
  artifacts.push_back(dir / "domain_model.dimdl");
  check(di_model_save(pipe.last_recognizer, (dir / "recognizer.dimdl").string().c_str()));
  artifacts.push_back(dir / "recognizer.dimdl");
  if (p.save_converted && conv_train) {
    check(di_dataset_save(conv_train, (dir / "train_di.diset").string().c_str()));
    check(di_dataset_save(conv_test, (dir / "test_di.diset").string().c_str()));
    artifacts.push_back(dir / "train_di.diset");
    artifacts.push_back(dir / "test_di.diset");
  }

  json results = json::object();
  const ReportRow& main_row = rows.back();
  results["accuracy"] = main_row.accuracy;
  results["domain_classifier_accuracy_on_inputs"] = main_row.domain_acc_on_inputs;
  results["with_dge"] = main_row.with_dge;
  if (with_baseline && use_dge) {
    results["baseline_accuracy"] = baseline_acc;
    results["dge_margin"] = main_row.accuracy - baseline_acc;
  }
  pipe.timings["total_ms"] = now_ms() - t_start;

  json manifest = {{"command", "run"},
                   {"config",
                    {{"data", pipe.data_note},
                     {"seed", p.seed},
                     {"generator", p.gen.to_json(p.seed)},
                     {"split", split_config(p)},
                     {"training", p.train.to_json(p.seed)},
                     {"domain_training", p.train.domain_to_json(p.seed)},
                     {"recognizer", recognizer_config(p)},
                     {"alpha", alpha},
                     {"with_dge", use_dge},
                     {"label_source", p.label_source}}},
                   {"results", results},
                   {"timings", pipe.timings}};
  write_manifest(dir, manifest, artifacts);

  for (const auto& r : rows)
    std::cout << "protocol=" << r.protocol << " recognizer=" << r.recognizer
              << " alpha=" << fmt(r.alpha) << " with_dge=" << (r.with_dge ? "true" : "false")
              << " accuracy=" << fmt(r.accuracy)
              << " domain_accuracy_on_inputs=" << fmt(r.domain_acc_on_inputs) << "\n";
  return 0;
}

int cmd_sweep(PipelineFlags& p, double alpha_min, double alpha_max, double alpha_step) {
  if (!(alpha_min > 0) || !(alpha_max >= alpha_min) || !(alpha_step > 0))
    fail_config("sweep grid must satisfy 0 < alpha-min <= alpha-max and alpha-step > 0");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    double a = std::round((alpha_min + i * alpha_step) * 1e9) / 1e9;
    if (a > alpha_max + 1e-9) break;
    grid.push_back(a);
  }

  fs::create_directories(p.out);
  const fs::path dir = p.out;
  double t_start = now_ms();

  Pipeline pipe;
  pipe.prepare(p);

  std::vector<ReportRow> rows;
  for (double a : grid) {
    rows.push_back(pipe.evaluate(p, a, true));
    std::cerr << "alpha=" << fmt(a) << " accuracy=" << fmt(rows.back().accuracy)
              << " domain_accuracy_on_inputs=" << fmt(rows.back().domain_acc_on_inputs)
              << "\n";
  }

  std::vector<fs::path> artifacts;
  write_report_csv(dir / "report.csv", rows);
  artifacts.push_back(dir / "report.csv");
  check(di_model_save(pipe.domain_model, (dir / "domain_model.dimdl").string().c_str()));
  artifacts.push_back(dir / "domain_model.dimdl");

  double best_alpha = grid.front(), best_acc = -1.0;
  for (const auto& r : rows)
    if (r.accuracy > best_acc) {
      best_acc = r.accuracy;
      best_alpha = r.alpha;
    }
  pipe.timings["total_ms"] = now_ms() - t_start;

  json manifest = {{"command", "sweep-alpha"},
                   {"config",
                    {{"data", pipe.data_note},
                     {"seed", p.seed},
                     {"generator", p.gen.to_json(p.seed)},
                     {"split", split_config(p)},
                     {"training", p.train.to_json(p.seed)},
                     {"domain_training", p.train.domain_to_json(p.seed)},
                     {"recognizer", recognizer_config(p)},
                     {"alpha_grid", {{"min", alpha_min}, {"max", alpha_max}, {"step", alpha_step}}},
                     {"label_source", p.label_source}}},
                   {"results", {{"rows", rows.size()}, {"best_alpha", best_alpha}, {"best_accuracy", best_acc}}},
                   {"timings", pipe.timings}};
  write_manifest(dir, manifest, artifacts);

  std::cout << "rows=" << rows.size() << " best_alpha=" << fmt(best_alpha)
            << " best_accuracy=" << fmt(best_acc) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_synth(const GenFlags& g, uint64_t seed, const std::string& out) {
  DatasetH ds;
  check(di_dataset_generate(g.to_json(seed).dump().c_str(), ds.out()));
  check(di_dataset_save(ds, out.c_str()));
  json manifest = {{"command", "synth"}, {"config", g.to_json(seed)}};
  manifest["version"] = di_version();
  manifest["artifacts"] = {{fs::path(out).filename().string(), file_sha256(out)}};
  write_text(out + ".manifest.json", manifest.dump(2) + "\n");
  std::cout << di_dataset_count(ds) << " samples -> " << out << "\n";
  return 0;
}

int cmd_import(const std::string& manifest_path, std::string out, int64_t target_cols,
               double q, double r, double p0, int gestures, int domains) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) fail_config("cannot open " + manifest_path);
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    fail_config(manifest_path + " is not valid JSON: " + e.what());
  }
  if (m.is_array()) m = json{{"entries", m}};  // bare entry list is accepted
  if (!m.contains("entries")) fail_config(manifest_path + " lacks an entries array");

  // Relative stream paths are resolved against the manifest location.
  const fs::path base = fs::path(manifest_path).parent_path();
  for (auto& e : m["entries"]) {
    if (!e.contains("path")) continue;
    fs::path pth = e["path"].get<std::string>();
    if (pth.is_relative()) e["path"] = (base / pth).string();
  }
  if (target_cols > 0) m["target_cols"] = target_cols;
  m["kalman"] = {{"q", q}, {"r", r}, {"p0", p0}};
  if (gestures > 0) m["gestures"] = gestures;
  if (domains > 0) m["domains"] = domains;

  DatasetH ds;
  check(di_dataset_import(m.dump().c_str(), ds.out()));
  check(di_dataset_save(ds, out.c_str()));
  json manifest = {{"command", "import"}, {"config", m}};
  manifest["version"] = di_version();
  manifest["artifacts"] = {{fs::path(out).filename().string(), file_sha256(out)}};
  write_text(out + ".manifest.json", manifest.dump(2) + "\n");
  std::cout << di_dataset_count(ds) << " samples -> " << out << "\n";
  return 0;
}

int cmd_export_embedding(const std::string& data, const std::string& out_dir,
                         const std::string& model_path, double alpha,
                         const std::string& label_source) {
  DatasetH ds;
  check(di_dataset_load(data.c_str(), ds.out()));
  DatasetH converted;
  if (!model_path.empty()) {
    ModelH model;
    check(di_model_load(model_path.c_str(), model.out()));
    json opts = {{"alpha", alpha}, {"label_source", label_source}};
    check(di_dataset_convert(model, ds, opts.dump().c_str(), converted.out()));
  }
  di_dataset* target = converted ? converted : static_cast<di_dataset*>(ds);

  const int64_t n = di_dataset_count(target);
  std::vector<double> pc1(static_cast<size_t>(n)), pc2(static_cast<size_t>(n));
  check(di_pca_project(target, pc1.data(), pc2.data()));
  std::vector<uint16_t> dom(static_cast<size_t>(n)), ges(static_cast<size_t>(n));
  check(di_dataset_labels(target, dom.data(), ges.data()));

  fs::create_directories(out_dir);
  const fs::path dir = out_dir;
  std::string csv = "sample_id,gesture,domain,pc1,pc2\n";
  for (int64_t i = 0; i < n; ++i) {
    size_t s = static_cast<size_t>(i);
    csv += std::to_string(i) + "," + std::to_string(ges[s]) + "," + std::to_string(dom[s]) +
           "," + fmt(pc1[s]) + "," + fmt(pc2[s]) + "\n";
  }
  write_text(dir / "embedding.csv", csv);

  json manifest = {{"command", "export-embedding"},
                   {"config",
                    {{"data", data},
                     {"model", model_path},
                     {"alpha", alpha},
                     {"label_source", label_source},
                     {"converted", !model_path.empty()}}}};
  write_manifest(dir, manifest, {dir / "embedding.csv"});
  std::cout << n << " rows -> " << (dir / "embedding.csv").string() << "\n";
  return 0;
}

int cmd_eval_domain(const std::string& model_path, const std::string& data, bool convert,
                    double alpha, const std::string& label_source,
                    const std::string& out_dir) {
  ModelH model;
  check(di_model_load(model_path.c_str(), model.out()));
  DatasetH ds;
  check(di_dataset_load(data.c_str(), ds.out()));
  DatasetH converted;
  if (convert) {
    json opts = {{"alpha", alpha}, {"label_source", label_source}};
    check(di_dataset_convert(model, ds, opts.dump().c_str(), converted.out()));
  }
  double acc = 0.0;
  check(di_model_accuracy(model, convert ? converted : ds, &acc));
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    json manifest = {{"command", "eval-domain"},
                     {"config",
                      {{"model", model_path},
                       {"data", data},
                       {"convert", convert},
                       {"alpha", alpha},
                       {"label_source", label_source}}},
                     {"results", {{"domain_accuracy", acc}}}};
    write_manifest(out_dir, manifest, {});
  }
  std::cout << "domain_accuracy=" << fmt(acc) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"domain-independent WiFi gesture recognition experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(di_version()));

  // synth
  auto* synth = app.add_subcommand("synth", "generate the seeded synthetic benchmark");
  GenFlags synth_gen;
  uint64_t synth_seed = 42;
  std::string synth_out;
  add_gen_flags(synth, synth_gen);
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", synth_out, "output DISET path")->required();

  // import
  auto* import = app.add_subcommand("import", "convert NDJSON frame streams to a DISET file");
  std::string import_manifest, import_out;
  int64_t import_cols = 0;
  double import_q = 1e-5, import_r = 1e-2, import_p0 = 1.0;
  int import_gestures = 0, import_domains = 0;
  import->add_option("--manifest", import_manifest,
                     "JSON manifest: entries [{path, domain, gesture}], target_cols, ...")
      ->required();
  import->add_option("--out", import_out, "output DISET path")->required();
  import->add_option("--target-cols", import_cols, "resampled time steps (overrides manifest)");
  import->add_option("--kalman-q", import_q, "Kalman process variance");
  import->add_option("--kalman-r", import_r, "Kalman measurement variance");
  import->add_option("--kalman-p0", import_p0, "Kalman initial variance");
  import->add_option("--gestures", import_gestures, "gesture class count (default max+1)");
  import->add_option("--domains", import_domains, "domain class count (default max+1)");

  // run
  auto* run = app.add_subcommand("run", "train, convert and evaluate one configuration");
  PipelineFlags run_flags;
  double run_alpha = 0.1;
  bool run_dge = true;
  bool run_baseline = false;
  add_pipeline_flags(run, run_flags);
  run->add_option("--alpha", run_alpha, "DGE step size");
  run->add_flag("--dge,!--no-dge", run_dge, "apply domain-gap elimination (default on)");
  run->add_flag("--baseline", run_baseline,
                "also fit and report the recognizer without DGE");

  // sweep-alpha
  auto* sweep = app.add_subcommand("sweep-alpha", "run the pipeline across an alpha grid");
  PipelineFlags sweep_flags;
  double alpha_min = 0.04, alpha_max = 0.20, alpha_step = 0.01;
  add_pipeline_flags(sweep, sweep_flags);
  sweep->add_option("--alpha-min", alpha_min, "grid start");
  sweep->add_option("--alpha-max", alpha_max, "grid end (inclusive)");
  sweep->add_option("--alpha-step", alpha_step, "grid stride");

  // export-embedding
  auto* embed = app.add_subcommand("export-embedding", "PCA 2D projection to CSV");
  std::string embed_data, embed_out, embed_model, embed_source = "predicted";
  double embed_alpha = 0.1;
  embed->add_option("--data", embed_data, "input DISET file")->required();
  embed->add_option("--out", embed_out, "output directory")->required();
  embed->add_option("--model", embed_model,
                    "domain model: convert through DGE before projecting");
  embed->add_option("--alpha", embed_alpha, "DGE step size when --model is given");
  embed->add_option("--label-source", embed_source, "conversion label source")
      ->check(CLI::IsMember({"true", "predicted"}));

  // eval-domain
  auto* evald = app.add_subcommand("eval-domain", "domain-classifier accuracy on a dataset");
  std::string eval_model, eval_data, eval_source = "predicted", eval_out;
  bool eval_convert = false;
  double eval_alpha = 0.1;
  evald->add_option("--model", eval_model, "domain model DIMDL path")->required();
  evald->add_option("--data", eval_data, "input DISET file")->required();
  evald->add_flag("--convert", eval_convert, "apply DGE before evaluating");
  evald->add_option("--alpha", eval_alpha, "DGE step size when --convert is given");
  evald->add_option("--label-source", eval_source, "conversion label source")
      ->check(CLI::IsMember({"true", "predicted"}));
  evald->add_option("--out", eval_out, "optional directory for a manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  if (synth->parsed()) return cmd_synth(synth_gen, synth_seed, synth_out);
  if (import->parsed())
    return cmd_import(import_manifest, import_out, import_cols, import_q, import_r,
                      import_p0, import_gestures, import_domains);
  if (run->parsed()) return cmd_run(run_flags, run_alpha, run_dge, run_baseline);
  if (sweep->parsed()) return cmd_sweep(sweep_flags, alpha_min, alpha_max, alpha_step);
  if (embed->parsed())
    return cmd_export_embedding(embed_data, embed_out, embed_model, embed_alpha,
                                embed_source);
  if (evald->parsed())
    return cmd_eval_domain(eval_model, eval_data, eval_convert, eval_alpha, eval_source,
                           eval_out);
  return 2;
}
