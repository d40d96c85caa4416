#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vdsr/dataset_io.hpp"
#include "vdsr/errors.hpp"
#include "vdsr/fileutil.hpp"
#include "vdsr/model_io.hpp"
#include "vdsr/png_io.hpp"
#include "vdsr/protocol.hpp"
#include "vdsr/report.hpp"
#include "vdsr/synthetic.hpp"
#include "vdsr/trainer.hpp"

namespace vdsr::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_scales(const std::vector<int>& scales) {
  std::string s;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(scales[i]);
  }
  return s;
}

/// Reproducibility record written next to each command's primary output.
class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> args) : started_(utc_now()) {
    doc_["tool"] = "vdsr";
    doc_["version"] = kToolVersion;
    doc_["command"] = std::move(command);
    doc_["argv"] = std::move(args);
    doc_["inputs"] = json::object();
    doc_["outputs"] = json::object();
  }

  void input(const fs::path& p) { doc_["inputs"][p.string()] = sha256_file(p); }
  void output(const fs::path& p) { doc_["outputs"][p.string()] = sha256_file(p); }
  json& operator[](const char* key) { return doc_[key]; }

  void write(const fs::path& path) {
    doc_["started"] = started_;
    doc_["finished"] = utc_now();
    write_text_atomic(path, doc_.dump(2) + "\n");
  }

 private:
  std::string started_;
  json doc_;
};

fs::path manifest_path(const fs::path& primary) {
  fs::path p = primary;
  p += ".manifest.json";
  return p;
}

std::vector<fs::path> list_pngs(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw IoError("input directory " + dir.string() + " does not exist");
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    auto ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  std::size_t count = 10;
  std::size_t height = 227;
  std::size_t width = 227;
  std::uint64_t seed = 1;
  std::string out;

  std::vector<std::string> resolved() const {
    return {"synth", "--count", std::to_string(count), "--height", std::to_string(height),
            "--width", std::to_string(width), "--seed", std::to_string(seed), "--out", out};
  }
};

int cmd_synth(const SynthOptions& o, std::ostream& out) {
  fs::create_directories(o.out);
  Manifest m("synth", o.resolved());
  m["seed"] = o.seed;
  const auto images = synthetic_images(o.count, o.height, o.width, o.seed);
  for (std::size_t i = 0; i < images.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "scene_%03zu.png", i);
    const fs::path p = fs::path(o.out) / name;
    write_png(p, images[i]);
    m.output(p);
  }
  m.write(fs::path(o.out) / "synth.manifest.json");
  out << "wrote " << images.size() << " synthetic scenes to " << o.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- init

struct InitOptions {
  std::size_t depth = 20;
  std::size_t filters = 64;
  std::size_t kernel = 3;
  std::uint64_t seed = 1;
  bool zero = false;
  std::string out;

  std::vector<std::string> resolved() const {
    std::vector<std::string> a = {"init", "--depth", std::to_string(depth), "--filters",
                                  std::to_string(filters), "--kernel", std::to_string(kernel),
                                  "--seed", std::to_string(seed), "--out", out};
    if (zero) a.push_back("--zero");
    return a;
  }
};

int cmd_init(const InitOptions& o, std::ostream& out) {
  Manifest m("init", o.resolved());
  m["seed"] = o.seed;
  NetworkModel model = o.zero ? zero_model(o.depth, o.filters, o.kernel)
                              : init_model(o.depth, o.filters, o.kernel, o.seed);
  save_model(o.out, model);
  m.output(o.out);
  m["receptive_field"] = receptive_field(o.depth, o.kernel);
  m.write(manifest_path(o.out));
  out << "model: depth " << model.depth() << ", filters " << model.filters << ", kernel "
      << model.kernel << ", receptive field " << receptive_field(o.depth, o.kernel) << ", "
      << model.parameter_count() << " parameters\n";
  return kExitOk;
}

// ---------------------------------------------------------------- patchify

struct PatchifyOptions {
  std::string input;
  std::string out;
  std::size_t patch_size = 41;
  std::size_t count = 6;
  std::string scales = "2,3,4";

  std::vector<std::string> resolved() const {
    return {"patchify", "--input", input, "--out", out, "--patch-size", std::to_string(patch_size),
            "--count", std::to_string(count), "--scales", scales};
  }
};

int cmd_patchify(const PatchifyOptions& o, std::ostream& out, std::ostream& err) {
  const auto scales = parse_scales(o.scales);
  const auto files = list_pngs(o.input);
  if (files.empty()) {
    err << "error: no input images in " << o.input << "\n";
    return kExitInput;
  }
  Manifest m("patchify", o.resolved());
  DatasetWriter writer(o.out, o.patch_size);
  std::size_t used = 0, skipped = 0;
  for (const auto& f : files) {
    try {
      const RgbImage img = read_png(f);
      // Validate before registering the source so skipped files leave no trace.
      auto pairs = build_pairs(img, 0, scales, o.patch_size, o.count);
      const auto id = writer.add_source(f.filename().string());
      for (auto& p : pairs) {
        p.source = id;
        writer.add(p);
      }
      m.input(f);
      ++used;
    } catch (const Error& e) {
      err << "skipped " << f.filename().string() << ": " << e.what() << "\n";
      ++skipped;
    }
  }
  if (writer.count() == 0) {
    err << "error: no patch pairs produced (" << skipped << " image(s) rejected)\n";
    return kExitInput;
  }
  writer.finish();
  m.output(o.out);
  m["pairs"] = writer.count();
  m.write(manifest_path(o.out));
  out << "pairs: " << writer.count() << " (images: " << used << ", skipped: " << skipped
      << ", scales: " << o.scales << ", patches per image: " << o.count << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  std::string dataset;
  std::string config;
  std::optional<std::string> estimator;
  std::optional<double> r;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch;
  std::optional<double> lr;
  std::optional<double> clip_theta;
  std::optional<std::string> scales;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string init = "fresh";
  std::size_t depth = 20;
  std::size_t filters = 64;
  std::size_t kernel = 3;
  std::string out;
  std::string log;
};

TrainingConfig resolve_config(const TrainOptions& o) {
  TrainingConfig cfg;
  if (!o.config.empty()) {
    cfg = parse_config(read_file_bytes(o.config));
  }
  if (o.epochs) cfg.epochs = *o.epochs;
  if (o.batch) cfg.mini_batch = *o.batch;
  if (o.lr) cfg.learning_rate = *o.lr;
  if (o.clip_theta) cfg.clip_theta = *o.clip_theta;
  if (o.scales) cfg.scales = parse_scales(*o.scales);
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.estimator || o.r) {
    const std::string id = o.estimator.value_or(cfg.estimator.id());
    const double r = o.r.value_or(cfg.estimator.kind() == EstimatorKind::kVarNorm
                                      ? cfg.estimator.stability_r()
                                      : LossEstimator::kDefaultStability);
    cfg.estimator = LossEstimator::parse(id, r);
  }
  cfg.validate();
  return cfg;
}

std::vector<std::string> resolved_train_args(const TrainOptions& o, const TrainingConfig& cfg,
                                             const std::string& log) {
  std::vector<std::string> a = {"train", "--dataset", o.dataset, "--init", o.init, "--depth",
                                std::to_string(o.depth), "--filters", std::to_string(o.filters),
                                "--kernel", std::to_string(o.kernel), "--out", o.out, "--log", log,
                                "--estimator", cfg.estimator.id()};
  if (cfg.estimator.kind() == EstimatorKind::kVarNorm) {
    a.insert(a.end(), {"--r", exact(cfg.estimator.stability_r())});
  }
  a.insert(a.end(), {"--epochs", std::to_string(cfg.effective_epochs()), "--batch",
                     std::to_string(cfg.mini_batch), "--lr", exact(cfg.learning_rate), "--scales",
                     join_scales(cfg.scales), "--seed", std::to_string(cfg.seed)});
  if (cfg.clip_theta) a.insert(a.end(), {"--clip-theta", exact(*cfg.clip_theta)});
  return a;
}

int cmd_train(const TrainOptions& o, std::ostream& out, std::ostream& err) {
  const TrainingConfig cfg = resolve_config(o);
  const std::string log_path = o.log.empty() ? o.out + ".log" : o.log;
  Manifest m("train", resolved_train_args(o, cfg, log_path));
  m["config"] = format_config(cfg);
  m["seed"] = cfg.seed;

  const Dataset ds = read_dataset(o.dataset);
  m.input(o.dataset);
  if (!o.config.empty()) m.input(o.config);
  if (ds.pairs.empty()) {
    err << "error: dataset " << o.dataset << " holds no patch pairs\n";
    return kExitInput;
  }
  for (int s : cfg.scales) {
    const bool present = std::any_of(ds.pairs.begin(), ds.pairs.end(),
                                     [s](const PatchPair& p) { return p.scale == s; });
    if (!present) err << "warning: dataset contains no pairs for scale " << s << "\n";
  }

  NetworkModel model;
  if (o.init == "fresh") {
    model = init_model(o.depth, o.filters, o.kernel, cfg.seed);
    m["init"] = "fresh";
  } else {
    model = load_model(o.init);
    m.input(o.init);
    m["init"] = json{{"model", o.init}, {"sha256", sha256_file(o.init)}};
  }
  m["receptive_field"] = receptive_field(model.depth(), model.kernel);
  if (receptive_field(model.depth(), model.kernel) < ds.patch_size) {
    err << "note: receptive field " << receptive_field(model.depth(), model.kernel)
        << " is smaller than the " << ds.patch_size << "x" << ds.patch_size << " patches\n";
  }

  std::ostringstream log_text;
  TrainResult result;
  try {
    result = train(std::move(model), ds.pairs, cfg, [&](const EpochLog& e) {
      const std::string line = format_epoch_log(e);
      out << line << "\n" << std::flush;
      log_text << line << "\n";
    });
  } catch (const DivergenceDetected& d) {
    write_text_atomic(log_path, log_text.str());
    err << "error: training diverged at epoch " << d.epoch() << ", batch " << d.batch() << ": "
        << d.what() << "\n";
    return kExitDivergence;
  }
  result.model.info.estimator = cfg.estimator;
  result.model.info.scales = cfg.scales;
  save_model(o.out, result.model);
  write_text_atomic(log_path, log_text.str());
  m.output(o.out);
  json epochs = json::array();
  for (const auto& e : result.logs) {
    epochs.push_back({{"epoch", e.epoch}, {"rmse", e.rmse}, {"loss", e.loss}, {"seconds", e.seconds}});
  }
  m["epochs"] = std::move(epochs);
  m.write(manifest_path(o.out));
  out << "model written to " << o.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- predict

struct PredictOptions {
  std::string model;
  std::string input;
  int scale = 4;
  std::string out;

  std::vector<std::string> resolved() const {
    return {"predict", "--model", model, "--input", input, "--scale", std::to_string(scale),
            "--out", out};
  }
};

int cmd_predict(const PredictOptions& o, std::ostream& out, std::ostream& err) {
  Manifest m("predict", o.resolved());
  const NetworkModel model = load_model(o.model);
  m.input(o.model);
  if (std::find(model.info.scales.begin(), model.info.scales.end(), o.scale) ==
      model.info.scales.end()) {
    err << "warning: model was trained for scales " << join_scales(model.info.scales)
        << ", predicting at scale " << o.scale << "\n";
  }
  const RgbImage hr = read_png(o.input);
  m.input(o.input);
  const SynthesizedResult r = run_synthesized(&model, hr, o.scale);

  const fs::path sr_path = o.out + "_sr.png";
  const fs::path bicubic_path = o.out + "_bicubic.png";
  const fs::path residual_path = o.out + "_residual.png";
  write_png(sr_path, r.sr_rgb());
  write_png(bicubic_path, r.bicubic_rgb());
  ImagePlane stretched;
  const double max_abs = stretch_residual(r.residual, stretched);
  write_png(residual_path, stretched);
  for (const auto& p : {sr_path, bicubic_path, residual_path}) m.output(p);

  const QualityScore sr = r.sr_score();
  const QualityScore bic = r.bicubic_score();
  m["low_resolution"] = {r.lr_height, r.lr_width};
  m["residual_stretch"] = {{"formula", "0.5 + v / (2 * max_abs)"}, {"max_abs", max_abs}};
  m["luminance_scores"] = {{"sr", format_score_cell(sr)}, {"bicubic", format_score_cell(bic)}};
  m.write(manifest_path(o.out));

  out << hr.height() << "x" << hr.width() << " -> " << r.lr_height << "x" << r.lr_width << " -> "
      << hr.height() << "x" << hr.width() << "\n"
      << "bicubic " << format_score_cell(bic) << "  sr " << format_score_cell(sr) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::vector<std::string> models;  // label=path
  std::vector<std::string> scenes;
  std::string scenes_dir;
  int scale = 4;
  std::string out;
  std::string csv;

  std::vector<std::string> resolved(const std::string& csv_path) const {
    std::vector<std::string> a = {"evaluate"};
    for (const auto& mdl : models) a.insert(a.end(), {"--model", mdl});
    for (const auto& s : scenes) a.insert(a.end(), {"--scene", s});
    if (!scenes_dir.empty()) a.insert(a.end(), {"--scenes", scenes_dir});
    a.insert(a.end(), {"--scale", std::to_string(scale), "--out", out, "--csv", csv_path});
    return a;
  }
};

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out, std::ostream& err) {
  const std::string csv_path =
      o.csv.empty() ? fs::path(o.out).replace_extension(".csv").string() : o.csv;
  Manifest m("evaluate", o.resolved(csv_path));

  std::vector<std::pair<std::string, NetworkModel>> models;
  for (const auto& entry : o.models) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
      throw InvalidParameter("--model expects label=path, got '" + entry + "'");
    }
    const std::string label = entry.substr(0, eq);
    if (label == "bicubic") throw InvalidParameter("the label 'bicubic' is reserved");
    const std::string path = entry.substr(eq + 1);
    models.emplace_back(label, load_model(path));
    m.input(path);
  }
  std::vector<fs::path> scenes(o.scenes.begin(), o.scenes.end());
  if (!o.scenes_dir.empty()) {
    const auto more = list_pngs(o.scenes_dir);
    scenes.insert(scenes.end(), more.begin(), more.end());
  }
  if (models.empty() || scenes.empty()) {
    err << "error: evaluate needs at least one --model and one scene\n";
    return kExitInput;
  }

  EvalTable table;
  std::size_t failed = 0;
  for (const auto& scene : scenes) {
    try {
      const RgbImage hr = read_png(scene);
      const std::string id = scene.stem().string();
      const SynthesizedResult base = run_synthesized(nullptr, hr, o.scale);
      table.add(id, "bicubic", base.sr_score());
      for (const auto& [label, model] : models) {
        table.add(id, label, run_synthesized(&model, hr, o.scale).sr_score());
      }
      m.input(scene);
    } catch (const Error& e) {
      err << "skipped scene " << scene.string() << ": " << e.what() << "\n";
      ++failed;
    }
  }
  if (failed == scenes.size()) {
    err << "error: every scene failed\n";
    return kExitInput;
  }
  const std::string grid = table.render_grid();
  write_text_atomic(o.out, grid);
  write_text_atomic(csv_path, render_rows_csv(table.rows()));
  m.output(o.out);
  m.output(csv_path);
  m["scale"] = o.scale;
  m.write(manifest_path(o.out));
  out << grid;
  return kExitOk;
}

// ---------------------------------------------------------------- dispatch

int classify(const std::exception& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  if (dynamic_cast<const DivergenceDetected*>(&e)) return kExitDivergence;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return kExitIo;
  if (dynamic_cast<const Error*>(&e)) return kExitInput;
  return kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Residual-network single-image super-resolution toolkit", "vdsr"};
  app.require_subcommand(1);

  SynthOptions synth;
  auto* s = app.add_subcommand("synth", "Write deterministic synthetic RGB test scenes");
  s->add_option("--count", synth.count, "Number of scenes")->capture_default_str();
  s->add_option("--height", synth.height, "Scene height")->capture_default_str();
  s->add_option("--width", synth.width, "Scene width")->capture_default_str();
  s->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  s->add_option("--out", synth.out, "Output directory")->required();

  InitOptions init;
  auto* in = app.add_subcommand("init", "Create a freshly initialised (or all-zero) model file");
  in->add_option("--depth", init.depth, "Convolutional layers")->capture_default_str();
  in->add_option("--filters", init.filters, "Filters per interior layer")->capture_default_str();
  in->add_option("--kernel", init.kernel, "Odd kernel size")->capture_default_str();
  in->add_option("--seed", init.seed, "Initialisation seed")->capture_default_str();
  in->add_flag("--zero", init.zero, "All weights and biases zero");
  in->add_option("--out", init.out, "Model file")->required();

  PatchifyOptions patch;
  auto* p = app.add_subcommand("patchify", "Cut RGB images into ILR/residual patch pairs");
  p->add_option("--input", patch.input, "Directory of PNG images")->required();
  p->add_option("--out", patch.out, "Patch archive")->required();
  p->add_option("--patch-size", patch.patch_size, "Patch edge length")->capture_default_str();
  p->add_option("--count", patch.count, "Patches per image")->capture_default_str();
  p->add_option("--scales", patch.scales, "Comma-separated scale factors")->capture_default_str();

  TrainOptions tr;
  auto* t = app.add_subcommand("train", "Train the network on a patch archive");
  t->add_option("--dataset", tr.dataset, "Patch archive")->required();
  t->add_option("--config", tr.config, "key=value training configuration file");
  t->add_option("--estimator", tr.estimator, "mse or var-norm");
  t->add_option("--r", tr.r, "Var-norm stability parameter R (default 0.1)");
  t->add_option("--epochs", tr.epochs, "Epochs (default 8 for mse, 5 for var-norm)");
  t->add_option("--batch", tr.batch, "Mini-batch size (default 64)");
  t->add_option("--lr", tr.lr, "Learning rate (default 0.1)");
  t->add_option("--clip-theta", tr.clip_theta, "Gradient clamp (default 0.01 / lr)");
  t->add_option("--scales", tr.scales, "Scale factors recorded in the model (default 2,3,4)");
  t->add_option("--seed", tr.seed, "Initialisation and shuffle seed (default 1)");
  t->add_option("--threads", tr.threads, "Worker threads, 0 = all cores (results do not depend on it)");
  t->add_option("--init", tr.init, "'fresh' or a model file to continue from")->capture_default_str();
  t->add_option("--depth", tr.depth, "Layers of a fresh model")->capture_default_str();
  t->add_option("--filters", tr.filters, "Filters of a fresh model")->capture_default_str();
  t->add_option("--kernel", tr.kernel, "Kernel of a fresh model")->capture_default_str();
  t->add_option("--out", tr.out, "Output model file")->required();
  t->add_option("--log", tr.log, "Epoch log file (default <out>.log)");

  PredictOptions pred;
  auto* pr = app.add_subcommand("predict", "Downsample, super-resolve and export one image");
  pr->add_option("--model", pred.model, "Model file")->required();
  pr->add_option("--input", pred.input, "HR PNG image")->required();
  pr->add_option("--scale", pred.scale, "Scale factor 2, 3 or 4")
      ->capture_default_str()
      ->check(CLI::IsMember({2, 3, 4}));
  pr->add_option("--out", pred.out, "Output prefix (<out>_sr.png, _bicubic.png, _residual.png)")
      ->required();

  EvaluateOptions ev;
  auto* e = app.add_subcommand("evaluate", "Score models against the bicubic baseline");
  e->add_option("--model", ev.models, "label=path, repeatable")->required();
  e->add_option("--scene", ev.scenes, "Scene PNG, repeatable");
  e->add_option("--scenes", ev.scenes_dir, "Directory of scene PNGs");
  e->add_option("--scale", ev.scale, "Scale factor 2, 3 or 4")
      ->capture_default_str()
      ->check(CLI::IsMember({2, 3, 4}));
  e->add_option("--out", ev.out, "PSNR/SSIM grid (tab separated)")->required();
  e->add_option("--csv", ev.csv, "Machine-readable rows (default: --out with .csv)");

  std::string replay_path;
  auto* rp = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  rp->add_option("manifest", replay_path, "Manifest JSON file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (s->parsed()) return cmd_synth(synth, out);
    if (in->parsed()) return cmd_init(init, out);
    if (p->parsed()) return cmd_patchify(patch, out, err);
    if (t->parsed()) return cmd_train(tr, out, err);
    if (pr->parsed()) return cmd_predict(pred, out, err);
    if (e->parsed()) return cmd_evaluate(ev, out, err);
    if (rp->parsed()) {
      const json doc = json::parse(read_file_bytes(replay_path));
      const auto argv = doc.at("argv").get<std::vector<std::string>>();
      if (argv.empty() || argv.front() == "replay") {
        throw FormatError("manifest does not record a replayable command");
      }
      return run(argv, out, err);
    }
  } catch (const json::exception& je) {
    err << "error: malformed manifest: " << je.what() << "\n";
    return kExitInput;
  } catch (const std::exception& ex) {
    return classify(ex, err);
  }
  return kExitFailure;
}

}  // namespace vdsr::cli
