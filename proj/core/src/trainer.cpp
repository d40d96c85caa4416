#include "vdsr/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "parallel.hpp"
#include "vdsr/errors.hpp"

namespace vdsr {

namespace {

// Samples per gradient-reduction chunk. Fixed so that the summation order,
// and therefore every bit of the result, is independent of the thread count.
constexpr std::size_t kChunk = 8;

// Forward traces are cached between the loss and gradient passes while they
// fit in this many doubles; otherwise they are recomputed.
constexpr std::size_t kTraceBudget = std::size_t{32} << 20;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw InvalidParameter("config: cannot parse value '" + std::string(v) + "' for key '" +
                           std::string(key) + "'");
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

FeatureBatch single(const ImagePlane& p) {
  FeatureBatch b(1, 1, p.height(), p.width());
  std::copy(p.samples().begin(), p.samples().end(), b.data.begin());
  return b;
}

}  // namespace

std::size_t TrainingConfig::effective_epochs() const noexcept {
  if (epochs) return *epochs;
  return estimator.kind() == EstimatorKind::kMse ? kMseEpochs : kVarNormEpochs;
}

double TrainingConfig::effective_clip_theta() const noexcept {
  if (clip_theta) return *clip_theta;
  return learning_rate > 0.0 ? 0.01 / learning_rate : std::numeric_limits<double>::infinity();
}

void TrainingConfig::validate() const {
  if (effective_epochs() < 1) throw InvalidParameter("epochs must be >= 1");
  if (mini_batch < 1) throw InvalidParameter("mini-batch size must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidParameter("learning rate must be a finite value >= 0");
  }
  if (!(effective_clip_theta() > 0.0)) throw InvalidParameter("clip threshold must be > 0");
  if (patch_size < 1) throw InvalidParameter("patch size must be >= 1");
  if (per_image_count < 1) throw InvalidParameter("patches per image must be >= 1");
  validate_scales(scales);
}

void validate_scales(std::span<const int> scales) {
  if (scales.empty()) throw InvalidParameter("at least one scale factor is required");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] < 2 || scales[i] > 4) {
      throw InvalidParameter("scale factors must be 2, 3 or 4, got " + std::to_string(scales[i]));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (scales[j] == scales[i]) throw InvalidParameter("duplicate scale factor");
    }
  }
}

std::vector<int> parse_scales(std::string_view text) {
  std::vector<int> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    out.push_back(parse_number<int>("scales", item));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  validate_scales(out);
  return out;
}

TrainingConfig parse_config(std::string_view text, TrainingConfig cfg) {
  std::optional<std::string> estimator;
  std::optional<double> r;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidParameter("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "epochs") cfg.epochs = parse_number<std::size_t>(key, value);
    else if (key == "batch" || key == "mini_batch") cfg.mini_batch = parse_number<std::size_t>(key, value);
    else if (key == "lr" || key == "learning_rate") cfg.learning_rate = parse_number<double>(key, value);
    else if (key == "clip_theta") cfg.clip_theta = parse_number<double>(key, value);
    else if (key == "estimator") estimator = std::string(value);
    else if (key == "r") r = parse_number<double>(key, value);
    else if (key == "scales") cfg.scales = parse_scales(value);
    else if (key == "patch_size") cfg.patch_size = parse_number<std::size_t>(key, value);
    else if (key == "per_image_count") cfg.per_image_count = parse_number<std::size_t>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "threads") cfg.threads = parse_number<std::size_t>(key, value);
    else throw InvalidParameter("config: unknown key '" + std::string(key) + "'");
  }
  if (estimator || r) {
    const std::string id = estimator.value_or(cfg.estimator.id());
    const double stability =
        r.value_or(cfg.estimator.kind() == EstimatorKind::kVarNorm ? cfg.estimator.stability_r()
                                                                   : LossEstimator::kDefaultStability);
    cfg.estimator = LossEstimator::parse(id, stability);
  }
  cfg.validate();
  return cfg;
}

std::string format_config(const TrainingConfig& cfg) {
  std::ostringstream os;
  os << "epochs=" << cfg.effective_epochs() << '\n'
     << "batch=" << cfg.mini_batch << '\n'
     << "lr=" << fmt_double(cfg.learning_rate) << '\n'
     << "clip_theta=" << fmt_double(cfg.effective_clip_theta()) << '\n'
     << "estimator=" << cfg.estimator.id() << '\n';
  if (cfg.estimator.kind() == EstimatorKind::kVarNorm) {
    os << "r=" << fmt_double(cfg.estimator.stability_r()) << '\n';
  }
  os << "scales=";
  for (std::size_t i = 0; i < cfg.scales.size(); ++i) os << (i ? "," : "") << cfg.scales[i];
  os << '\n'
     << "patch_size=" << cfg.patch_size << '\n'
     << "per_image_count=" << cfg.per_image_count << '\n'
     << "seed=" << cfg.seed << '\n';
  return os.str();
}

std::string format_epoch_log(const EpochLog& log) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "epoch=%zu rmse=%.9g loss=%.9g seconds=%.3f", log.epoch, log.rmse,
                log.loss, log.seconds);
  return buf;
}

std::vector<PatchPair> build_pairs(const RgbImage& image, std::uint32_t source,
                                   std::span<const int> scales, std::size_t patch_size,
                                   std::size_t per_image_count) {
  validate_scales(scales);
  if (image.height() < patch_size || image.width() < patch_size) {
    throw DegenerateInput("image " + std::to_string(source) + " is " +
                          std::to_string(image.height()) + "x" + std::to_string(image.width()) +
                          ", smaller than patch size " + std::to_string(patch_size));
  }
  const ImagePlane hr = rgb_to_luminance(image);
  const PatchGrid grid = make_patch_grid(hr.height(), hr.width(), patch_size, per_image_count);
  const auto hr_patches = patchify(hr, grid);
  std::vector<PatchPair> out;
  out.reserve(scales.size() * grid.anchors.size());
  for (int scale : scales) {
    const ImagePlane ilr = make_ilr(hr, scale);
    auto ilr_patches = patchify(ilr, grid);
    for (std::size_t i = 0; i < ilr_patches.size(); ++i) {
      PatchPair p;
      p.residual = residual_target(hr_patches[i], ilr_patches[i]);
      p.ilr = std::move(ilr_patches[i]);
      p.scale = scale;
      p.source = source;
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<PatchPair> build_dataset(std::span<const RgbImage> images, std::span<const int> scales,
                                     std::size_t patch_size, std::size_t per_image_count) {
  if (images.empty()) {
    throw DegenerateInput("build_dataset: no images");
  }
  std::vector<PatchPair> out;
  out.reserve(images.size() * scales.size() * per_image_count);
  for (std::size_t i = 0; i < images.size(); ++i) {
    auto pairs = build_pairs(images[i], static_cast<std::uint32_t>(i), scales, patch_size,
                             per_image_count);
    std::move(pairs.begin(), pairs.end(), std::back_inserter(out));
  }
  return out;
}

double epoch_rmse(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size()) {
    throw ShapeMismatch("epoch_rmse: prediction and target sizes differ");
  }
  if (predictions.empty()) {
    throw DegenerateInput("epoch_rmse: no samples");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - targets[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(predictions.size()));
}

double epoch_rmse(std::span<const ImagePlane> predictions, std::span<const ImagePlane> targets) {
  if (predictions.size() != targets.size()) {
    throw ShapeMismatch("epoch_rmse: prediction and target counts differ");
  }
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    if (!predictions[k].same_shape(targets[k])) {
      throw ShapeMismatch("epoch_rmse: plane " + std::to_string(k) + " shape differs");
    }
    auto p = predictions[k].samples();
    auto t = targets[k].samples();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double d = p[i] - t[i];
      acc += d * d;
    }
    n += p.size();
  }
  if (n == 0) throw DegenerateInput("epoch_rmse: no samples");
  return std::sqrt(acc / static_cast<double>(n));
}

TrainResult train(NetworkModel model, std::span<const PatchPair> data, const TrainingConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  model.validate();
  if (data.empty()) {
    throw DegenerateInput("train: empty dataset");
  }
  const std::size_t ph = data.front().ilr.height();
  const std::size_t pw = data.front().ilr.width();
  for (const auto& p : data) {
    if (p.ilr.height() != ph || p.ilr.width() != pw || !p.ilr.same_shape(p.residual)) {
      throw ShapeMismatch("train: patch pairs must share one shape");
    }
  }
  const std::size_t plane = ph * pw;
  const std::size_t epochs = cfg.effective_epochs();
  const double theta = cfg.effective_clip_theta();

  std::size_t trace_doubles = 0;
  for (const auto& l : model.layers) trace_doubles += l.out_channels * plane;
  const bool cache_traces = trace_doubles * std::min(cfg.mini_batch, data.size()) <= kTraceBudget;

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    // Fisher-Yates.
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i);
      std::swap(order[i], order[pick(rng)]);
    }

    double sq_err = 0.0, loss_sum = 0.0;
    std::size_t n_err = 0, n_batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.mini_batch) {
      const std::size_t bsize = std::min(cfg.mini_batch, order.size() - start);
      const std::size_t batch_index = start / cfg.mini_batch;

      std::vector<double> f(bsize * plane);
      std::vector<ForwardTrace> traces(cache_traces ? bsize : 0);
      detail::parallel_for(bsize, cfg.threads, [&](std::size_t i) {
        const PatchPair& pair = data[order[start + i]];
        ForwardTrace trace = forward_trace(model, single(pair.ilr));
        const auto& out = trace.activations.back().data;
        const auto target = pair.residual.samples();
        for (std::size_t j = 0; j < plane; ++j) {
          f[i * plane + j] = out[j] - target[j];
        }
        if (cache_traces) traces[i] = std::move(trace);
      });

      const LossEvaluation ev = evaluate(cfg.estimator, f);
      if (!std::isfinite(ev.loss)) {
        throw DivergenceDetected(epoch, batch_index,
                                 "non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                     std::to_string(batch_index));
      }
      for (double x : f) sq_err += x * x;
      n_err += f.size();
      loss_sum += ev.loss;
      ++n_batches;

      const std::size_t chunks = (bsize + kChunk - 1) / kChunk;
      std::vector<GradientSet> partial(chunks);
      detail::parallel_for(chunks, cfg.threads, [&](std::size_t c) {
        GradientSet acc = GradientSet::zeros_like(model);
        for (std::size_t i = c * kChunk; i < std::min(bsize, (c + 1) * kChunk); ++i) {
          FeatureBatch g(1, 1, ph, pw);
          std::copy_n(ev.gradient.begin() + static_cast<std::ptrdiff_t>(i * plane), plane,
                      g.data.begin());
          if (cache_traces) {
            acc.accumulate(backward(model, traces[i], g));
          } else {
            acc.accumulate(backward(model, single(data[order[start + i]].ilr), g));
          }
        }
        partial[c] = std::move(acc);
      });
      GradientSet grads = std::move(partial.front());
      for (std::size_t c = 1; c < chunks; ++c) grads.accumulate(partial[c]);

      apply_sgd(model, clip_gradients(std::move(grads), theta), cfg.learning_rate);
    }

    if (!all_finite(model)) {
      throw DivergenceDetected(epoch, n_batches - 1,
                               "non-finite parameter after epoch " + std::to_string(epoch));
    }
    EpochLog log;
    log.epoch = epoch;
    log.rmse = std::sqrt(sq_err / static_cast<double>(n_err));
    log.loss = loss_sum / static_cast<double>(n_batches);
    log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.logs.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  result.model = std::move(model);
  return result;
}

}  // namespace vdsr
