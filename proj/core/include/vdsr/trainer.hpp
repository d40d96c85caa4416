#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vdsr/image.hpp"
#include "vdsr/loss.hpp"
#include "vdsr/network.hpp"

namespace vdsr {

/// One training observation: ILR luminance patch and its residual target.
struct PatchPair {
  ImagePlane ilr;
  ImagePlane residual;
  int scale = 2;
  std::uint32_t source = 0;  // index of the originating image

  friend bool operator==(const PatchPair&, const PatchPair&) = default;
};

struct TrainingConfig {
  static constexpr std::size_t kMseEpochs = 8;
  static constexpr std::size_t kVarNormEpochs = 5;

  std::optional<std::size_t> epochs;  // unset: 8 for MSE, 5 for Var-norm
  std::size_t mini_batch = 64;
  double learning_rate = 0.1;
  std::optional<double> clip_theta;  // unset: 0.01 / learning_rate
  LossEstimator estimator = LossEstimator::mse();
  std::vector<int> scales{2, 3, 4};
  std::size_t patch_size = 41;
  std::size_t per_image_count = 6;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0: hardware concurrency; does not affect results

  std::size_t effective_epochs() const noexcept;
  double effective_clip_theta() const noexcept;

  /// Throws InvalidParameter on out-of-range fields.
  void validate() const;
};

/// Parses `key = value` lines ('#' starts a comment) on top of `base`.
/// Keys: epochs, batch, lr, clip_theta, estimator, r, scales, patch_size,
/// per_image_count, seed, threads.
TrainingConfig parse_config(std::string_view text, TrainingConfig base = {});

/// Renders every field with defaults resolved, in parse_config syntax.
std::string format_config(const TrainingConfig& cfg);

std::vector<int> parse_scales(std::string_view text);
void validate_scales(std::span<const int> scales);

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double rmse = 0.0;
  double loss = 0.0;
  double seconds = 0.0;
};

/// `epoch=<n> rmse=<v> loss=<v> seconds=<v>`
std::string format_epoch_log(const EpochLog& log);

/// Pairs for one image: luminance, then per scale an ILR and the residual,
/// both cut with the same patch grid.
std::vector<PatchPair> build_pairs(const RgbImage& image, std::uint32_t source,
                                   std::span<const int> scales, std::size_t patch_size,
                                   std::size_t per_image_count);

/// |images| * per_image_count * |scales| pairs, image-major then scale then
/// anchor order.
std::vector<PatchPair> build_dataset(std::span<const RgbImage> images, std::span<const int> scales,
                                     std::size_t patch_size, std::size_t per_image_count);

double epoch_rmse(std::span<const double> predictions, std::span<const double> targets);
double epoch_rmse(std::span<const ImagePlane> predictions, std::span<const ImagePlane> targets);

struct TrainResult {
  NetworkModel model;
  std::vector<EpochLog> logs;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Plain mini-batch SGD. Each epoch shuffles with a seeded Fisher-Yates,
/// evaluates the estimator on the whole batch residual error, backpropagates,
/// clips element-wise and updates w <- w - lr * g.
TrainResult train(NetworkModel model, std::span<const PatchPair> data, const TrainingConfig& cfg,
                  const EpochCallback& on_epoch = {});

}  // namespace vdsr
