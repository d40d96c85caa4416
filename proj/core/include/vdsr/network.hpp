#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vdsr/loss.hpp"

namespace vdsr {

/// 4-D tensor laid out batch x channels x height x width.
struct FeatureBatch {
  std::size_t batch = 0;
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;

  FeatureBatch() = default;
  FeatureBatch(std::size_t n, std::size_t c, std::size_t h, std::size_t w, double fill = 0.0);

  std::size_t plane_size() const noexcept { return height * width; }
  std::size_t item_size() const noexcept { return channels * height * width; }

  std::span<double> item(std::size_t n) noexcept { return {data.data() + n * item_size(), item_size()}; }
  std::span<const double> item(std::size_t n) const noexcept {
    return {data.data() + n * item_size(), item_size()};
  }

  bool same_shape(const FeatureBatch& o) const noexcept {
    return batch == o.batch && channels == o.channels && height == o.height && width == o.width;
  }

  friend bool operator==(const FeatureBatch&, const FeatureBatch&) = default;
};

/// Zero-padded stride-1 convolution. Weights are out x in x k x k.
struct ConvLayer {
  std::size_t out_channels = 0;
  std::size_t in_channels = 0;
  std::size_t kernel = 0;
  std::vector<double> weights;
  std::vector<double> biases;

  ConvLayer() = default;
  ConvLayer(std::size_t out_ch, std::size_t in_ch, std::size_t k);

  std::size_t weight_count() const noexcept { return out_channels * in_channels * kernel * kernel; }
  double& weight(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) noexcept {
    return weights[((o * in_channels + i) * kernel + ky) * kernel + kx];
  }

  friend bool operator==(const ConvLayer&, const ConvLayer&) = default;
};

/// Descriptive fields that travel with a model file.
struct ModelInfo {
  std::vector<int> scales{2, 3, 4};
  LossEstimator estimator = LossEstimator::mse();
  std::string provenance;  // e.g. "fresh seed=42" or "trained from <digest>"

  friend bool operator==(const ModelInfo&, const ModelInfo&) = default;
};

/// Residual network: conv -> ReLU repeated, final conv without rectifier,
/// and a global skip adding the input back onto the predicted residual.
struct NetworkModel {
  std::vector<ConvLayer> layers;
  std::size_t filters = 0;
  std::size_t kernel = 0;
  ModelInfo info;

  std::size_t depth() const noexcept { return layers.size(); }
  std::size_t parameter_count() const noexcept;

  /// Throws InvalidParameter when the layer chain is inconsistent.
  void validate() const;

  friend bool operator==(const NetworkModel&, const NetworkModel&) = default;
};

struct LayerGradient {
  std::vector<double> weights;
  std::vector<double> biases;

  friend bool operator==(const LayerGradient&, const LayerGradient&) = default;
};

struct GradientSet {
  std::vector<LayerGradient> layers;

  /// Zero gradients congruent with `model`.
  static GradientSet zeros_like(const NetworkModel& model);

  void accumulate(const GradientSet& other);
  void scale(double factor);
  double max_abs() const noexcept;

  friend bool operator==(const GradientSet&, const GradientSet&) = default;
};

struct Prediction {
  FeatureBatch sr;        // ilr + residual
  FeatureBatch residual;  // raw network output
};

/// Intermediate activations kept for backpropagation. activations[0] is the
/// input; activations[l] is the rectified output of layer l for interior
/// layers; the last entry is the residual output.
struct ForwardTrace {
  std::vector<FeatureBatch> activations;
};

inline std::size_t receptive_field(std::size_t depth, std::size_t kernel) {
  return depth * (kernel - 1) + 1;
}

/// He-style Gaussian initialisation, std = sqrt(2 / (in_channels * k^2)),
/// zero biases.
NetworkModel init_model(std::size_t depth, std::size_t filters, std::size_t kernel,
                        std::uint64_t seed);

/// Same architecture with every weight and bias zero.
NetworkModel zero_model(std::size_t depth, std::size_t filters, std::size_t kernel);

Prediction forward(const NetworkModel& model, const FeatureBatch& ilr);
ForwardTrace forward_trace(const NetworkModel& model, const FeatureBatch& ilr);

/// Exact parameter gradients for the given output gradient. When `grad_input`
/// is non-null it receives dL/d(ilr), which includes the identity term of
/// the skip connection.
GradientSet backward(const NetworkModel& model, const FeatureBatch& ilr,
                     const FeatureBatch& grad_out, FeatureBatch* grad_input = nullptr);
GradientSet backward(const NetworkModel& model, const ForwardTrace& trace,
                     const FeatureBatch& grad_out, FeatureBatch* grad_input = nullptr);

/// Element-wise clamp of every gradient entry to [-theta, theta].
GradientSet clip_gradients(GradientSet grads, double theta);

/// w <- w - lr * g for every parameter.
void apply_sgd(NetworkModel& model, const GradientSet& grads, double learning_rate);

bool all_finite(const NetworkModel& model) noexcept;

}  // namespace vdsr
