#include "vdsr/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "vdsr/errors.hpp"

namespace vdsr {

namespace {

struct Span2 {
  std::size_t lo, hi;  // [lo, hi) of output coordinates whose shifted input is in range
};

Span2 valid_range(std::size_t n, std::ptrdiff_t shift) {
  const auto sn = static_cast<std::ptrdiff_t>(n);
  const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
  const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(sn, sn - shift);
  if (hi <= lo) {
    return {0, 0};
  }
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

// out (Co x H x W) = bias + conv(in (Ci x H x W)).
void conv_forward(const ConvLayer& layer, const double* in, double* out, std::size_t h,
                  std::size_t w) {
  const std::size_t hw = h * w;
  const std::size_t k = layer.kernel;
  const auto pad = static_cast<std::ptrdiff_t>(k / 2);
  for (std::size_t co = 0; co < layer.out_channels; ++co) {
    double* o = out + co * hw;
    std::fill(o, o + hw, layer.biases[co]);
    for (std::size_t ci = 0; ci < layer.in_channels; ++ci) {
      const double* src = in + ci * hw;
      const double* wk = layer.weights.data() + (co * layer.in_channels + ci) * k * k;
      for (std::size_t ky = 0; ky < k; ++ky) {
        const std::ptrdiff_t dy = static_cast<std::ptrdiff_t>(ky) - pad;
        const Span2 ys = valid_range(h, dy);
        for (std::size_t kx = 0; kx < k; ++kx) {
          const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(kx) - pad;
          const Span2 xs = valid_range(w, dx);
          const double wv = wk[ky * k + kx];
          for (std::size_t y = ys.lo; y < ys.hi; ++y) {
            double* orow = o + y * w;
            const double* irow = src + static_cast<std::ptrdiff_t>((y + dy) * w) + dx;
            for (std::size_t x = xs.lo; x < xs.hi; ++x) {
              orow[x] += wv * irow[x];
            }
          }
        }
      }
    }
  }
}

// Accumulates weight/bias gradients of one layer and, if gin is non-null,
// the gradient with respect to its input.
void conv_backward(const ConvLayer& layer, const double* in, const double* g, double* gw,
                   double* gb, double* gin, std::size_t h, std::size_t w) {
  const std::size_t hw = h * w;
  const std::size_t k = layer.kernel;
  const auto pad = static_cast<std::ptrdiff_t>(k / 2);
  for (std::size_t co = 0; co < layer.out_channels; ++co) {
    const double* gc = g + co * hw;
    double bsum = 0.0;
    for (std::size_t i = 0; i < hw; ++i) {
      bsum += gc[i];
    }
    gb[co] += bsum;
    for (std::size_t ci = 0; ci < layer.in_channels; ++ci) {
      const double* src = in + ci * hw;
      double* dst = gin != nullptr ? gin + ci * hw : nullptr;
      const std::size_t base = (co * layer.in_channels + ci) * k * k;
      for (std::size_t ky = 0; ky < k; ++ky) {
        const std::ptrdiff_t dy = static_cast<std::ptrdiff_t>(ky) - pad;
        const Span2 ys = valid_range(h, dy);
        for (std::size_t kx = 0; kx < k; ++kx) {
          const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(kx) - pad;
          const Span2 xs = valid_range(w, dx);
          const double wv = layer.weights[base + ky * k + kx];
          double acc = 0.0;
          for (std::size_t y = ys.lo; y < ys.hi; ++y) {
            const double* grow = gc + y * w;
            const std::ptrdiff_t off = static_cast<std::ptrdiff_t>((y + dy) * w) + dx;
            const double* irow = src + off;
            for (std::size_t x = xs.lo; x < xs.hi; ++x) {
              acc += grow[x] * irow[x];
            }
            if (dst != nullptr) {
              double* drow = dst + off;
              for (std::size_t x = xs.lo; x < xs.hi; ++x) {
                drow[x] += wv * grow[x];
              }
            }
          }
          gw[base + ky * k + kx] += acc;
        }
      }
    }
  }
}

void check_input(const NetworkModel& model, const FeatureBatch& ilr) {
  if (model.layers.empty()) {
    throw InvalidParameter("network has no layers");
  }
  if (ilr.channels != model.layers.front().in_channels) {
    throw ShapeMismatch("network expects " + std::to_string(model.layers.front().in_channels) +
                        " input channel(s), got " + std::to_string(ilr.channels));
  }
  if (ilr.batch == 0 || ilr.height == 0 || ilr.width == 0) {
    throw DegenerateInput("input batch has a zero dimension");
  }
}

}  // namespace

FeatureBatch::FeatureBatch(std::size_t n, std::size_t c, std::size_t h, std::size_t w, double fill)
    : batch(n), channels(c), height(h), width(w), data(n * c * h * w, fill) {}

ConvLayer::ConvLayer(std::size_t out_ch, std::size_t in_ch, std::size_t k)
    : out_channels(out_ch),
      in_channels(in_ch),
      kernel(k),
      weights(out_ch * in_ch * k * k, 0.0),
      biases(out_ch, 0.0) {
  if (k % 2 == 0) {
    throw InvalidParameter("convolution kernel size must be odd, got " + std::to_string(k));
  }
  if (out_ch == 0 || in_ch == 0) {
    throw InvalidParameter("convolution channel counts must be >= 1");
  }
}

std::size_t NetworkModel::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers) {
    n += l.weights.size() + l.biases.size();
  }
  return n;
}

void NetworkModel::validate() const {
  if (layers.empty()) {
    throw InvalidParameter("network has no layers");
  }
  if (layers.front().in_channels != 1 || layers.back().out_channels != 1) {
    throw InvalidParameter("network must map one luminance channel to one residual channel");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.kernel != kernel || l.kernel % 2 == 0) {
      throw InvalidParameter("layer " + std::to_string(i) + " has inconsistent kernel size");
    }
    if (l.weights.size() != l.weight_count() || l.biases.size() != l.out_channels) {
      throw InvalidParameter("layer " + std::to_string(i) + " parameter arrays have wrong size");
    }
    if (i + 1 < layers.size() && layers[i + 1].in_channels != l.out_channels) {
      throw InvalidParameter("layer " + std::to_string(i + 1) + " input does not match layer " +
                             std::to_string(i) + " output");
    }
    if (i > 0 && i + 1 < layers.size() &&
        (l.in_channels != filters || l.out_channels != filters)) {
      throw InvalidParameter("interior layer " + std::to_string(i) + " width differs from filters");
    }
  }
}

GradientSet GradientSet::zeros_like(const NetworkModel& model) {
  GradientSet g;
  g.layers.reserve(model.layers.size());
  for (const auto& l : model.layers) {
    g.layers.push_back({std::vector<double>(l.weights.size(), 0.0),
                        std::vector<double>(l.biases.size(), 0.0)});
  }
  return g;
}

void GradientSet::accumulate(const GradientSet& other) {
  if (other.layers.size() != layers.size()) {
    throw ShapeMismatch("gradient sets have different depth");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& a = layers[l];
    const auto& b = other.layers[l];
    if (a.weights.size() != b.weights.size() || a.biases.size() != b.biases.size()) {
      throw ShapeMismatch("gradient sets are not congruent");
    }
    for (std::size_t i = 0; i < a.weights.size(); ++i) a.weights[i] += b.weights[i];
    for (std::size_t i = 0; i < a.biases.size(); ++i) a.biases[i] += b.biases[i];
  }
}

void GradientSet::scale(double factor) {
  for (auto& l : layers) {
    for (double& v : l.weights) v *= factor;
    for (double& v : l.biases) v *= factor;
  }
}

double GradientSet::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& l : layers) {
    for (double v : l.weights) m = std::max(m, std::abs(v));
    for (double v : l.biases) m = std::max(m, std::abs(v));
  }
  return m;
}

NetworkModel zero_model(std::size_t depth, std::size_t filters, std::size_t kernel) {
  if (depth < 1) {
    throw InvalidParameter("network depth must be >= 1");
  }
  if (filters < 1) {
    throw InvalidParameter("filter count must be >= 1");
  }
  NetworkModel m;
  m.filters = filters;
  m.kernel = kernel;
  m.layers.reserve(depth);
  for (std::size_t i = 0; i < depth; ++i) {
    const std::size_t in = i == 0 ? 1 : filters;
    const std::size_t out = i + 1 == depth ? 1 : filters;
    m.layers.emplace_back(out, in, kernel);
  }
  m.info.provenance = "zero";
  return m;
}

NetworkModel init_model(std::size_t depth, std::size_t filters, std::size_t kernel,
                        std::uint64_t seed) {
  if (depth < 2) {
    throw InvalidParameter("init_model: depth must be >= 2");
  }
  NetworkModel m = zero_model(depth, filters, kernel);
  std::mt19937_64 rng(seed);
  for (auto& l : m.layers) {
    const double fan_in = static_cast<double>(l.in_channels * l.kernel * l.kernel);
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
    for (double& v : l.weights) {
      v = dist(rng);
    }
  }
  m.info.provenance = "fresh seed=" + std::to_string(seed);
  return m;
}

ForwardTrace forward_trace(const NetworkModel& model, const FeatureBatch& ilr) {
  check_input(model, ilr);
  const std::size_t h = ilr.height, w = ilr.width;
  ForwardTrace trace;
  trace.activations.reserve(model.layers.size() + 1);
  trace.activations.push_back(ilr);
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const ConvLayer& layer = model.layers[l];
    const FeatureBatch& in = trace.activations.back();
    FeatureBatch out(in.batch, layer.out_channels, h, w);
    for (std::size_t n = 0; n < in.batch; ++n) {
      conv_forward(layer, in.item(n).data(), out.item(n).data(), h, w);
    }
    if (l + 1 < model.layers.size()) {
      for (double& v : out.data) {
        v = v > 0.0 ? v : 0.0;
      }
    }
    trace.activations.push_back(std::move(out));
  }
  return trace;
}

Prediction forward(const NetworkModel& model, const FeatureBatch& ilr) {
  ForwardTrace trace = forward_trace(model, ilr);
  Prediction p;
  p.residual = std::move(trace.activations.back());
  p.sr = ilr;
  for (std::size_t i = 0; i < p.sr.data.size(); ++i) {
    p.sr.data[i] += p.residual.data[i];
  }
  return p;
}

GradientSet backward(const NetworkModel& model, const ForwardTrace& trace,
                     const FeatureBatch& grad_out, FeatureBatch* grad_input) {
  if (trace.activations.size() != model.layers.size() + 1) {
    throw ShapeMismatch("forward trace does not belong to this model");
  }
  const FeatureBatch& input = trace.activations.front();
  if (!grad_out.same_shape(trace.activations.back())) {
    throw ShapeMismatch("output gradient shape differs from network output shape");
  }
  const std::size_t h = input.height, w = input.width;
  GradientSet grads = GradientSet::zeros_like(model);

  FeatureBatch g = grad_out;
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    const ConvLayer& layer = model.layers[l];
    const FeatureBatch& in = trace.activations[l];
    const bool need_input_grad = l > 0 || grad_input != nullptr;
    FeatureBatch gin;
    if (need_input_grad) {
      gin = FeatureBatch(in.batch, in.channels, h, w);
    }
    auto& lg = grads.layers[l];
    for (std::size_t n = 0; n < in.batch; ++n) {
      conv_backward(layer, in.item(n).data(), g.item(n).data(), lg.weights.data(),
                    lg.biases.data(), need_input_grad ? gin.item(n).data() : nullptr, h, w);
    }
    if (l > 0) {
      // ReLU mask; the subgradient at 0 is 0.
      for (std::size_t i = 0; i < gin.data.size(); ++i) {
        if (!(in.data[i] > 0.0)) {
          gin.data[i] = 0.0;
        }
      }
      g = std::move(gin);
    } else if (grad_input != nullptr) {
      for (std::size_t i = 0; i < gin.data.size(); ++i) {
        gin.data[i] += grad_out.data[i];
      }
      *grad_input = std::move(gin);
    }
  }
  return grads;
}

GradientSet backward(const NetworkModel& model, const FeatureBatch& ilr,
                     const FeatureBatch& grad_out, FeatureBatch* grad_input) {
  return backward(model, forward_trace(model, ilr), grad_out, grad_input);
}

GradientSet clip_gradients(GradientSet grads, double theta) {
  if (!(theta > 0.0)) {
    throw InvalidParameter("gradient clipping threshold must be > 0");
  }
  for (auto& l : grads.layers) {
    for (double& v : l.weights) v = std::clamp(v, -theta, theta);
    for (double& v : l.biases) v = std::clamp(v, -theta, theta);
  }
  return grads;
}

void apply_sgd(NetworkModel& model, const GradientSet& grads, double learning_rate) {
  if (grads.layers.size() != model.layers.size()) {
    throw ShapeMismatch("gradient set does not match model depth");
  }
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto& layer = model.layers[l];
    const auto& g = grads.layers[l];
    for (std::size_t i = 0; i < layer.weights.size(); ++i) layer.weights[i] -= learning_rate * g.weights[i];
    for (std::size_t i = 0; i < layer.biases.size(); ++i) layer.biases[i] -= learning_rate * g.biases[i];
  }
}

bool all_finite(const NetworkModel& model) noexcept {
  for (const auto& l : model.layers) {
    for (double v : l.weights) if (!std::isfinite(v)) return false;
    for (double v : l.biases) if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace vdsr
