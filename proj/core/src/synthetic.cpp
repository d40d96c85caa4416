#include "vdsr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace vdsr {

RgbImage synthetic_image(std::size_t height, std::size_t width, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  ImagePlane planes[3] = {ImagePlane(height, width), ImagePlane(height, width),
                          ImagePlane(height, width)};
  const double h = static_cast<double>(height), w = static_cast<double>(width);

  // Background gradient.
  double base[3], gx[3], gy[3];
  for (int c = 0; c < 3; ++c) {
    base[c] = uni(0.25, 0.75);
    gx[c] = uni(-0.2, 0.2);
    gy[c] = uni(-0.2, 0.2);
  }
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        planes[c](y, x) = base[c] + gx[c] * (static_cast<double>(x) / w - 0.5) +
                          gy[c] * (static_cast<double>(y) / h - 0.5);
      }
    }
  }

  // Gratings.
  const int gratings = 2 + static_cast<int>(rng() % 2);
  for (int k = 0; k < gratings; ++k) {
    const double theta = uni(0.0, std::numbers::pi);
    const double period = uni(8.0, 20.0);
    const double phase = uni(0.0, 2.0 * std::numbers::pi);
    const double fx = std::cos(theta) * 2.0 * std::numbers::pi / period;
    const double fy = std::sin(theta) * 2.0 * std::numbers::pi / period;
    double amp[3];
    const double a = uni(0.2, 0.4);
    for (double& v : amp) v = a * uni(0.5, 1.0);
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) {
        const double s = std::sin(fx * static_cast<double>(x) + fy * static_cast<double>(y) + phase);
        for (int c = 0; c < 3; ++c) planes[c](y, x) += amp[c] * s;
      }
    }
  }

  // Opaque hard-edged shapes. Dense, high-contrast edges give the toy
  // networks a residual well above their optimisation noise.
  const int shapes = 12 + static_cast<int>(rng() % 8);
  for (int k = 0; k < shapes; ++k) {
    const bool disc = (rng() & 1u) != 0;
    const double cy = uni(0.0, h), cx = uni(0.0, w);
    const double ry = uni(0.04, 0.2) * h, rx = uni(0.04, 0.2) * w;
    double colour[3];
    for (double& v : colour) v = uni(0.05, 0.95);
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) {
        const double dy = (static_cast<double>(y) - cy) / ry;
        const double dx = (static_cast<double>(x) - cx) / rx;
        const bool inside = disc ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
        if (!inside) continue;
        for (int c = 0; c < 3; ++c) planes[c](y, x) = colour[c];
      }
    }
  }

  for (auto& p : planes) {
    for (double& v : p.samples()) v = std::clamp(v, 0.0, 1.0);
  }
  return RgbImage(std::move(planes[0]), std::move(planes[1]), std::move(planes[2]));
}

std::vector<RgbImage> synthetic_images(std::size_t count, std::size_t height, std::size_t width,
                                       std::uint64_t seed) {
  std::vector<RgbImage> out;
  out.reserve(count);
  std::vector<std::uint64_t> seeds(count);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (auto& s : seeds) s = rng();
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(synthetic_image(height, width, seeds[i]));
  }
  return out;
}

}  // namespace vdsr
