#include "vdsr/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vdsr/errors.hpp"

namespace vdsr {

namespace {

constexpr double kCubicA = -0.5;

// BT.601 full-range coefficients.
constexpr double kYr = 0.299, kYg = 0.587, kYb = 0.114;
constexpr double kCbR = -0.168736, kCbG = -0.331264, kCbB = 0.5;
constexpr double kCrR = 0.5, kCrG = -0.418688, kCrB = -0.081312;

double clamp01(double v) noexcept { return std::clamp(v, 0.0, 1.0); }

void require_plane(std::size_t h, std::size_t w) {
  if (h == 0 || w == 0) {
    throw DegenerateInput("image plane must be at least 1x1");
  }
}

struct Taps {
  std::size_t index[4];
  double weight[4];
};

std::vector<Taps> axis_taps(std::size_t in, std::size_t out) {
  std::vector<Taps> taps(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  const auto last = static_cast<std::ptrdiff_t>(in) - 1;
  for (std::size_t o = 0; o < out; ++o) {
    const double src = (static_cast<double>(o) + 0.5) * scale - 0.5;
    const double base = std::floor(src);
    const double t = src - base;
    const auto b = static_cast<std::ptrdiff_t>(base);
    for (int k = 0; k < 4; ++k) {
      const std::ptrdiff_t idx = std::clamp<std::ptrdiff_t>(b - 1 + k, 0, last);
      taps[o].index[k] = static_cast<std::size_t>(idx);
      taps[o].weight[k] = cubic_kernel(t - static_cast<double>(k - 1));
    }
  }
  return taps;
}

}  // namespace

ImagePlane::ImagePlane(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), samples_(height * width, fill) {
  require_plane(height, width);
}

ImagePlane::ImagePlane(std::size_t height, std::size_t width, std::vector<double> samples)
    : height_(height), width_(width), samples_(std::move(samples)) {
  require_plane(height, width);
  if (samples_.size() != height * width) {
    throw ShapeMismatch("sample count " + std::to_string(samples_.size()) + " does not match " +
                        std::to_string(height) + "x" + std::to_string(width));
  }
}

RgbImage::RgbImage(ImagePlane red, ImagePlane green, ImagePlane blue)
    : r(std::move(red)), g(std::move(green)), b(std::move(blue)) {
  if (!r.same_shape(g) || !r.same_shape(b)) {
    throw ShapeMismatch("RGB planes must share dimensions");
  }
}

ImagePlane rgb_to_luminance(const RgbImage& img) {
  ImagePlane y(img.height(), img.width());
  auto out = y.samples();
  auto r = img.r.samples(), g = img.g.samples(), b = img.b.samples();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = clamp01(kYr * r[i] + kYg * g[i] + kYb * b[i]);
  }
  return y;
}

ChromaPlanes rgb_to_chroma(const RgbImage& img) {
  ChromaPlanes c{ImagePlane(img.height(), img.width()), ImagePlane(img.height(), img.width())};
  auto cb = c.cb.samples(), cr = c.cr.samples();
  auto r = img.r.samples(), g = img.g.samples(), b = img.b.samples();
  for (std::size_t i = 0; i < cb.size(); ++i) {
    cb[i] = clamp01(0.5 + kCbR * r[i] + kCbG * g[i] + kCbB * b[i]);
    cr[i] = clamp01(0.5 + kCrR * r[i] + kCrG * g[i] + kCrB * b[i]);
  }
  return c;
}

RgbImage ycbcr_to_rgb(const ImagePlane& y, const ChromaPlanes& chroma) {
  if (!y.same_shape(chroma.cb) || !y.same_shape(chroma.cr)) {
    throw ShapeMismatch("luminance and chroma planes must share dimensions");
  }
  const std::size_t h = y.height(), w = y.width();
  ImagePlane r(h, w), g(h, w), b(h, w);
  auto ys = y.samples(), cb = chroma.cb.samples(), cr = chroma.cr.samples();
  auto rs = r.samples(), gs = g.samples(), bs = b.samples();
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double u = cb[i] - 0.5, v = cr[i] - 0.5;
    rs[i] = clamp01(ys[i] + 1.402 * v);
    gs[i] = clamp01(ys[i] - 0.344136 * u - 0.714136 * v);
    bs[i] = clamp01(ys[i] + 1.772 * u);
  }
  return RgbImage(std::move(r), std::move(g), std::move(b));
}

double cubic_kernel(double x) noexcept {
  const double ax = std::abs(x);
  if (ax <= 1.0) {
    return ((kCubicA + 2.0) * ax - (kCubicA + 3.0)) * ax * ax + 1.0;
  }
  if (ax < 2.0) {
    return ((kCubicA * ax - 5.0 * kCubicA) * ax + 8.0 * kCubicA) * ax - 4.0 * kCubicA;
  }
  return 0.0;
}

ImagePlane bicubic_resize(const ImagePlane& src, std::size_t out_h, std::size_t out_w) {
  if (out_h == 0 || out_w == 0) {
    throw InvalidParameter("bicubic_resize: output dimensions must be >= 1");
  }
  if (src.empty()) {
    throw DegenerateInput("bicubic_resize: empty source");
  }
  const std::size_t in_h = src.height(), in_w = src.width();
  const auto htaps = axis_taps(in_w, out_w);
  const auto vtaps = axis_taps(in_h, out_h);

  std::vector<double> tmp(in_h * out_w);
  for (std::size_t y = 0; y < in_h; ++y) {
    auto row = src.row(y);
    double* dst = tmp.data() + y * out_w;
    for (std::size_t x = 0; x < out_w; ++x) {
      const Taps& t = htaps[x];
      dst[x] = t.weight[0] * row[t.index[0]] + t.weight[1] * row[t.index[1]] +
               t.weight[2] * row[t.index[2]] + t.weight[3] * row[t.index[3]];
    }
  }

  ImagePlane out(out_h, out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    const Taps& t = vtaps[y];
    const double* r0 = tmp.data() + t.index[0] * out_w;
    const double* r1 = tmp.data() + t.index[1] * out_w;
    const double* r2 = tmp.data() + t.index[2] * out_w;
    const double* r3 = tmp.data() + t.index[3] * out_w;
    for (std::size_t x = 0; x < out_w; ++x) {
      out(y, x) = clamp01(t.weight[0] * r0[x] + t.weight[1] * r1[x] + t.weight[2] * r2[x] +
                          t.weight[3] * r3[x]);
    }
  }
  return out;
}

ImagePlane make_ilr(const ImagePlane& hr, int factor) {
  if (factor < 2 || factor > 4) {
    throw InvalidParameter("make_ilr: scale factor must be 2, 3 or 4, got " + std::to_string(factor));
  }
  const auto f = static_cast<std::size_t>(factor);
  if (hr.height() < f || hr.width() < f) {
    throw DegenerateInput("make_ilr: " + std::to_string(hr.height()) + "x" +
                          std::to_string(hr.width()) + " image is smaller than factor " +
                          std::to_string(factor));
  }
  const ImagePlane lr = bicubic_resize(hr, hr.height() / f, hr.width() / f);
  return bicubic_resize(lr, hr.height(), hr.width());
}

ImagePlane residual_target(const ImagePlane& hr, const ImagePlane& ilr) {
  if (!hr.same_shape(ilr)) {
    throw ShapeMismatch("residual_target: HR and ILR dimensions differ");
  }
  ImagePlane out(hr.height(), hr.width());
  auto o = out.samples();
  auto a = hr.samples(), b = ilr.samples();
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] = a[i] - b[i];
  }
  return out;
}

namespace {

std::vector<std::size_t> spread_positions(std::size_t n, std::size_t range, const char* axis) {
  std::vector<std::size_t> pos(n, 0);
  if (n == 1) {
    return pos;
  }
  if (range < n - 1) {
    throw DegenerateInput(std::string("patch grid: not enough room for ") + std::to_string(n) +
                          " distinct " + axis + " offsets");
  }
  for (std::size_t i = 0; i < n; ++i) {
    pos[i] = i * range / (n - 1);
  }
  return pos;
}

}  // namespace

PatchGrid make_patch_grid(std::size_t height, std::size_t width, std::size_t patch_size,
                          std::size_t count) {
  if (patch_size == 0 || count == 0) {
    throw InvalidParameter("patch grid: patch size and count must be >= 1");
  }
  if (height < patch_size || width < patch_size) {
    throw DegenerateInput("patch grid: " + std::to_string(height) + "x" + std::to_string(width) +
                          " source is smaller than patch size " + std::to_string(patch_size));
  }
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
  const std::size_t rows = (count + cols - 1) / cols;
  const auto row_pos = spread_positions(rows, height - patch_size, "row");
  const auto col_pos = spread_positions(cols, width - patch_size, "column");

  PatchGrid grid;
  grid.patch_size = patch_size;
  grid.anchors.reserve(count);
  for (std::size_t r = 0; r < rows && grid.anchors.size() < count; ++r) {
    for (std::size_t c = 0; c < cols && grid.anchors.size() < count; ++c) {
      grid.anchors.push_back({row_pos[r], col_pos[c]});
    }
  }
  return grid;
}

ImagePlane crop(const ImagePlane& src, PatchAnchor anchor, std::size_t patch_size) {
  if (anchor.row + patch_size > src.height() || anchor.col + patch_size > src.width()) {
    throw DegenerateInput("crop: patch exceeds source bounds");
  }
  ImagePlane out(patch_size, patch_size);
  for (std::size_t y = 0; y < patch_size; ++y) {
    auto row = src.row(anchor.row + y);
    std::copy_n(row.begin() + static_cast<std::ptrdiff_t>(anchor.col), patch_size,
                out.samples().begin() + static_cast<std::ptrdiff_t>(y * patch_size));
  }
  return out;
}

std::vector<ImagePlane> patchify(const ImagePlane& src, const PatchGrid& grid) {
  std::vector<ImagePlane> out;
  out.reserve(grid.anchors.size());
  for (const auto& a : grid.anchors) {
    out.push_back(crop(src, a, grid.patch_size));
  }
  return out;
}

std::vector<ImagePlane> patchify(const ImagePlane& src, std::size_t patch_size, std::size_t count) {
  return patchify(src, make_patch_grid(src.height(), src.width(), patch_size, count));
}

}  // namespace vdsr
