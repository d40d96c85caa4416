#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace vdsr {

/// Single-channel row-major image with real samples, nominally in [0,1].
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(std::size_t height, std::size_t width, double fill = 0.0);
  ImagePlane(std::size_t height, std::size_t width, std::vector<double> samples);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  double& operator()(std::size_t row, std::size_t col) noexcept { return samples_[row * width_ + col]; }
  double operator()(std::size_t row, std::size_t col) const noexcept { return samples_[row * width_ + col]; }

  std::span<double> samples() noexcept { return samples_; }
  std::span<const double> samples() const noexcept { return samples_; }
  std::span<const double> row(std::size_t r) const noexcept { return {samples_.data() + r * width_, width_}; }

  bool same_shape(const ImagePlane& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> samples_;
};

/// Three planes of identical dimensions.
struct RgbImage {
  ImagePlane r, g, b;

  RgbImage() = default;
  RgbImage(ImagePlane red, ImagePlane green, ImagePlane blue);

  std::size_t height() const noexcept { return r.height(); }
  std::size_t width() const noexcept { return r.width(); }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

/// Cb and Cr planes of the full-range BT.601 transform, offset by 0.5.
struct ChromaPlanes {
  ImagePlane cb, cr;
};

struct PatchAnchor {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const PatchAnchor&, const PatchAnchor&) = default;
};

/// Top-left anchors of equally sized square patches inside a source image.
struct PatchGrid {
  std::size_t patch_size = 0;
  std::vector<PatchAnchor> anchors;
};

// Colour space (BT.601 full range).
ImagePlane rgb_to_luminance(const RgbImage& img);
ChromaPlanes rgb_to_chroma(const RgbImage& img);
RgbImage ycbcr_to_rgb(const ImagePlane& y, const ChromaPlanes& chroma);

/// Cubic-convolution kernel with a = -0.5.
double cubic_kernel(double x) noexcept;

/// Separable cubic-convolution resampling with replicated borders. Output
/// samples are clamped to [0,1].
ImagePlane bicubic_resize(const ImagePlane& src, std::size_t out_h, std::size_t out_w);

/// Interpolated low-resolution image: bicubic down by `factor` (floor of
/// each dimension) and straight back up to the source size.
ImagePlane make_ilr(const ImagePlane& hr, int factor);

/// Element-wise hr - ilr, unclamped.
ImagePlane residual_target(const ImagePlane& hr, const ImagePlane& ilr);

/// Anchor layout used by `patchify`. For count == 6 this is the 2x3 grid
/// with rows {0, H-P} and columns {0, (W-P)/2, W-P}; other counts use a
/// near-square row-major grid spread evenly over the valid range.
PatchGrid make_patch_grid(std::size_t height, std::size_t width, std::size_t patch_size,
                          std::size_t count);

ImagePlane crop(const ImagePlane& src, PatchAnchor anchor, std::size_t patch_size);

std::vector<ImagePlane> patchify(const ImagePlane& src, std::size_t patch_size, std::size_t count);
std::vector<ImagePlane> patchify(const ImagePlane& src, const PatchGrid& grid);

}  // namespace vdsr
