#pragma once

#include <cstddef>

#include "vdsr/image.hpp"
#include "vdsr/metrics.hpp"
#include "vdsr/network.hpp"

namespace vdsr {

/// Output of the synthesized super-resolution experiment on one HR image:
/// downsample by the factor, bicubic back up (ILR), predict the luminance
/// residual and recombine with bicubic chroma.
struct SynthesizedResult {
  std::size_t lr_height = 0;
  std::size_t lr_width = 0;
  ImagePlane original_y;
  ImagePlane ilr_y;
  ImagePlane residual;  // raw network output, zero for the bicubic baseline
  ImagePlane sr_y;      // ilr_y + residual, clamped to [0,1]
  ChromaPlanes chroma;  // bicubic-resampled Cb/Cr

  RgbImage sr_rgb() const;
  RgbImage bicubic_rgb() const;
  QualityScore sr_score() const { return score_pair(original_y, sr_y); }
  QualityScore bicubic_score() const { return score_pair(original_y, ilr_y); }
};

/// `model == nullptr` runs the bicubic baseline only.
SynthesizedResult run_synthesized(const NetworkModel* model, const RgbImage& hr, int factor);

/// Super-resolves a luminance ILR plane through the network (clamped).
ImagePlane predict_luminance(const NetworkModel& model, const ImagePlane& ilr,
                             ImagePlane* residual_out = nullptr);

/// Maps a signed residual to [0,1] by v' = 0.5 + v / (2 max|v|). Returns the
/// stretch denominator max|v| (0 leaves the plane at mid-grey).
double stretch_residual(const ImagePlane& residual, ImagePlane& out);

}  // namespace vdsr
