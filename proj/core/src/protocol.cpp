#include "vdsr/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "vdsr/errors.hpp"

namespace vdsr {

ImagePlane predict_luminance(const NetworkModel& model, const ImagePlane& ilr,
                             ImagePlane* residual_out) {
  FeatureBatch in(1, 1, ilr.height(), ilr.width());
  std::copy(ilr.samples().begin(), ilr.samples().end(), in.data.begin());
  Prediction p = forward(model, in);
  ImagePlane sr(ilr.height(), ilr.width());
  auto dst = sr.samples();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = std::clamp(p.sr.data[i], 0.0, 1.0);
  }
  if (residual_out != nullptr) {
    *residual_out = ImagePlane(ilr.height(), ilr.width(), std::move(p.residual.data));
  }
  return sr;
}

SynthesizedResult run_synthesized(const NetworkModel* model, const RgbImage& hr, int factor) {
  SynthesizedResult r;
  r.original_y = rgb_to_luminance(hr);
  r.ilr_y = make_ilr(r.original_y, factor);
  r.lr_height = hr.height() / static_cast<std::size_t>(factor);
  r.lr_width = hr.width() / static_cast<std::size_t>(factor);
  const ChromaPlanes chroma = rgb_to_chroma(hr);
  r.chroma = {make_ilr(chroma.cb, factor), make_ilr(chroma.cr, factor)};
  if (model != nullptr) {
    r.sr_y = predict_luminance(*model, r.ilr_y, &r.residual);
  } else {
    r.sr_y = r.ilr_y;
    r.residual = ImagePlane(hr.height(), hr.width(), 0.0);
  }
  return r;
}

RgbImage SynthesizedResult::sr_rgb() const { return ycbcr_to_rgb(sr_y, chroma); }
RgbImage SynthesizedResult::bicubic_rgb() const { return ycbcr_to_rgb(ilr_y, chroma); }

double stretch_residual(const ImagePlane& residual, ImagePlane& out) {
  double max_abs = 0.0;
  for (double v : residual.samples()) max_abs = std::max(max_abs, std::abs(v));
  out = ImagePlane(residual.height(), residual.width(), 0.5);
  if (max_abs > 0.0) {
    auto src = residual.samples();
    auto dst = out.samples();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = 0.5 + src[i] / (2.0 * max_abs);
  }
  return max_abs;
}

}  // namespace vdsr
