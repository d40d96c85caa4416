#pragma once

#include <limits>
#include <string>

#include "vdsr/image.hpp"

namespace vdsr {

/// PSNR is +infinity when the planes are identical.
struct QualityScore {
  double psnr_db = 0.0;
  double ssim = 0.0;
};

inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

double mse(const ImagePlane& a, const ImagePlane& b);

/// 10 log10(peak^2 / MSE).
double psnr(const ImagePlane& a, const ImagePlane& b, double peak = 1.0);

/// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03, averaged over every window position fully inside the image.
double ssim(const ImagePlane& a, const ImagePlane& b, double peak = 1.0);

inline constexpr std::size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

QualityScore score_pair(const ImagePlane& original, const ImagePlane& reconstructed);

/// "32.54/0.940"; infinite PSNR renders as "inf".
std::string format_score_cell(const QualityScore& s);

}  // namespace vdsr
