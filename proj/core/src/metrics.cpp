#include "vdsr/metrics.hpp"

#include <array>
#include <cmath>
#include <cstdio>

#include "vdsr/errors.hpp"

namespace vdsr {

namespace {

void require_same(const ImagePlane& a, const ImagePlane& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeMismatch(std::string(what) + ": planes differ in size");
  }
  if (a.empty()) {
    throw DegenerateInput(std::string(what) + ": empty plane");
  }
}

std::array<double, kSsimWindow> gaussian_window() {
  std::array<double, kSsimWindow> w{};
  const double c = static_cast<double>(kSsimWindow / 2);
  double sum = 0.0;
  for (std::size_t i = 0; i < kSsimWindow; ++i) {
    const double d = static_cast<double>(i) - c;
    w[i] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Valid-region separable Gaussian filter of the element-wise product x*y.
std::vector<double> filter_product(const ImagePlane& x, const ImagePlane& y,
                                   const std::array<double, kSsimWindow>& g) {
  const std::size_t h = x.height(), w = x.width();
  const std::size_t oh = h - kSsimWindow + 1, ow = w - kSsimWindow + 1;
  std::vector<double> tmp(h * ow);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kSsimWindow; ++k) acc += g[k] * (x(r, c + k) * y(r, c + k));
      tmp[r * ow + c] = acc;
    }
  }
  std::vector<double> out(oh * ow);
  for (std::size_t r = 0; r < oh; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kSsimWindow; ++k) acc += g[k] * tmp[(r + k) * ow + c];
      out[r * ow + c] = acc;
    }
  }
  return out;
}

}  // namespace

double mse(const ImagePlane& a, const ImagePlane& b) {
  require_same(a, b, "mse");
  double acc = 0.0;
  auto sa = a.samples(), sb = b.samples();
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const double d = sa[i] - sb[i];
    acc += d * d;
  }
  return acc / static_cast<double>(sa.size());
}

double psnr(const ImagePlane& a, const ImagePlane& b, double peak) {
  if (!(peak > 0.0)) throw InvalidParameter("psnr: peak must be > 0");
  const double m = mse(a, b);
  if (m == 0.0) return kPsnrInfinity;
  return 10.0 * std::log10(peak * peak / m);
}

double ssim(const ImagePlane& a, const ImagePlane& b, double peak) {
  if (!a.same_shape(b)) throw ShapeMismatch("ssim: planes differ in size");
  if (a.height() < kSsimWindow || a.width() < kSsimWindow) {
    throw DegenerateInput("ssim: planes must be at least 11x11");
  }
  if (!(peak > 0.0)) throw InvalidParameter("ssim: peak must be > 0");
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  const auto g = gaussian_window();
  const ImagePlane one(a.height(), a.width(), 1.0);
  const auto mu_a = filter_product(a, one, g);
  const auto mu_b = filter_product(b, one, g);
  const auto e_aa = filter_product(a, a, g);
  const auto e_bb = filter_product(b, b, g);
  const auto e_ab = filter_product(a, b, g);
  double sum = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i], mb = mu_b[i];
    const double va = e_aa[i] - ma * ma;
    const double vb = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    sum += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return sum / static_cast<double>(mu_a.size());
}

QualityScore score_pair(const ImagePlane& original, const ImagePlane& reconstructed) {
  return {psnr(original, reconstructed, 1.0), ssim(original, reconstructed, 1.0)};
}

std::string format_score_cell(const QualityScore& s) {
  char buf[64];
  if (std::isinf(s.psnr_db)) {
    std::snprintf(buf, sizeof buf, "inf/%.3f", s.ssim);
  } else {
    std::snprintf(buf, sizeof buf, "%.2f/%.3f", s.psnr_db, s.ssim);
  }
  return buf;
}

}  // namespace vdsr
