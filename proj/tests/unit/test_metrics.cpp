#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "vdsr/errors.hpp"
#include "vdsr/metrics.hpp"

namespace vdsr {
namespace {

using testing::random_plane;
using testing::rel_err;

double psnr_oracle(const ImagePlane& a, const ImagePlane& b) {
  double acc = 0;
  for (std::size_t r = 0; r < a.height(); ++r)
    for (std::size_t c = 0; c < a.width(); ++c) acc += (a(r, c) - b(r, c)) * (a(r, c) - b(r, c));
  return 10.0 * std::log10(1.0 / (acc / static_cast<double>(a.size())));
}

// Direct 2-D windowed SSIM: every statistic summed over the full 11x11
// Gaussian window at every valid position.
double ssim_oracle(const ImagePlane& a, const ImagePlane& b) {
  const int win = 11;
  double w[11][11], total = 0;
  for (int y = 0; y < win; ++y)
    for (int x = 0; x < win; ++x) {
      w[y][x] = std::exp(-((y - 5) * (y - 5) + (x - 5) * (x - 5)) / (2 * 1.5 * 1.5));
      total += w[y][x];
    }
  for (auto& row : w)
    for (double& v : row) v /= total;
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double sum = 0;
  int n = 0;
  for (std::size_t r = 0; r + win <= a.height(); ++r) {
    for (std::size_t c = 0; c + win <= a.width(); ++c) {
      double ma = 0, mb = 0;
      for (int y = 0; y < win; ++y)
        for (int x = 0; x < win; ++x) {
          ma += w[y][x] * a(r + y, c + x);
          mb += w[y][x] * b(r + y, c + x);
        }
      double va = 0, vb = 0, cov = 0;
      for (int y = 0; y < win; ++y)
        for (int x = 0; x < win; ++x) {
          const double da = a(r + y, c + x) - ma, db = b(r + y, c + x) - mb;
          va += w[y][x] * da * da;
          vb += w[y][x] * db * db;
          cov += w[y][x] * da * db;
        }
      sum += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++n;
    }
  }
  return sum / n;
}

TEST(Psnr, IdenticalIsInfinite) {
  std::mt19937_64 rng(1);
  const auto a = random_plane(8, 8, rng);
  EXPECT_EQ(psnr(a, a), kPsnrInfinity);
  EXPECT_EQ(mse(a, a), 0.0);
}

TEST(Psnr, TenGreyLevels) {
  const ImagePlane a(16, 16, 0.0), b(16, 16, 10.0 / 255.0);
  EXPECT_NEAR(psnr(a, b), 20.0 * std::log10(25.5), 1e-9);
  EXPECT_NEAR(psnr(a, b), 28.131, 5e-4);
}

TEST(Psnr, MatchesDirectFormula) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_plane(7 + t, 9, rng), b = random_plane(7 + t, 9, rng);
    EXPECT_NEAR(psnr(a, b), psnr_oracle(a, b), 1e-9);
    EXPECT_EQ(psnr(a, b), psnr(b, a));
  }
}

TEST(Psnr, DecreasesWithNoise) {
  std::mt19937_64 rng(3);
  const auto base = random_plane(20, 20, rng, 0.2, 0.8);
  const auto noise = random_plane(20, 20, rng, -1.0, 1.0);
  double prev = kPsnrInfinity;
  for (double amp : {0.001, 0.01, 0.05, 0.1}) {
    ImagePlane n = base;
    for (std::size_t i = 0; i < n.size(); ++i) n.samples()[i] += amp * noise.samples()[i];
    const double p = psnr(base, n);
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(Psnr, Errors) {
  EXPECT_THROW(psnr(ImagePlane(3, 3), ImagePlane(3, 4)), ShapeMismatch);
  EXPECT_THROW(psnr(ImagePlane(3, 3), ImagePlane(3, 3), 0.0), InvalidParameter);
}

TEST(Ssim, SelfSimilarityIsOne) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 5; ++t) {
    const auto a = random_plane(11 + t * 5, 14 + t, rng);
    EXPECT_EQ(ssim(a, a), 1.0);
  }
  const ImagePlane flat(12, 12, 0.4);
  EXPECT_EQ(ssim(flat, flat), 1.0);
}

TEST(Ssim, MatchesBruteForceOracle) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 3; ++t) {
    const auto a = random_plane(32, 32, rng);
    auto b = a;
    const auto noise = random_plane(32, 32, rng, -0.2, 0.2);
    for (std::size_t i = 0; i < b.size(); ++i) b.samples()[i] += noise.samples()[i] * (t + 1) * 0.5;
    EXPECT_NEAR(ssim(a, b), ssim_oracle(a, b), 1e-10);
  }
  const auto c = random_plane(32, 32, rng), d = random_plane(32, 32, rng);
  EXPECT_NEAR(ssim(c, d), ssim_oracle(c, d), 1e-10);
}

TEST(Ssim, SymmetricAndBounded) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 10; ++t) {
    const auto a = random_plane(15, 17, rng), b = random_plane(15, 17, rng);
    const double s = ssim(a, b);
    EXPECT_EQ(s, ssim(b, a));
    EXPECT_LE(std::fabs(s), 1.0);
  }
}

TEST(Ssim, Errors) {
  EXPECT_THROW(ssim(ImagePlane(10, 20), ImagePlane(10, 20)), DegenerateInput);
  EXPECT_THROW(ssim(ImagePlane(12, 12), ImagePlane(12, 13)), ShapeMismatch);
}

TEST(ScoreCell, Format) {
  EXPECT_EQ(format_score_cell({32.5449, 0.94049}), "32.54/0.940");
  EXPECT_EQ(format_score_cell({kPsnrInfinity, 1.0}), "inf/1.000");
  std::mt19937_64 rng(7);
  const auto a = random_plane(12, 12, rng), b = random_plane(12, 12, rng);
  const auto s = score_pair(a, b);
  EXPECT_EQ(s.psnr_db, psnr(a, b));
  EXPECT_EQ(s.ssim, ssim(a, b));
}

}  // namespace
}  // namespace vdsr
