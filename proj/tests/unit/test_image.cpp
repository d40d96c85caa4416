#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "test_support.hpp"
#include "vdsr/errors.hpp"
#include "vdsr/image.hpp"

namespace vdsr {
namespace {

using testing::random_plane;
using testing::random_rgb;

RgbImage constant_rgb(std::size_t h, std::size_t w, double r, double g, double b) {
  return RgbImage(ImagePlane(h, w, r), ImagePlane(h, w, g), ImagePlane(h, w, b));
}

// Independent cubic-convolution kernel for the oracles below.
double keys_kernel(double x) {
  const double a = -0.5;
  x = std::fabs(x);
  if (x <= 1) return (a + 2) * x * x * x - (a + 3) * x * x + 1;
  if (x < 2) return a * x * x * x - 5 * a * x * x + 8 * a * x - 4 * a;
  return 0;
}

TEST(Luminance, GrayIsIdentity) {
  const auto y = rgb_to_luminance(constant_rgb(4, 5, 0.37, 0.37, 0.37));
  for (double v : y.samples()) EXPECT_NEAR(v, 0.37, 1e-15);
}

TEST(Luminance, PureRed) {
  const auto y = rgb_to_luminance(constant_rgb(3, 3, 1.0, 0.0, 0.0));
  for (double v : y.samples()) EXPECT_DOUBLE_EQ(v, 0.299);
}

TEST(Luminance, MatchesPerPixelOracle) {
  std::mt19937_64 rng(11);
  const auto img = random_rgb(8, 8, rng);
  const auto y = rgb_to_luminance(img);
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t c = 0; c < 8; ++c) {
      const double expect = 0.299 * img.r(r, c) + 0.587 * img.g(r, c) + 0.114 * img.b(r, c);
      EXPECT_NEAR(y(r, c), expect, 1e-12);
    }
  }
}

TEST(Luminance, StaysInUnitRange) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto y = rgb_to_luminance(random_rgb(7, 9, rng));
    for (double v : y.samples()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Chroma, RoundTripsThroughRgb) {
  std::mt19937_64 rng(13);
  const auto img = random_rgb(6, 6, rng);
  const auto back = ycbcr_to_rgb(rgb_to_luminance(img), rgb_to_chroma(img));
  for (std::size_t i = 0; i < 36; ++i) {
    EXPECT_NEAR(back.r.samples()[i], img.r.samples()[i], 1e-5);
    EXPECT_NEAR(back.g.samples()[i], img.g.samples()[i], 1e-5);
    EXPECT_NEAR(back.b.samples()[i], img.b.samples()[i], 1e-5);
  }
}

TEST(Chroma, GrayHasNeutralChroma) {
  const auto c = rgb_to_chroma(constant_rgb(2, 2, 0.6, 0.6, 0.6));
  for (double v : c.cb.samples()) EXPECT_NEAR(v, 0.5, 1e-12);
  for (double v : c.cr.samples()) EXPECT_NEAR(v, 0.5, 1e-12);
}

TEST(Bicubic, KernelWeightsSumToOne) {
  for (double t = 0.0; t < 1.0; t += 0.0625) {
    const double s = cubic_kernel(t + 1) + cubic_kernel(t) + cubic_kernel(1 - t) + cubic_kernel(2 - t);
    EXPECT_NEAR(s, 1.0, 1e-15);
  }
}

TEST(Bicubic, ConstantPreservedAtEveryScale) {
  const ImagePlane src(13, 17, 0.4321);
  for (auto [h, w] : {std::pair<std::size_t, std::size_t>{1, 1}, {3, 4}, {13, 17}, {26, 34}, {56, 56},
                      {227, 5}}) {
    const auto out = bicubic_resize(src, h, w);
    ASSERT_EQ(out.height(), h);
    ASSERT_EQ(out.width(), w);
    for (double v : out.samples()) EXPECT_NEAR(v, 0.4321, 1e-12);
  }
}

TEST(Bicubic, SameSizeIsIdentity) {
  std::mt19937_64 rng(14);
  const auto src = random_plane(9, 12, rng);
  EXPECT_EQ(bicubic_resize(src, 9, 12), src);
}

TEST(Bicubic, RampUpscaleMatchesDirectKernelSum) {
  ImagePlane ramp(8, 8);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) ramp(r, c) = (static_cast<double>(r) * 8 + c) / 63.0 * 0.9 + 0.05;
  const auto up = bicubic_resize(ramp, 16, 16);
  for (int y = 3; y < 13; ++y) {
    for (int x = 3; x < 13; ++x) {
      const double sy = (y + 0.5) * 0.5 - 0.5, sx = (x + 0.5) * 0.5 - 0.5;
      double acc = 0.0;
      for (int j = 0; j < 8; ++j)
        for (int i = 0; i < 8; ++i) acc += keys_kernel(sy - j) * keys_kernel(sx - i) * ramp(j, i);
      EXPECT_NEAR(up(y, x), acc, 1e-10) << y << "," << x;
    }
  }
}

TEST(Bicubic, RejectsZeroTarget) {
  EXPECT_THROW(bicubic_resize(ImagePlane(4, 4), 0, 3), InvalidParameter);
}

TEST(MakeIlr, Downscale227ByFour) {
  std::mt19937_64 rng(15);
  const auto hr = random_plane(227, 227, rng);
  const auto ilr = make_ilr(hr, 4);
  EXPECT_EQ(ilr.height(), 227u);
  EXPECT_EQ(ilr.width(), 227u);
  // Composition oracle: through an explicit 56x56 intermediate.
  const auto lr = bicubic_resize(hr, 56, 56);
  EXPECT_EQ(ilr, bicubic_resize(lr, 227, 227));
}

TEST(MakeIlr, ConstantImageUnchanged) {
  const ImagePlane hr(20, 30, 0.7);
  for (int f : {2, 3, 4}) {
    const auto ilr = make_ilr(hr, f);
    for (double v : ilr.samples()) EXPECT_NEAR(v, 0.7, 1e-12);
  }
}

TEST(MakeIlr, CheckerboardLosesEnergy) {
  ImagePlane hr(16, 16);
  for (std::size_t r = 0; r < 16; ++r)
    for (std::size_t c = 0; c < 16; ++c) hr(r, c) = ((r + c) % 2) ? 0.9 : 0.1;
  const auto ilr = make_ilr(hr, 2);
  EXPECT_EQ(ilr, bicubic_resize(bicubic_resize(hr, 8, 8), 16, 16));
  double energy = 0.0;
  const auto res = residual_target(hr, ilr);
  for (double v : res.samples()) energy += v * v;
  EXPECT_GT(energy, 1.0);
}

TEST(MakeIlr, SameShapeForEveryFactor) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t h = 4 + rng() % 40, w = 4 + rng() % 40;
    const auto hr = random_plane(h, w, rng);
    for (int f : {2, 3, 4}) {
      const auto ilr = make_ilr(hr, f);
      EXPECT_TRUE(ilr.same_shape(hr));
    }
  }
}

TEST(MakeIlr, Errors) {
  EXPECT_THROW(make_ilr(ImagePlane(3, 10), 4), DegenerateInput);
  EXPECT_THROW(make_ilr(ImagePlane(10, 10), 5), InvalidParameter);
  EXPECT_THROW(make_ilr(ImagePlane(10, 10), 1), InvalidParameter);
}

TEST(Residual, Examples) {
  std::mt19937_64 rng(17);
  const auto a = random_plane(5, 6, rng);
  const auto same = residual_target(a, a);
  for (double v : same.samples()) EXPECT_EQ(v, 0.0);
  const auto r = residual_target(ImagePlane(3, 3, 0.8), ImagePlane(3, 3, 0.3));
  for (double v : r.samples()) EXPECT_NEAR(v, 0.5, 1e-15);

  const auto b = random_plane(5, 6, rng);
  const auto d = residual_target(a, b);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(d.samples()[i], a.samples()[i] - b.samples()[i]);

  EXPECT_THROW(residual_target(a, ImagePlane(6, 5)), ShapeMismatch);
}

TEST(Residual, ReconstructsHr) {
  std::mt19937_64 rng(18);
  for (int f : {2, 3, 4}) {
    const auto hr = random_plane(24, 19, rng);
    const auto ilr = make_ilr(hr, f);
    const auto res = residual_target(hr, ilr);
    for (std::size_t i = 0; i < hr.size(); ++i) {
      EXPECT_NEAR(res.samples()[i] + ilr.samples()[i], hr.samples()[i], 1e-12);
    }
  }
}

TEST(Patchify, SixPatchGridOn227) {
  const auto grid = make_patch_grid(227, 227, 41, 6);
  const std::vector<PatchAnchor> expect = {{0, 0}, {0, 93}, {0, 186}, {186, 0}, {186, 93}, {186, 186}};
  EXPECT_EQ(grid.anchors, expect);
  for (const auto& a : grid.anchors) {
    EXPECT_LE(a.row + 41, 227u);
    EXPECT_LE(a.col + 41, 227u);
  }
}

TEST(Patchify, ExactFitReturnsSource) {
  std::mt19937_64 rng(19);
  const auto src = random_plane(41, 41, rng);
  const auto patches = patchify(src, 41, 1);
  ASSERT_EQ(patches.size(), 1u);
  EXPECT_EQ(patches[0], src);
}

TEST(Patchify, PatchesAreExactSubArrays) {
  std::mt19937_64 rng(20);
  const auto src = random_plane(60, 75, rng);
  const auto grid = make_patch_grid(60, 75, 17, 6);
  const auto patches = patchify(src, grid);
  ASSERT_EQ(patches.size(), 6u);
  for (std::size_t k = 0; k < 6; ++k) {
    const auto a = grid.anchors[k];
    for (std::size_t r = 0; r < 17; ++r)
      for (std::size_t c = 0; c < 17; ++c) ASSERT_EQ(patches[k](r, c), src(a.row + r, a.col + c));
  }
}

TEST(Patchify, RandomGridsAreValid) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = 1 + rng() % 20;
    const std::size_t h = p + rng() % 40, w = p + rng() % 40;
    const std::size_t count = 1 + rng() % 12;
    PatchGrid grid;
    try {
      grid = make_patch_grid(h, w, p, count);
    } catch (const DegenerateInput&) {
      continue;  // not enough room for distinct anchors
    }
    ASSERT_EQ(grid.anchors.size(), count);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& a : grid.anchors) {
      EXPECT_LE(a.row + p, h);
      EXPECT_LE(a.col + p, w);
      seen.insert({a.row, a.col});
    }
    EXPECT_EQ(seen.size(), count);
  }
}

TEST(Patchify, Errors) {
  EXPECT_THROW(patchify(ImagePlane(40, 60), 41, 6), DegenerateInput);
  EXPECT_THROW(patchify(ImagePlane(41, 41), 41, 6), DegenerateInput);
  EXPECT_THROW(patchify(ImagePlane(50, 50), 41, 0), InvalidParameter);
}

TEST(ImagePlane, RejectsBadShapes) {
  EXPECT_THROW(ImagePlane(0, 3), DegenerateInput);
  EXPECT_THROW(ImagePlane(2, 2, std::vector<double>(3)), ShapeMismatch);
  EXPECT_THROW(RgbImage(ImagePlane(2, 2), ImagePlane(2, 3), ImagePlane(2, 2)), ShapeMismatch);
}

}  // namespace
}  // namespace vdsr
