#include <gtest/gtest.h>

#include <cmath>
#include <iomanip>
#include <random>

#include "test_support.hpp"
#include "vdsr/errors.hpp"
#include "vdsr/synthetic.hpp"
#include "vdsr/trainer.hpp"

namespace vdsr {
namespace {

using testing::random_plane;
using testing::random_rgb;
using testing::rel_err;

constexpr double kFrozenMseLoss = 0.010366567558515739;
constexpr double kFrozenVarNormLoss = 12.347367241523385;

std::vector<PatchPair> small_pairs(std::size_t images, std::uint64_t seed) {
  const auto scenes = synthetic_images(images, 24, 24, seed);
  const std::vector<int> scales{2};
  return build_dataset(scenes, scales, 9, 4);
}

TrainingConfig small_config(const LossEstimator& est) {
  TrainingConfig cfg;
  cfg.estimator = est;
  cfg.epochs = 3;
  cfg.mini_batch = 5;
  cfg.seed = 3;
  cfg.threads = 1;
  return cfg;
}

TEST(BuildDataset, Cardinality) {
  std::mt19937_64 rng(1);
  std::vector<RgbImage> images;
  for (int i = 0; i < 10; ++i) images.push_back(random_rgb(50 + i, 60, rng));
  const std::vector<int> one{4}, three{2, 3, 4};
  EXPECT_EQ(build_dataset(images, one, 41, 6).size(), 10u * 6u);
  EXPECT_EQ(build_dataset(images, three, 41, 6).size(), 10u * 6u * 3u);
  // Counting rule applied to the full corpora sizes.
  auto expected = [](std::size_t n, std::size_t per, std::size_t scales) { return n * per * scales; };
  EXPECT_EQ(expected(2925, 6, 1), 17550u);
  EXPECT_EQ(expected(3388, 6, 1), 20328u);
}

TEST(BuildDataset, OrderAndSources) {
  std::mt19937_64 rng(2);
  std::vector<RgbImage> images{random_rgb(45, 45, rng), random_rgb(45, 50, rng)};
  const std::vector<int> scales{2, 4};
  const auto pairs = build_dataset(images, scales, 41, 2);
  ASSERT_EQ(pairs.size(), 8u);
  const int expect_scale[] = {2, 2, 4, 4, 2, 2, 4, 4};
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(pairs[i].source, i / 4);
    EXPECT_EQ(pairs[i].scale, expect_scale[i]);
    EXPECT_EQ(pairs[i].ilr.height(), 41u);
  }
}

TEST(BuildDataset, ResidualPlusIlrIsLuminancePatch) {
  std::mt19937_64 rng(3);
  const auto img = random_rgb(50, 47, rng);
  const std::vector<int> scales{3};
  const auto pairs = build_pairs(img, 0, scales, 41, 6);
  const auto y = rgb_to_luminance(img);
  const auto hr = patchify(y, 41, 6);
  ASSERT_EQ(pairs.size(), 6u);
  for (std::size_t k = 0; k < 6; ++k) {
    for (std::size_t i = 0; i < 41 * 41; ++i) {
      EXPECT_NEAR(pairs[k].ilr.samples()[i] + pairs[k].residual.samples()[i], hr[k].samples()[i], 1e-12);
    }
  }
}

TEST(BuildDataset, ConstantImageHasZeroResidual) {
  const RgbImage img(ImagePlane(60, 60, 0.3), ImagePlane(60, 60, 0.5), ImagePlane(60, 60, 0.8));
  const std::vector<int> scales{2, 3, 4};
  for (const auto& p : build_pairs(img, 0, scales, 41, 6)) {
    for (double v : p.residual.samples()) EXPECT_LE(std::fabs(v), 1e-12);
  }
}

TEST(BuildDataset, Errors) {
  std::mt19937_64 rng(4);
  std::vector<RgbImage> images{random_rgb(50, 50, rng), random_rgb(30, 50, rng)};
  const std::vector<int> scales{2};
  try {
    build_dataset(images, scales, 41, 6);
    FAIL() << "expected DegenerateInput";
  } catch (const DegenerateInput& e) {
    EXPECT_NE(std::string(e.what()).find("image 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(build_dataset(std::span<const RgbImage>{}, scales, 41, 6), DegenerateInput);
}

TEST(EpochRmse, Examples) {
  const std::vector<double> a{1, 2, 3}, b{1, 2, 3};
  EXPECT_EQ(epoch_rmse(a, b), 0.0);
  const std::vector<double> c{0, 0, 0, 0}, d{1, -1, 1, -1};
  EXPECT_DOUBLE_EQ(epoch_rmse(c, d), 1.0);
  EXPECT_THROW(epoch_rmse(std::vector<double>{1}, std::vector<double>{1, 2}), ShapeMismatch);
  EXPECT_THROW(epoch_rmse(std::vector<double>{}, std::vector<double>{}), DegenerateInput);
}

TEST(EpochRmse, PlanesMatchFlatOracle) {
  std::mt19937_64 rng(5);
  std::vector<ImagePlane> p, t;
  std::vector<double> fp, ft;
  for (int k = 0; k < 4; ++k) {
    p.push_back(random_plane(5, 5, rng));
    t.push_back(random_plane(5, 5, rng));
    fp.insert(fp.end(), p.back().samples().begin(), p.back().samples().end());
    ft.insert(ft.end(), t.back().samples().begin(), t.back().samples().end());
  }
  double acc = 0;
  for (std::size_t i = 0; i < fp.size(); ++i) acc += (fp[i] - ft[i]) * (fp[i] - ft[i]);
  EXPECT_NEAR(epoch_rmse(p, t), std::sqrt(acc / static_cast<double>(fp.size())), 1e-14);
}

TEST(Config, DefaultsFollowEstimator) {
  TrainingConfig cfg;
  EXPECT_EQ(cfg.effective_epochs(), 8u);
  EXPECT_EQ(cfg.mini_batch, 64u);
  EXPECT_DOUBLE_EQ(cfg.learning_rate, 0.1);
  EXPECT_DOUBLE_EQ(cfg.effective_clip_theta(), 0.1);
  cfg.estimator = LossEstimator::var_norm();
  EXPECT_EQ(cfg.effective_epochs(), 5u);
  cfg.learning_rate = 0.0;
  EXPECT_TRUE(std::isinf(cfg.effective_clip_theta()));
}

TEST(Config, ParseFormatRoundTrip) {
  const auto cfg = parse_config(
      "# toy run\n"
      "epochs = 30\n"
      "batch=8\n"
      "lr=0.05   # reduced\n"
      "estimator=var-norm\n"
      "r=0.2\n"
      "scales=2,4\n"
      "seed=77\n");
  EXPECT_EQ(cfg.effective_epochs(), 30u);
  EXPECT_EQ(cfg.mini_batch, 8u);
  EXPECT_DOUBLE_EQ(cfg.learning_rate, 0.05);
  EXPECT_EQ(cfg.estimator, LossEstimator::var_norm(0.2));
  EXPECT_EQ(cfg.scales, (std::vector<int>{2, 4}));
  EXPECT_EQ(cfg.seed, 77u);

  const auto again = parse_config(format_config(cfg));
  EXPECT_EQ(format_config(again), format_config(cfg));
  EXPECT_EQ(again.estimator, cfg.estimator);
  EXPECT_DOUBLE_EQ(again.effective_clip_theta(), cfg.effective_clip_theta());
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("bogus=1"), InvalidParameter);
  EXPECT_THROW(parse_config("epochs"), InvalidParameter);
  EXPECT_THROW(parse_config("epochs=0"), InvalidParameter);
  EXPECT_THROW(parse_config("lr=-1"), InvalidParameter);
  EXPECT_THROW(parse_config("scales=2,5"), InvalidParameter);
  EXPECT_THROW(parse_config("scales=2,2"), InvalidParameter);
  EXPECT_THROW(parse_config("estimator=var-norm\nr=0"), InvalidParameter);
  EXPECT_THROW(parse_config("batch=abc"), InvalidParameter);
}

TEST(Train, ZeroLearningRateLeavesModelUntouched) {
  const auto pairs = small_pairs(3, 10);
  const auto model = init_model(3, 4, 3, 5);
  for (const auto& est : {LossEstimator::mse(), LossEstimator::var_norm()}) {
    auto cfg = small_config(est);
    cfg.learning_rate = 0.0;
    const auto result = train(model, pairs, cfg);
    EXPECT_EQ(result.model, model);
    ASSERT_EQ(result.logs.size(), 3u);
  }
}

TEST(Train, ReproducibleAndThreadIndependent) {
  const auto pairs = small_pairs(4, 11);
  const auto model = init_model(3, 4, 3, 6);
  for (const auto& est : {LossEstimator::mse(), LossEstimator::var_norm()}) {
    auto cfg = small_config(est);
    const auto a = train(model, pairs, cfg);
    const auto b = train(model, pairs, cfg);
    cfg.threads = 3;
    const auto c = train(model, pairs, cfg);
    EXPECT_EQ(a.model, b.model);
    EXPECT_EQ(a.model, c.model);
    ASSERT_EQ(a.logs.size(), c.logs.size());
    for (std::size_t e = 0; e < a.logs.size(); ++e) {
      EXPECT_EQ(a.logs[e].loss, c.logs[e].loss);
      EXPECT_EQ(a.logs[e].rmse, c.logs[e].rmse);
    }
    cfg.seed = 4;
    EXPECT_NE(train(model, pairs, cfg).model, a.model);
  }
}

TEST(Train, EpochCallbackAndMetadata) {
  const auto pairs = small_pairs(2, 12);
  auto model = init_model(2, 3, 3, 7);
  model.info.provenance = "custom";
  std::vector<std::size_t> seen;
  const auto r = train(model, pairs, small_config(LossEstimator::mse()),
                       [&](const EpochLog& log) { seen.push_back(log.epoch); });
  EXPECT_EQ(seen, (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(r.model.info, model.info);
  for (const auto& log : r.logs) {
    EXPECT_TRUE(std::isfinite(log.loss));
    EXPECT_GE(log.rmse, 0.0);
  }
}

TEST(Train, FirstEpochRmseMatchesDirectForward) {
  // With lr = 0 every epoch sees the same model, so the logged RMSE equals
  // the RMSE of one forward pass over the whole set.
  const auto pairs = small_pairs(3, 13);
  const auto model = init_model(3, 4, 3, 8);
  auto cfg = small_config(LossEstimator::mse());
  cfg.learning_rate = 0.0;
  const auto r = train(model, pairs, cfg);
  std::vector<ImagePlane> pred, target;
  for (const auto& p : pairs) {
    FeatureBatch in(1, 1, p.ilr.height(), p.ilr.width());
    std::copy(p.ilr.samples().begin(), p.ilr.samples().end(), in.data.begin());
    pred.emplace_back(p.ilr.height(), p.ilr.width(), forward(model, in).residual.data);
    target.push_back(p.residual);
  }
  EXPECT_LE(rel_err(r.logs[0].rmse, epoch_rmse(pred, target)), 1e-12);
}

TEST(Train, Errors) {
  const auto model = init_model(2, 2, 3, 9);
  EXPECT_THROW(train(model, std::span<const PatchPair>{}, small_config(LossEstimator::mse())),
               DegenerateInput);

  auto pairs = small_pairs(2, 14);
  pairs[1].residual = ImagePlane(3, 3);
  EXPECT_THROW(train(model, pairs, small_config(LossEstimator::mse())), ShapeMismatch);
}

TEST(Train, DivergenceIsReported) {
  const auto pairs = small_pairs(2, 15);
  auto model = init_model(3, 4, 3, 10);
  for (auto& l : model.layers)
    for (double& w : l.weights) w *= 1e120;
  try {
    train(model, pairs, small_config(LossEstimator::mse()));
    FAIL() << "expected DivergenceDetected";
  } catch (const DivergenceDetected& e) {
    EXPECT_EQ(e.epoch(), 1u);
  }
}

// Regression lock on the full training arithmetic (shuffle, batching,
// chunked reduction, clipping). Values were produced by this implementation
// and cross-checked against the reproducibility tests above.
TEST(Train, FrozenReferenceLoss) {
  const auto pairs = small_pairs(3, 21);
  const auto model = init_model(3, 4, 3, 22);
  const auto mse = train(model, pairs, small_config(LossEstimator::mse()));
  const auto vn = train(model, pairs, small_config(LossEstimator::var_norm()));
  EXPECT_LE(rel_err(mse.logs.back().loss, kFrozenMseLoss), 1e-9) << std::setprecision(17)
                                                                   << mse.logs.back().loss;
  EXPECT_LE(rel_err(vn.logs.back().loss, kFrozenVarNormLoss), 1e-9) << std::setprecision(17)
                                                                      << vn.logs.back().loss;
}

}  // namespace
}  // namespace vdsr
