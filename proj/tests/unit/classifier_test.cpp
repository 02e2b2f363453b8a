#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "incongruity/classifier.hpp"
#include "incongruity/errors.hpp"
#include "test_util.hpp"

using namespace incongruity;

namespace {

FeatureVector fv(std::initializer_list<FeatureVector::Entry> entries) {
  FeatureVector v;
  v.entries = entries;
  return v;
}

// Two Gaussian blobs in `dim` dense features; positives shifted by `gap`.
std::vector<LabeledVector> blobs(std::size_t n, double positive_rate, double gap, std::uint64_t seed,
                                 std::size_t dim = 4) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::bernoulli_distribution pos(positive_rate);
  std::vector<LabeledVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledVector lv;
    lv.positive = pos(rng);
    for (std::size_t d = 0; d < dim; ++d) {
      lv.features.entries.push_back({static_cast<FeatureId>(d), g(rng) + (lv.positive ? gap : 0.0)});
    }
    out.push_back(std::move(lv));
  }
  return out;
}

double train_f(const std::vector<LabeledVector>& data, const LinearModel& m, double threshold) {
  std::vector<double> scores;
  auto labels = std::make_unique<bool[]>(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    scores.push_back(m.score(data[i].features));
    labels[i] = data[i].positive;
  }
  return confusion(scores, {labels.get(), data.size()}, threshold).f1();
}

}  // namespace

TEST(Confusion, CountsAndRatios) {
  const std::vector<double> scores = {0.9, 0.2, -0.1, 0.5};
  const bool labels[] = {true, false, true, false};
  auto c = confusion(scores, labels, 0.3);
  EXPECT_EQ(c.tp, 1u);
  EXPECT_EQ(c.fp, 1u);
  EXPECT_EQ(c.fn, 1u);
  EXPECT_EQ(c.tn, 1u);
  EXPECT_DOUBLE_EQ(c.f1(), 0.5);
  Confusion none;
  EXPECT_EQ(none.f1(), 0.0);
  EXPECT_EQ(none.precision(), 0.0);
}

TEST(TuneThreshold, PicksSeparatingCut) {
  const std::vector<double> scores = {-2, -1, 0.5, 1, 3};
  const bool labels[] = {false, false, true, true, true};
  EXPECT_EQ(tune_threshold(scores, labels), 0.5);
}

TEST(TuneThreshold, TiesGoToLowerThreshold) {
  const std::vector<double> scores = {1, 2};
  const bool labels[] = {true, true};
  EXPECT_EQ(tune_threshold(scores, labels), 1.0);
  const double extra[] = {0.0};
  EXPECT_EQ(tune_threshold(scores, labels, extra), 0.0);
}

TEST(Train, SeparableDataReachesPerfectF) {
  std::vector<LabeledVector> data;
  for (int i = 0; i < 40; ++i) {
    data.push_back({fv({{0, 1.0}}), true});
    data.push_back({fv({{1, 1.0}}), false});
  }
  auto m = train(data, TrainConfig{});
  EXPECT_EQ(train_f(data, m, m.threshold), 1.0);
  EXPECT_GT(m.weights[0], m.weights[1]);
}

TEST(Train, BitDeterministicForFixedSeed) {
  auto data = blobs(300, 0.3, 1.0, 7);
  TrainConfig cfg;
  cfg.seed = 42;
  EXPECT_EQ(train(data, cfg), train(data, cfg));
  cfg.seed = 43;
  EXPECT_NE(train(data, cfg).weights, train(data, TrainConfig{.seed = 42}).weights);
}

TEST(Train, TunedThresholdNoWorseThanZero) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto data = blobs(400, 0.1, 0.8, seed);
    auto m = train(data, TrainConfig{});
    EXPECT_GE(train_f(data, m, m.threshold), train_f(data, m, 0.0)) << seed;
  }
}

TEST(Train, ScaleInvariantUnderMatchedHyperparameters) {
  auto data = blobs(200, 0.3, 1.0, 3);
  auto scaled = data;
  for (auto& lv : scaled) {
    for (auto& e : lv.features.entries) e.value *= 4.0;
  }
  TrainConfig base;
  TrainConfig adjusted = base;
  adjusted.c = base.c / 16.0;
  adjusted.eta0 = base.eta0 / 16.0;
  auto a = train(data, base);
  auto b = train(scaled, adjusted);
  ASSERT_EQ(a.weights.size(), b.weights.size());
  for (std::size_t i = 0; i < a.weights.size(); ++i) EXPECT_NEAR(a.weights[i], 4.0 * b.weights[i], 1e-9);
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(predict(a, data[i].features).positive, predict(b, scaled[i].features).positive) << i;
  }
}

TEST(Train, SingleClassIsDegenerate) {
  std::vector<LabeledVector> data = {{fv({{0, 1.0}}), true}, {fv({{1, 1.0}}), true}};
  EXPECT_THROW(train(data, TrainConfig{}), DegenerateTrainingError);
  EXPECT_THROW(train({}, TrainConfig{}), DegenerateTrainingError);
}

TEST(Train, InvalidConfig) {
  std::vector<LabeledVector> data = {{fv({{0, 1.0}}), true}, {fv({{1, 1.0}}), false}};
  EXPECT_THROW(train(data, TrainConfig{.c = 0}), ConfigError);
  EXPECT_THROW(train(data, TrainConfig{.c = 1, .w = -1}), ConfigError);
}

TEST(Predict, BoundaryUnseenIdsAndEmptyVector) {
  LinearModel m;
  m.weights = {1.0, -2.0};
  m.bias = 0.5;
  m.threshold = 1.5;
  EXPECT_TRUE(predict(m, fv({{0, 1.0}})).positive);  // score == threshold
  EXPECT_FALSE(predict(m, fv({{1, 0.1}})).positive);
  EXPECT_EQ(m.score(fv({{0, 1.0}, {99, 5.0}})), 1.5);
  EXPECT_EQ(m.score(FeatureVector{}), 0.5);
}

TEST(ModelFile, RoundTripsExactly) {
  auto data = blobs(100, 0.4, 1.2, 9);
  auto m = train(data, TrainConfig{});
  m.feature_names = {"a", "b", "", "d"};
  auto back = parse_model(serialize_model(m));
  EXPECT_EQ(back.weights, m.weights);
  EXPECT_EQ(back.bias, m.bias);
  EXPECT_EQ(back.threshold, m.threshold);
  EXPECT_EQ(back.feature_names[0], "a");
  testutil::TempDir dir;
  save_model(m, dir.path() / "m.txt");
  EXPECT_EQ(load_model(dir.path() / "m.txt").weights, m.weights);
}

TEST(ModelFile, RejectsGarbage) {
  EXPECT_THROW(parse_model("not a model\n"), FormatError);
  EXPECT_THROW(parse_model("incongruity-linear-model 1\ndimension x\n"), FormatError);
}
