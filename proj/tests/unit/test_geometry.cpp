#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lipfuse/error.hpp"
#include "lipfuse/geometry.hpp"
#include "metric_cases.hpp"
#include "temp_dir.hpp"

namespace lipfuse {
namespace {

TEST(Metrics, MatchClosedFormFixtures) {
  for (const auto& c : testing::metric_fixture_table()) {
    EXPECT_NEAR(euclidean(c.p, c.q), c.euclidean, 1e-12);
    EXPECT_NEAR(manhattan(c.p, c.q), c.manhattan, 1e-12);
    EXPECT_NEAR(cosine_distance(c.p, c.q).value, c.cosine, 1e-12);
  }
}

TEST(Metrics, HandValues) {
  EXPECT_DOUBLE_EQ(euclidean({0, 0}, {3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(manhattan({1, 1}, {-2, 5}), 7.0);
  EXPECT_NEAR(cosine_distance({1, 0}, {0, 1}).value, 1.0, 1e-15);
  EXPECT_NEAR(cosine_distance({1, 0}, {-2, 0}).value, 2.0, 1e-15);
  EXPECT_NEAR(cosine_distance({0.3, 0.4}, {0.6, 0.8}).value, 0.0, 1e-15);
}

TEST(Metrics, CosineZeroVectorIsFlagged) {
  const auto c = cosine_distance({0, 0}, {0.5, 0.5});
  EXPECT_TRUE(c.zero_norm);
  EXPECT_EQ(c.value, 1.0);
  EXPECT_FALSE(cosine_distance({0.1, 0}, {0.5, 0.5}).zero_norm);
}

TEST(Metrics, NonFiniteInputRejected) {
  EXPECT_THROW(euclidean({NAN, 0}, {0, 0}), DataError);
  EXPECT_THROW(cosine_distance({0, INFINITY}, {0, 0}), DataError);
}

TEST(Metrics, AxiomsOnRandomPoints) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 2000; ++i) {
    const Point2 p{u(gen), u(gen)}, q{u(gen), u(gen)}, r{u(gen), u(gen)};
    for (auto d : {euclidean, manhattan}) {
      EXPECT_GE(d(p, q), 0.0);
      EXPECT_EQ(d(p, q), d(q, p));
      EXPECT_EQ(d(p, p), 0.0);
      EXPECT_GT(d(p, q), 0.0);  // p != q almost surely
      EXPECT_LE(d(p, r), d(p, q) + d(q, r) + 1e-12);
    }
    const double c = cosine_distance(p, q).value;
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, 2.0);
    EXPECT_NEAR(c, cosine_distance(q, p).value, 1e-15);
  }
}

TEST(Metrics, TranslationInvarianceHoldsOnlyForEuclideanAndManhattan) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  int cosine_changed = 0;
  for (int i = 0; i < 500; ++i) {
    const Point2 p{u(gen), u(gen)}, q{u(gen), u(gen)}, shift{u(gen), u(gen)};
    const Point2 ps{p.x + shift.x, p.y + shift.y}, qs{q.x + shift.x, q.y + shift.y};
    EXPECT_NEAR(euclidean(p, q), euclidean(ps, qs), 1e-12);
    EXPECT_NEAR(manhattan(p, q), manhattan(ps, qs), 1e-12);
    if (std::abs(cosine_distance(p, q).value - cosine_distance(ps, qs).value) > 1e-9) ++cosine_changed;
  }
  EXPECT_GT(cosine_changed, 450);
}

TEST(MetricSet, ParseAndFixedOrder) {
  const auto s = MetricSet::parse("cosine,euclidean");
  EXPECT_EQ(s.size(), 2U);
  EXPECT_EQ(s.ordered(), (std::vector<Metric>{Metric::kEuclidean, Metric::kCosine}));
  EXPECT_EQ(s.to_string(), "euclidean,cosine");
  EXPECT_EQ(MetricSet::parse("all"), MetricSet::all());
  EXPECT_THROW(MetricSet::parse(""), InvalidArgument);
  EXPECT_THROW(MetricSet::parse("chebyshev"), InvalidArgument);
}

LandmarkSequence random_sequence(std::mt19937_64& gen, int frames, double fps = 25.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LandmarkSequence seq{"clip", fps, {}};
  seq.frames.resize(static_cast<std::size_t>(frames));
  for (auto& f : seq.frames) {
    for (auto& p : f) p = {u(gen), u(gen)};
  }
  return seq;
}

TEST(Resample, IdentityWhenLengthsMatch) {
  std::mt19937_64 gen(1);
  const auto seq = random_sequence(gen, 40);
  const auto out = resample_temporal(seq, 40);
  ASSERT_EQ(out.frames.size(), 40U);
  for (std::size_t t = 0; t < 40; ++t) {
    for (int k = 0; k < kLandmarkCount; ++k) {
      EXPECT_EQ(out.frames[t][k].x, seq.frames[t][k].x);
      EXPECT_EQ(out.frames[t][k].y, seq.frames[t][k].y);
    }
  }
  EXPECT_DOUBLE_EQ(out.fps, 25.0);
}

TEST(Resample, EndpointsKeptAndMidpointsInterpolated) {
  LandmarkSequence seq{"c", 25.0, {}};
  LandmarkFrame a{}, b{};
  for (int k = 0; k < kLandmarkCount; ++k) {
    a[k] = {0.0, 0.1 * k};
    b[k] = {1.0, 0.1 * k + 0.05};
  }
  seq.frames = {a, b};
  const auto out = resample_temporal(seq, 5);
  ASSERT_EQ(out.frames.size(), 5U);
  for (int t = 0; t < 5; ++t) EXPECT_DOUBLE_EQ(out.frames[t][3].x, 0.25 * t);
  EXPECT_DOUBLE_EQ(out.frames[4][7].y, 0.75);
  EXPECT_DOUBLE_EQ(out.fps, 5.0 / (2.0 / 25.0));
}

TEST(Resample, Preconditions) {
  std::mt19937_64 gen(1);
  auto seq = random_sequence(gen, 10);
  EXPECT_THROW(resample_temporal(seq, 1), InvalidArgument);
  seq.frames.resize(1);
  EXPECT_THROW(resample_temporal(seq, 10), DataError);
}

TEST(Features, LengthIsFramesTimesSevenTimesMetrics) {
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<int> frames(2, 300), pivot(0, 7), mask(1, 7), raw(2, 120);
  for (int i = 0; i < 300; ++i) {
    FeatureConfig cfg;
    cfg.frames = frames(gen);
    cfg.pivot = pivot(gen);
    const int m = mask(gen);
    cfg.metrics = MetricSet{};
    std::vector<Metric> chosen;
    for (int b = 0; b < 3; ++b) {
      if (m & (1 << b)) chosen.push_back(static_cast<Metric>(b));
    }
    cfg.metrics = chosen.size() == 3 ? MetricSet::all()
                  : chosen.size() == 2 ? MetricSet{chosen[0], chosen[1]}
                                       : MetricSet{chosen[0]};
    const auto seq = random_sequence(gen, raw(gen));
    const auto fv = extract_features(seq, cfg);
    EXPECT_EQ(fv.values.size(), static_cast<std::size_t>(cfg.frames) * 7 * chosen.size());
  }
}

TEST(Features, DefaultConfigGives1750Values) {
  std::mt19937_64 gen(3);
  EXPECT_EQ(extract_features(random_sequence(gen, 250), FeatureConfig{}).values.size(), 1750U);
}

TEST(Features, MatchReferenceLayout) {
  std::mt19937_64 gen(8);
  for (int pivot = 0; pivot < kLandmarkCount; ++pivot) {
    for (const auto& metrics : {MetricSet{Metric::kManhattan}, MetricSet{Metric::kEuclidean, Metric::kCosine},
                                MetricSet::all()}) {
      const FeatureConfig cfg{pivot, metrics, 33};
      const auto seq = random_sequence(gen, 57);
      const auto got = extract_features(seq, cfg).values;
      const auto want = testing::reference_features(seq, cfg);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12) << i;
    }
  }
}

TEST(Features, IdenticalLandmarksGiveZeros) {
  LandmarkSequence seq{"still", 25.0, {}};
  for (int t = 0; t < 20; ++t) {
    LandmarkFrame f;
    f.fill({0.3 + 0.01 * t, 0.6});
    seq.frames.push_back(f);
  }
  const FeatureConfig cfg{2, MetricSet{Metric::kEuclidean, Metric::kManhattan}, 16};
  const auto fv = extract_features(seq, cfg);
  ASSERT_EQ(fv.values.size(), 16U * 14U);
  for (double v : fv.values) EXPECT_EQ(v, 0.0);
}

TEST(Features, ZeroNormCountsCosineAtOrigin) {
  LandmarkSequence seq{"origin", 25.0, {}};
  LandmarkFrame f;
  f.fill({0.5, 0.5});
  f[0] = {0.0, 0.0};
  seq.frames = {f, f, f};
  const auto fv = extract_features(seq, FeatureConfig{0, MetricSet{Metric::kCosine}, 3});
  EXPECT_EQ(fv.zero_norm_count, 21U);
}

TEST(Features, MatrixMatchesRowsForAnyJobCount) {
  std::mt19937_64 gen(21);
  std::vector<LandmarkSequence> seqs;
  for (int i = 0; i < 9; ++i) seqs.push_back(random_sequence(gen, 30 + i));
  const FeatureConfig cfg{1, MetricSet::all(), 20};
  const auto x1 = extract_feature_matrix(seqs, cfg, 1);
  const auto x3 = extract_feature_matrix(seqs, cfg, 3);
  EXPECT_EQ(x1, x3);
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const auto row = extract_features(seqs[i], cfg).values;
    for (std::size_t j = 0; j < row.size(); ++j) EXPECT_EQ(x1(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), row[j]);
  }
}

TEST(Features, ConfigPreconditions) {
  std::mt19937_64 gen(2);
  const auto seq = random_sequence(gen, 10);
  EXPECT_THROW(extract_features(seq, FeatureConfig{8, MetricSet{Metric::kEuclidean}, 10}), InvalidArgument);
  EXPECT_THROW(extract_features(seq, FeatureConfig{0, MetricSet{}, 10}), InvalidArgument);
  EXPECT_THROW(extract_features(seq, FeatureConfig{0, MetricSet{Metric::kEuclidean}, 1}), InvalidArgument);
}

TEST(Landmarks, JsonRoundTripAndValidation) {
  std::mt19937_64 gen(4);
  auto seq = random_sequence(gen, 6, 29.97);
  seq.clip_id = "s1_c1";
  testing::TempDir dir;
  save_landmarks(seq, dir / "l.json");
  const auto back = load_landmarks(dir / "l.json");
  EXPECT_EQ(back.clip_id, "s1_c1");
  EXPECT_EQ(back.fps, 29.97);
  ASSERT_EQ(back.frames.size(), 6U);
  for (std::size_t t = 0; t < 6; ++t) {
    for (int k = 0; k < kLandmarkCount; ++k) EXPECT_EQ(back.frames[t][k].x, seq.frames[t][k].x);
  }
  EXPECT_THROW(parse_landmarks(R"({"clip_id":"a","fps":25,"frames":[[[0,0]]]})"), DataError);
  const std::string eight_out = R"([[1.5,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]])";
  EXPECT_THROW(parse_landmarks(R"({"clip_id":"a","fps":25,"frames":[)" + eight_out + "," + eight_out + "]}"),
               DataError);
  EXPECT_THROW(parse_landmarks("[]"), DataError);
}

}  // namespace
}  // namespace lipfuse
