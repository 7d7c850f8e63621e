#include <gtest/gtest.h>

#include <cmath>

#include "lipfuse/error.hpp"
#include "lipfuse/simulate.hpp"

namespace lipfuse {
namespace {

TEST(SimulationConfig, ValidationRules) {
  EXPECT_NO_THROW(validate(SimulationConfig{}));
  auto bad = [](auto mutate) {
    SimulationConfig c;
    mutate(c);
    EXPECT_THROW(validate(c), InvalidArgument);
  };
  bad([](SimulationConfig& c) { c.n_languages = 0; });
  bad([](SimulationConfig& c) { c.n_languages = 9; });
  bad([](SimulationConfig& c) { c.n_subjects = 250; });
  bad([](SimulationConfig& c) { c.n_subjects = 0; });
  bad([](SimulationConfig& c) { c.n_probes = -1; });
  bad([](SimulationConfig& c) { c.lang_acc = 1.5; });
  bad([](SimulationConfig& c) { c.top1_acc = -0.1; });
  bad([](SimulationConfig& c) { c.topk_hit = 0.4; });
  bad([](SimulationConfig& c) { c.k = 0; });
  bad([](SimulationConfig& c) { c.k = 257; });
  bad([](SimulationConfig& c) { c.k = 1; });
  bad([](SimulationConfig& c) {
    c.n_subjects = 8;
    c.k = 8;
  });
  SimulationConfig edge;
  edge.k = 1;
  edge.topk_hit = edge.top1_acc;
  EXPECT_NO_THROW(validate(edge));
}

TEST(Simulate, LayoutAndRankStructure) {
  SimulationConfig c;
  c.n_subjects = 16;
  c.n_languages = 4;
  c.n_probes = 50;
  c.k = 4;
  const auto r = simulate_scores(c);
  ASSERT_EQ(r.identity_scores.class_count(), 16U);
  ASSERT_EQ(r.identity_scores.probe_count(), 50U);
  EXPECT_EQ(r.identity_scores.class_labels()[0], "S000");
  EXPECT_EQ(r.identity_scores.probe_ids()[7], "P00007");
  EXPECT_EQ(r.subject_language.at("S005"), Language::kJapanese);
  for (std::size_t p = 0; p < 50; ++p) {
    const auto ranked = rank_row(r.identity_scores, p).ranked;
    EXPECT_EQ(ranked[static_cast<std::size_t>(r.true_rank[p] - 1)].label, r.true_identity[p]);
    for (std::size_t i = 1; i < ranked.size(); ++i) EXPECT_LT(ranked[i].score, ranked[i - 1].score);
    EXPECT_EQ(r.subject_language.at(r.true_identity[p]), r.true_language[p]);
    EXPECT_LT(language_code(r.language_predictions.at(r.identity_scores.probe_ids()[p])), 4);
  }
}

TEST(Simulate, DeterministicPerSeed) {
  SimulationConfig c;
  c.n_probes = 200;
  c.seed = 9;
  const auto a = simulate_scores(c);
  const auto b = simulate_scores(c);
  EXPECT_EQ(a.identity_scores.scores(), b.identity_scores.scores());
  EXPECT_EQ(a.language_predictions, b.language_predictions);
  c.seed = 10;
  EXPECT_NE(simulate_scores(c).identity_scores.scores(), a.identity_scores.scores());
}

// Binomial rates stay within 4 standard deviations of the requested values.
TEST(Simulate, EmpiricalRatesMatchConfig) {
  SimulationConfig c;
  c.seed = 2;
  const auto r = simulate_scores(c);
  const double n = c.n_probes;
  double top1 = 0, topk = 0, lang = 0;
  for (std::size_t p = 0; p < r.true_rank.size(); ++p) {
    top1 += r.true_rank[p] == 1 ? 1 : 0;
    topk += r.true_rank[p] <= c.k ? 1 : 0;
    lang += r.language_predictions.at(r.identity_scores.probe_ids()[p]) == r.true_language[p] ? 1 : 0;
  }
  auto near = [n](double hits, double prob) {
    EXPECT_NEAR(hits / n, prob, 4.0 * std::sqrt(prob * (1 - prob) / n)) << prob;
  };
  near(top1, c.top1_acc);
  near(topk, c.topk_hit);
  near(lang, c.lang_acc);
}

}  // namespace
}  // namespace lipfuse
