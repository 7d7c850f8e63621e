#include <gtest/gtest.h>

#include <random>

#include "lipfuse/error.hpp"
#include "lipfuse/grid_search.hpp"
#include "lipfuse/multiclass.hpp"
#include "lipfuse/synthetic.hpp"

namespace lipfuse {
namespace {

struct Labeled {
  std::vector<LandmarkSequence> seqs;
  std::vector<std::string> languages;
  std::vector<std::string> subjects;
};

Labeled small_dataset() {
  synthetic::DatasetSpec spec;
  spec.languages = 3;
  spec.subjects_per_language = 2;
  spec.frames = 40;
  const auto ds = synthetic::make_dataset(spec);
  Labeled out;
  out.seqs = ds.sequences;
  for (const auto& r : ds.manifest.records()) {
    out.languages.emplace_back(language_name(r.language));
    out.subjects.push_back(r.subject_id);
  }
  return out;
}

GridSpec small_grid() {
  GridSpec g;
  g.kernels = {Kernel::linear(), Kernel::rbf(0.1)};
  g.Cs = {1.0, 10.0};
  g.pivots = {0, 3};
  g.metric_sets = {MetricSet{Metric::kEuclidean}};
  g.frames = {20};
  return g;
}

TEST(GridSpec, ExpandOrderAndDefaultSize) {
  const auto cfgs = small_grid().expand();
  ASSERT_EQ(cfgs.size(), 8U);
  // C varies fastest, then kernel, then pivot.
  EXPECT_EQ(cfgs[0].C, 1.0);
  EXPECT_EQ(cfgs[1].C, 10.0);
  EXPECT_EQ(cfgs[2].kernel, Kernel::rbf(0.1));
  EXPECT_EQ(cfgs[4].features.pivot, 3);
  EXPECT_EQ(GridSpec::default_grid().expand().size(), 4U * 4U * 8U * 4U);
}

TEST(GridSpec, ParseFillsMissingKeysFromDefault) {
  const auto g = parse_grid_spec(R"({"kernels": [{"kind": "rbf", "gamma": 0.5}], "C": [2], "pivots": [1],
                                     "metrics": ["all"], "frames": [30]})");
  const auto cfgs = g.expand();
  ASSERT_EQ(cfgs.size(), 1U);
  EXPECT_EQ(cfgs[0].kernel, Kernel::rbf(0.5));
  EXPECT_EQ(cfgs[0].features, (FeatureConfig{1, MetricSet::all(), 30}));
  EXPECT_EQ(parse_grid_spec(R"({"C": [1]})").expand().size(), 4U * 8U * 4U);
  EXPECT_THROW(parse_grid_spec("[1,2]"), InvalidArgument);
  EXPECT_THROW(parse_grid_spec("{"), InvalidArgument);
  EXPECT_THROW(parse_grid_spec(R"({"kernels": [{"kind": "sigmoid"}]})"), InvalidArgument);
}

TEST(GridSearch, TableCoversEveryCellOnce) {
  const auto d = small_dataset();
  const auto grid = small_grid().expand();
  const auto r = grid_search(d.seqs, d.languages, grid, GridSearchOptions{});
  // 10 clips per language: every k in 2..10 is valid.
  EXPECT_EQ(r.full_table.size(), grid.size() * 9);
  EXPECT_TRUE(r.invalid_cells.empty());
  std::size_t i = 0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    for (int k = 2; k <= 10; ++k, ++i) {
      EXPECT_EQ(r.full_table[i].config_index, c);
      EXPECT_EQ(r.full_table[i].k, k);
    }
  }
}

TEST(GridSearch, InvalidCellsAreListedWithReasons) {
  const auto d = small_dataset();
  const auto grid = small_grid().expand();
  // Five clips per subject: stratified folds fail for k > 5.
  const auto r = grid_search(d.seqs, d.subjects, grid, GridSearchOptions{});
  EXPECT_EQ(r.full_table.size(), grid.size() * 4);
  EXPECT_EQ(r.invalid_cells.size(), grid.size() * 5);
  for (const auto& cell : r.invalid_cells) {
    EXPECT_GT(cell.k, 5);
    EXPECT_FALSE(cell.reason.empty());
  }
}

TEST(GridSearch, BestIsFirstMaximum) {
  const auto d = small_dataset();
  const auto r = grid_search(d.seqs, d.languages, small_grid().expand(), GridSearchOptions{});
  const GridCell* best = nullptr;
  for (const auto& c : r.full_table) {
    if (best == nullptr || c.mean_accuracy > best->mean_accuracy) best = &c;
  }
  ASSERT_NE(best, nullptr);
  EXPECT_EQ(r.best_config_index, best->config_index);
  EXPECT_EQ(r.best_k, best->k);
  EXPECT_EQ(r.best_cv_accuracy, best->mean_accuracy);
  EXPECT_EQ(r.best_config, best->config);
}

TEST(GridSearch, ReportsAreByteIdenticalAcrossRunsAndJobCounts) {
  const auto d = small_dataset();
  const auto grid = small_grid().expand();
  GridSearchOptions opt;
  opt.seed = 11;
  const auto a = grid_search(d.seqs, d.languages, grid, opt);
  opt.jobs = 3;
  const auto b = grid_search(d.seqs, d.languages, grid, opt);
  EXPECT_EQ(grid_report_json(a), grid_report_json(b));
  EXPECT_EQ(grid_report_csv(a), grid_report_csv(b));
}

// Second route: plain per-fold training with train_one_vs_rest and
// predict_scores, no shared inner products.
double reference_cv(const RowMatrix& x, const std::vector<std::string>& labels, const GridConfig& cfg,
                    int k, std::uint64_t seed) {
  const auto enc = encode_labels(labels);
  const auto folds = kfold(enc.ids, k, seed);
  double sum = 0.0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::size_t> train;
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(train.begin(), train.end());
    RowMatrix xtr(static_cast<Eigen::Index>(train.size()), x.cols());
    std::vector<std::string> ytr;
    for (std::size_t i = 0; i < train.size(); ++i) {
      xtr.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(train[i]));
      ytr.push_back(labels[train[i]]);
    }
    RowMatrix xte(static_cast<Eigen::Index>(folds[f].size()), x.cols());
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < folds[f].size(); ++i) {
      xte.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(folds[f][i]));
      ids.push_back(std::to_string(i));
    }
    OvrParams p;
    p.smo.C = cfg.C;
    p.smo.kernel = cfg.kernel;
    const auto model = train_one_vs_rest(xtr, ytr, p).model;
    const auto pred = top1_labels(predict_scores(model, xte, ids));
    int correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == labels[folds[f][i]] ? 1 : 0;
    sum += static_cast<double>(correct) / static_cast<double>(pred.size());
  }
  return sum / static_cast<double>(folds.size());
}

TEST(GridSearch, CellAccuracyMatchesPlainCrossValidation) {
  const auto d = small_dataset();
  const auto grid = small_grid().expand();
  GridSearchOptions opt;
  opt.seed = 5;
  opt.k_min = 3;
  opt.k_max = 5;
  const auto r = grid_search(d.seqs, d.languages, grid, opt);
  for (const auto& cell : r.full_table) {
    const auto x = extract_feature_matrix(d.seqs, cell.config.features);
    EXPECT_NEAR(cell.mean_accuracy, reference_cv(x, d.languages, cell.config, cell.k, 5), 1e-12)
        << cell.config.to_string() << " k=" << cell.k;
  }
}

TEST(GridSearch, Preconditions) {
  const auto d = small_dataset();
  const auto grid = small_grid().expand();
  GridSearchOptions opt;
  opt.k_min = 1;
  EXPECT_THROW(grid_search(d.seqs, d.languages, grid, opt), InvalidArgument);
  opt = GridSearchOptions{};
  opt.k_max = 11;
  EXPECT_THROW(grid_search(d.seqs, d.languages, grid, opt), InvalidArgument);
  EXPECT_THROW(grid_search(d.seqs, d.languages, std::vector<GridConfig>{}, GridSearchOptions{}),
               InvalidArgument);
  // Every cell invalid: 2 clips per class cannot feed k >= 3.
  std::vector<LandmarkSequence> few(d.seqs.begin(), d.seqs.begin() + 4);
  const std::vector<std::string> labels{"a", "a", "b", "b"};
  opt = GridSearchOptions{};
  opt.k_min = 3;
  EXPECT_THROW(grid_search(few, labels, grid, opt), DataError);
}

}  // namespace
}  // namespace lipfuse
