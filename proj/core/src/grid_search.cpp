#include "lipfuse/grid_search.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "io_util.hpp"
#include "json.hpp"
#include "lipfuse/error.hpp"
#include "parallel.hpp"

namespace lipfuse {

using nlohmann::json;

std::string GridConfig::to_string() const {
  return kernel.to_string() + " C=" + detail::format_double(C) +
         " pivot=" + std::to_string(features.pivot) + " metrics=" + features.metrics.to_string() +
         " T=" + std::to_string(features.frames);
}

std::vector<GridConfig> GridSpec::expand() const {
  std::vector<GridConfig> out;
  for (int t : frames) {
    for (int pivot : pivots) {
      for (const auto& metrics : metric_sets) {
        for (const auto& kernel : kernels) {
          for (double c : Cs) {
            out.push_back({kernel, c, FeatureConfig{pivot, metrics, t}});
          }
        }
      }
    }
  }
  return out;
}

GridSpec GridSpec::default_grid() {
  GridSpec g;
  g.kernels = {Kernel::linear(), Kernel::rbf(0.01), Kernel::rbf(0.1), Kernel::rbf(1.0)};
  g.Cs = {0.1, 1.0, 10.0, 100.0};
  g.pivots = {0, 1, 2, 3, 4, 5, 6, 7};
  g.metric_sets = {MetricSet{Metric::kEuclidean}, MetricSet{Metric::kManhattan},
                   MetricSet{Metric::kCosine}, MetricSet::all()};
  g.frames = {kDefaultFrames};
  return g;
}

namespace {

struct FoldData {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<int> train_ids;
  std::vector<int> test_ids;
  Eigen::MatrixXd train_dots;  // train x train inner products
  Eigen::MatrixXd cross_dots;  // test x train inner products
  Eigen::VectorXd train_sq;
  Eigen::VectorXd test_sq;
};

RowMatrix select_rows(const RowMatrix& x, const std::vector<std::size_t>& rows) {
  RowMatrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r]));
  }
  return out;
}

FoldData prepare_fold(const RowMatrix& x, std::span<const int> ids,
                      const std::vector<std::vector<std::size_t>>& folds, std::size_t held_out,
                      bool standardize) {
  FoldData f;
  f.test = folds[held_out];
  for (std::size_t g = 0; g < folds.size(); ++g) {
    if (g != held_out) f.train.insert(f.train.end(), folds[g].begin(), folds[g].end());
  }
  std::sort(f.train.begin(), f.train.end());
  for (auto i : f.train) f.train_ids.push_back(ids[i]);
  for (auto i : f.test) f.test_ids.push_back(ids[i]);

  RowMatrix xtr = select_rows(x, f.train);
  RowMatrix xte = select_rows(x, f.test);
  if (standardize) {
    const auto st = Standardizer::fit(xtr);
    xtr = st.apply(xtr);
    xte = st.apply(xte);
  }
  f.train_dots.resize(xtr.rows(), xtr.rows());
  f.train_dots.setZero();
  f.train_dots.selfadjointView<Eigen::Lower>().rankUpdate(xtr);
  f.train_dots.triangularView<Eigen::StrictlyUpper>() = f.train_dots.transpose();
  f.cross_dots = xte * xtr.transpose();
  f.train_sq = f.train_dots.diagonal();
  f.test_sq = xte.rowwise().squaredNorm();
  return f;
}

struct FoldOutcome {
  double accuracy = 0.0;
  bool converged = true;
};

FoldOutcome evaluate_fold(const FoldData& f, std::size_t class_count, const GridConfig& config,
                          const GridSearchOptions& options) {
  const Kernel& kernel = config.kernel;
  const auto n = f.train_dots.rows();
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      gram(i, j) = gram(j, i) = kernel.from_dot(f.train_dots(i, j), f.train_sq(i), f.train_sq(j));
    }
  }
  const auto m = f.cross_dots.rows();
  Eigen::MatrixXd cross(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      cross(i, j) = kernel.from_dot(f.cross_dots(i, j), f.test_sq(i), f.train_sq(j));
    }
  }

  SmoParams smo{config.C, kernel, options.tolerance, options.max_passes};
  const auto solutions = solve_one_vs_rest(gram, f.train_ids, class_count, smo, 1);

  FoldOutcome out;
  Eigen::MatrixXd scores(m, static_cast<Eigen::Index>(class_count));
  for (std::size_t c = 0; c < class_count; ++c) {
    const auto& sol = solutions[c];
    out.converged = out.converged && sol.status == SmoStatus::kConverged;
    Eigen::VectorXd coeff(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int y = f.train_ids[static_cast<std::size_t>(i)] == static_cast<int>(c) ? 1 : -1;
      coeff(i) = sol.alpha[static_cast<std::size_t>(i)] * y;
    }
    scores.col(static_cast<Eigen::Index>(c)) = (cross * coeff).array() + sol.bias;
  }
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c) {
      if (scores(i, c) > scores(i, best)) best = c;
    }
    if (static_cast<int>(best) == f.test_ids[static_cast<std::size_t>(i)]) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(m);
  return out;
}

}  // namespace

GridSearchResult grid_search(const FeatureProvider& features, std::span<const std::string> labels,
                             std::span<const GridConfig> grid, const GridSearchOptions& options) {
  if (grid.empty()) throw InvalidArgument("grid search needs a non-empty grid");
  if (options.k_min < kMinFolds || options.k_max > kMaxFolds || options.k_min > options.k_max) {
    throw InvalidArgument("k range must lie within [2,10]");
  }
  for (const auto& cfg : grid) {
    cfg.kernel.validate();
    if (!(cfg.C > 0.0)) throw InvalidArgument("grid C values must be positive");
  }
  const EncodedLabels enc = encode_labels(labels);
  if (enc.classes.size() < 2) throw DataError("grid search needs at least two classes");

  GridSearchResult result;
  const int k_count = options.k_max - options.k_min + 1;
  std::vector<std::optional<std::vector<std::vector<std::size_t>>>> folds_by_k(
      static_cast<std::size_t>(k_count));
  std::vector<std::string> k_error(static_cast<std::size_t>(k_count));
  for (int k = options.k_min; k <= options.k_max; ++k) {
    const auto slot = static_cast<std::size_t>(k - options.k_min);
    try {
      folds_by_k[slot] = kfold(enc.ids, k, options.seed, options.fold_mode);
    } catch (const Error& e) {
      k_error[slot] = e.what();
    }
  }

  // Group configs by feature config so features and fold inner products are
  // computed once per group.
  std::vector<std::pair<FeatureConfig, std::vector<std::size_t>>> groups;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == grid[i].features; });
    if (it == groups.end()) {
      groups.push_back({grid[i].features, {i}});
    } else {
      it->second.push_back(i);
    }
  }

  struct CellSlot {
    bool valid = false;
    double accuracy = 0.0;
    bool converged = true;
  };
  std::vector<CellSlot> cells(grid.size() * static_cast<std::size_t>(k_count));

  for (const auto& [feature_config, members] : groups) {
    const RowMatrix x = features(feature_config);
    if (static_cast<std::size_t>(x.rows()) != labels.size()) {
      throw DataError("feature provider returned the wrong number of rows");
    }
    if (!x.allFinite()) throw DataError("non-finite feature value");

    std::vector<std::vector<FoldData>> fold_data(static_cast<std::size_t>(k_count));
    for (std::size_t slot = 0; slot < fold_data.size(); ++slot) {
      if (!folds_by_k[slot]) continue;
      const auto& folds = *folds_by_k[slot];
      fold_data[slot].resize(folds.size());
      detail::parallel_for(folds.size(), options.jobs, [&](std::size_t f) {
        fold_data[slot][f] = prepare_fold(x, enc.ids, folds, f, options.standardize);
      });
    }

    const std::size_t work = members.size() * static_cast<std::size_t>(k_count);
    detail::parallel_for(work, options.jobs, [&](std::size_t w) {
      const std::size_t cfg = members[w / static_cast<std::size_t>(k_count)];
      const std::size_t slot = w % static_cast<std::size_t>(k_count);
      if (!folds_by_k[slot]) return;
      CellSlot& cell = cells[cfg * static_cast<std::size_t>(k_count) + slot];
      double sum = 0.0;
      for (const auto& fd : fold_data[slot]) {
        const auto outcome = evaluate_fold(fd, enc.classes.size(), grid[cfg], options);
        sum += outcome.accuracy;
        cell.converged = cell.converged && outcome.converged;
      }
      cell.accuracy = sum / static_cast<double>(fold_data[slot].size());
      cell.valid = true;
    });
  }

  bool have_best = false;
  for (std::size_t cfg = 0; cfg < grid.size(); ++cfg) {
    for (int k = options.k_min; k <= options.k_max; ++k) {
      const auto slot = static_cast<std::size_t>(k - options.k_min);
      const CellSlot& cell = cells[cfg * static_cast<std::size_t>(k_count) + slot];
      if (!cell.valid) {
        result.invalid_cells.push_back({cfg, k, k_error[slot]});
        continue;
      }
      result.full_table.push_back({cfg, grid[cfg], k, cell.accuracy, cell.converged});
      if (!have_best || cell.accuracy > result.best_cv_accuracy) {
        have_best = true;
        result.best_config = grid[cfg];
        result.best_config_index = cfg;
        result.best_k = k;
        result.best_cv_accuracy = cell.accuracy;
      }
    }
  }
  if (!have_best) {
    throw DataError("no valid grid-search cell: " +
                    (k_error.empty() ? std::string("unknown") : k_error.front()));
  }
  return result;
}

GridSearchResult grid_search(std::span<const LandmarkSequence> sequences,
                             std::span<const std::string> labels,
                             std::span<const GridConfig> grid, const GridSearchOptions& options) {
  if (sequences.size() != labels.size()) throw DataError("sequence and label counts differ");
  const unsigned jobs = options.jobs;
  return grid_search(
      [&](const FeatureConfig& fc) { return extract_feature_matrix(sequences, fc, jobs); }, labels,
      grid, options);
}

GridSearchResult grid_search(const RowMatrix& x, std::span<const std::string> labels,
                             std::span<const GridConfig> grid, const GridSearchOptions& options) {
  return grid_search([&](const FeatureConfig&) { return x; }, labels, grid, options);
}

namespace {

json config_to_json(const GridConfig& c) {
  json j;
  j["kernel"] = std::string(kernel_kind_name(c.kernel.kind));
  j["gamma"] = c.kernel.kind == KernelKind::kLinear ? json(nullptr) : json(c.kernel.gamma);
  j["degree"] = c.kernel.kind == KernelKind::kPolynomial ? json(c.kernel.degree) : json(nullptr);
  j["coef0"] = c.kernel.kind == KernelKind::kPolynomial ? json(c.kernel.coef0) : json(nullptr);
  j["C"] = c.C;
  j["pivot"] = c.features.pivot;
  j["metrics"] = c.features.metrics.to_string();
  j["frames"] = c.features.frames;
  return j;
}

}  // namespace

std::string grid_report_json(const GridSearchResult& result) {
  json doc;
  doc["version"] = 1;
  doc["best"] = {{"config_index", result.best_config_index},
                 {"config", config_to_json(result.best_config)},
                 {"k", result.best_k},
                 {"cv_accuracy", result.best_cv_accuracy}};
  json table = json::array();
  for (const auto& cell : result.full_table) {
    table.push_back({{"config_index", cell.config_index},
                     {"config", config_to_json(cell.config)},
                     {"k", cell.k},
                     {"mean_accuracy", cell.mean_accuracy},
                     {"converged", cell.converged}});
  }
  doc["full_table"] = std::move(table);
  json invalid = json::array();
  for (const auto& cell : result.invalid_cells) {
    invalid.push_back({{"config_index", cell.config_index}, {"k", cell.k}, {"reason", cell.reason}});
  }
  doc["invalid_cells"] = std::move(invalid);
  return doc.dump(2) + "\n";
}

std::string grid_report_csv(const GridSearchResult& result) {
  std::string out =
      "config_index,kernel,gamma,degree,coef0,C,pivot,metrics,frames,k,mean_accuracy,converged\n";
  for (const auto& cell : result.full_table) {
    const auto& c = cell.config;
    const bool poly = c.kernel.kind == KernelKind::kPolynomial;
    out += std::to_string(cell.config_index) + ',' + std::string(kernel_kind_name(c.kernel.kind)) +
           ',' + (c.kernel.kind == KernelKind::kLinear ? "" : detail::format_double(c.kernel.gamma)) +
           ',' + (poly ? std::to_string(c.kernel.degree) : "") + ',' +
           (poly ? detail::format_double(c.kernel.coef0) : "") + ',' + detail::format_double(c.C) +
           ',' + std::to_string(c.features.pivot) + ',';
    // Metric lists are joined with '+' to stay a single CSV field.
    std::string metrics = c.features.metrics.to_string();
    std::replace(metrics.begin(), metrics.end(), ',', '+');
    out += metrics + ',' + std::to_string(c.features.frames) + ',' + std::to_string(cell.k) + ',' +
           detail::format_double(cell.mean_accuracy) + ',' + (cell.converged ? "true" : "false") +
           '\n';
  }
  return out;
}

GridSpec parse_grid_spec(std::string_view json_text) {
  GridSpec spec = GridSpec::default_grid();
  try {
    const json doc = json::parse(json_text);
    if (!doc.is_object()) throw InvalidArgument("grid description must be a JSON object");
    if (doc.contains("kernels")) {
      spec.kernels.clear();
      for (const auto& jk : doc["kernels"]) {
        Kernel k;
        k.kind = parse_kernel_kind(jk.at("kind").get<std::string>());
        if (k.kind != KernelKind::kLinear) k.gamma = jk.at("gamma").get<double>();
        if (k.kind == KernelKind::kPolynomial) {
          k.degree = jk.value("degree", 3);
          k.coef0 = jk.value("coef0", 0.0);
        }
        k.validate();
        spec.kernels.push_back(k);
      }
    }
    if (doc.contains("C")) spec.Cs = doc["C"].get<std::vector<double>>();
    if (doc.contains("pivots")) spec.pivots = doc["pivots"].get<std::vector<int>>();
    if (doc.contains("metrics")) {
      spec.metric_sets.clear();
      for (const auto& m : doc["metrics"]) spec.metric_sets.push_back(MetricSet::parse(m.get<std::string>()));
    }
    if (doc.contains("frames")) spec.frames = doc["frames"].get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("grid description: ") + e.what());
  }
  for (double c : spec.Cs) {
    if (!(c > 0.0)) throw InvalidArgument("grid C values must be positive");
  }
  for (int p : spec.pivots) {
    if (p < 0 || p >= kLandmarkCount) throw InvalidArgument("grid pivot outside [0,7]");
  }
  for (int t : spec.frames) {
    if (t < 2) throw InvalidArgument("grid frame count must be >= 2");
  }
  if (spec.expand().empty()) throw InvalidArgument("grid description expands to no configs");
  return spec;
}

}  // namespace lipfuse
