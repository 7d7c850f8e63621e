#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lipfuse/dataset.hpp"
#include "lipfuse/geometry.hpp"
#include "lipfuse/kernel.hpp"
#include "lipfuse/matrix.hpp"
#include "lipfuse/multiclass.hpp"

namespace lipfuse {

/// One point of the hyperparameter lattice.
struct GridConfig {
  Kernel kernel;
  double C = 1.0;
  FeatureConfig features;

  std::string to_string() const;
  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

/// Cartesian lattice; expand() enumerates frames, pivots, metric sets,
/// kernels and C values, outermost first.
struct GridSpec {
  std::vector<Kernel> kernels;
  std::vector<double> Cs;
  std::vector<int> pivots;
  std::vector<MetricSet> metric_sets;
  std::vector<int> frames;

  std::vector<GridConfig> expand() const;

  /// kernel in {linear, rbf(0.01), rbf(0.1), rbf(1)}, C in {0.1, 1, 10, 100},
  /// pivot in 0..7, metrics in {each single metric, all three}, T = 250.
  static GridSpec default_grid();
};

struct GridSearchOptions {
  int k_min = kMinFolds;
  int k_max = kMaxFolds;
  std::uint64_t seed = 0;
  FoldMode fold_mode = FoldMode::kStratified;
  double tolerance = 1e-3;
  int max_passes = 200;
  bool standardize = true;
  unsigned jobs = 1;  // 0 = hardware concurrency
};

struct GridCell {
  std::size_t config_index = 0;
  GridConfig config;
  int k = 0;
  double mean_accuracy = 0.0;
  bool converged = true;  // every fold's binaries converged
};

struct InvalidCell {
  std::size_t config_index = 0;
  int k = 0;
  std::string reason;
};

struct GridSearchResult {
  GridConfig best_config;
  std::size_t best_config_index = 0;
  int best_k = 0;
  double best_cv_accuracy = 0.0;
  std::vector<GridCell> full_table;  // valid cells, grid order major, k ascending minor
  std::vector<InvalidCell> invalid_cells;
};

/// Returns the feature matrix for a feature configuration, one row per label.
using FeatureProvider = std::function<RowMatrix(const FeatureConfig&)>;

/// Scores every (config, k) cell by the mean accuracy of stratified k-fold
/// cross-validation of a one-vs-rest SVM. Folds depend only on (labels, k,
/// seed), so every config sees the same folds. Standardization statistics
/// come from each fold's training part. Cells whose k the labels cannot
/// support are listed in invalid_cells. Ties keep the first cell in
/// enumeration order.
///
/// Throws InvalidArgument for an empty grid or a bad k range, and DataError
/// when no cell is valid.
GridSearchResult grid_search(const FeatureProvider& features, std::span<const std::string> labels,
                             std::span<const GridConfig> grid, const GridSearchOptions& options);

/// Feature configs of the grid are applied to the sequences.
GridSearchResult grid_search(std::span<const LandmarkSequence> sequences,
                             std::span<const std::string> labels,
                             std::span<const GridConfig> grid, const GridSearchOptions& options);

/// Uses x for every cell; the grid's feature configs are ignored.
GridSearchResult grid_search(const RowMatrix& x, std::span<const std::string> labels,
                             std::span<const GridConfig> grid, const GridSearchOptions& options);

/// Full-table report as JSON (version 1) and flat CSV. Both are
/// deterministic functions of the result.
std::string grid_report_json(const GridSearchResult& result);
std::string grid_report_csv(const GridSearchResult& result);

/// Reads a grid description: {"kernels": [{"kind": "rbf", "gamma": 0.1}, ...],
/// "C": [...], "pivots": [...], "metrics": ["euclidean", "all", ...],
/// "frames": [...]}. Missing keys take the default grid's values.
GridSpec parse_grid_spec(std::string_view json_text);

}  // namespace lipfuse
