#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lipfuse/geometry.hpp"
#include "lipfuse/matrix.hpp"
#include "lipfuse/score_matrix.hpp"
#include "lipfuse/smo.hpp"

namespace lipfuse {

/// Per-dimension affine standardization learned from training rows.
/// Dimensions with (near) zero variance keep scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // population standard deviation

  static Standardizer fit(const RowMatrix& x);
  bool empty() const { return mean.empty(); }
  RowMatrix apply(const RowMatrix& x) const;
  void apply_inplace(std::span<double> row) const;
};

/// One-vs-rest ensemble: binary c separates class_labels[c] from the rest.
struct SvmMulticlassModel {
  std::vector<std::string> class_labels;
  std::vector<SvmBinaryModel> binaries;
  std::size_t feature_len = 0;
  Standardizer standardizer;                    // empty when training skipped it
  std::optional<FeatureConfig> feature_config;  // how rows were extracted, if known
};

struct OvrParams {
  SmoParams smo;
  bool standardize = true;
  unsigned jobs = 1;  // concurrent binary trainings; 0 = hardware concurrency
};

struct OvrTrainResult {
  SvmMulticlassModel model;
  std::vector<SmoStatus> statuses;  // per class
  bool converged() const;
};

/// Class labels are sorted ascending. Needs at least two distinct labels.
OvrTrainResult train_one_vs_rest(const RowMatrix& x, std::span<const std::string> labels,
                                 const OvrParams& params);

/// Solves every one-vs-rest dual on a shared kernel matrix. class_ids are
/// dense in [0, class_count).
std::vector<SmoSolution> solve_one_vs_rest(const Eigen::MatrixXd& gram,
                                           std::span<const int> class_ids,
                                           std::size_t class_count, const SmoParams& params,
                                           unsigned jobs = 1);

/// Column c holds the decision value of binary c. Rows follow probe_ids.
/// Throws DataError when x.cols() != feature_len or row/probe counts differ.
ScoreMatrix predict_scores(const SvmMulticlassModel& model, const RowMatrix& x,
                           std::vector<std::string> probe_ids);

/// Writes the JSON header at json_path and support vectors plus
/// coefficients as an LBTF f64 tensor next to it ("<stem>.sv.lbtf").
/// Tensor rows are [coefficient, features...] for every binary in class
/// order; the header lists each binary's support-vector count.
void save_model(const SvmMulticlassModel& model, const std::filesystem::path& json_path);
SvmMulticlassModel load_model(const std::filesystem::path& json_path);

}  // namespace lipfuse
