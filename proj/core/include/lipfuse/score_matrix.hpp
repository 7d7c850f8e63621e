#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lipfuse/matrix.hpp"

namespace lipfuse {

/// Probe x class score table; higher scores mean more likely.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;

  /// Throws DataError on shape mismatch, duplicate probe ids or class
  /// labels, or non-finite scores.
  ScoreMatrix(std::vector<std::string> probe_ids, std::vector<std::string> class_labels,
              RowMatrix scores);

  const std::vector<std::string>& probe_ids() const { return probe_ids_; }
  const std::vector<std::string>& class_labels() const { return class_labels_; }
  const RowMatrix& scores() const { return scores_; }

  std::size_t probe_count() const { return probe_ids_.size(); }
  std::size_t class_count() const { return class_labels_.size(); }

  std::span<const double> row(std::size_t probe) const {
    return {scores_.row(static_cast<Eigen::Index>(probe)).data(), class_count()};
  }

  /// Row index of the probe; throws DataError when absent.
  std::size_t probe_index(std::string_view probe_id) const;

 private:
  std::vector<std::string> probe_ids_;
  std::vector<std::string> class_labels_;
  RowMatrix scores_;
};

struct RankEntry {
  std::string label;
  double score = 0.0;
  friend bool operator==(const RankEntry&, const RankEntry&) = default;
};

struct RankList {
  std::string probe_id;
  std::vector<RankEntry> ranked;  // descending score, ties in class-label order
};

/// Class indices of one score row sorted by descending score; equal scores
/// keep column order.
std::vector<std::size_t> rank_order(std::span<const double> row);

/// Throws DataError for an unknown probe.
RankList rank(const ScoreMatrix& scores, std::string_view probe_id);
RankList rank_row(const ScoreMatrix& scores, std::size_t probe);

/// Label at rank 1 for every probe.
std::vector<std::string> top1_labels(const ScoreMatrix& scores);

/// CSV with header "probe_id,<class labels...>".
std::string score_matrix_to_csv(const ScoreMatrix& scores);
ScoreMatrix parse_score_matrix_csv(std::string_view text);
void save_score_matrix_csv(const ScoreMatrix& scores, const std::filesystem::path& path);
ScoreMatrix load_score_matrix_csv(const std::filesystem::path& path);

/// LBTF f64 tensor (probes, classes) plus a JSON sidecar with
/// {"probe_ids": [...], "class_labels": [...]}.
void save_score_matrix_tensor(const ScoreMatrix& scores, const std::filesystem::path& tensor_path,
                              const std::filesystem::path& sidecar_path);
ScoreMatrix load_score_matrix_tensor(const std::filesystem::path& tensor_path,
                                     const std::filesystem::path& sidecar_path);

/// Dispatches on extension: ".csv" reads CSV, otherwise LBTF with a sidecar
/// at "<path>.json".
ScoreMatrix load_score_matrix(const std::filesystem::path& path);

}  // namespace lipfuse
