#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lipfuse/fusion.hpp"
#include "lipfuse/score_matrix.hpp"

namespace lipfuse {

/// Fraction of exact matches. Throws DataError on length mismatch or empty
/// input.
double accuracy(std::span<const std::string> predictions, std::span<const std::string> truth);

/// Rows are truth, columns are predictions, both in `labels` order.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> labels);

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  std::size_t count(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * labels_.size() + predicted];
  }
  void add(std::size_t truth, std::size_t predicted) { ++counts_[truth * labels_.size() + predicted]; }

  std::size_t row_sum(std::size_t truth) const;
  std::size_t total() const;
  std::size_t trace() const;
  std::string to_csv() const;

 private:
  std::vector<std::string> labels_;
  std::vector<std::size_t> counts_;
};

/// Throws DataError on length mismatch or a value outside labels.
ConfusionMatrix confusion(std::span<const std::string> predictions,
                          std::span<const std::string> truth, std::span<const std::string> labels);

/// Language names in code order, the label order used for language
/// confusion matrices.
std::vector<std::string> language_labels();

/// Why a fused decision was wrong. Each error lands in exactly one bucket,
/// tested in this order: predicted language wrong; true identity outside
/// the top-k; otherwise a same-language impostor outranked it.
struct ErrorAttribution {
  std::size_t total_errors = 0;
  std::size_t lang_correct_id_absent = 0;
  std::size_t lang_wrong = 0;
  std::size_t lang_correct_outranked = 0;

  friend bool operator==(const ErrorAttribution&, const ErrorAttribution&) = default;
};

/// All sequences are aligned by position; probe ids of decisions and rank
/// lists must agree (DataError otherwise).
ErrorAttribution attribute_errors(std::span<const FusionDecision> decisions,
                                  std::span<const RankList> rank_lists,
                                  std::span<const std::string> truth_ids,
                                  std::span<const Language> truth_langs, int k);

/// Convenience overload ranking every probe of identity_scores; decisions
/// must follow the score matrix's probe order.
ErrorAttribution attribute_errors(std::span<const FusionDecision> decisions,
                                  const ScoreMatrix& identity_scores,
                                  std::span<const std::string> truth_ids,
                                  std::span<const Language> truth_langs, int k);

/// One line of the summary table: language-ID accuracy under both
/// protocols, identification accuracy and fused accuracy, any may be absent.
struct SummaryRow {
  std::string model;
  std::optional<double> vli_subject_independent;
  std::optional<double> vli_subject_dependent;
  std::optional<double> identification;
  std::optional<double> fused;
};

struct Report {
  std::vector<std::pair<std::string, double>> accuracies;
  std::vector<SummaryRow> summary;
  std::vector<std::pair<std::string, ConfusionMatrix>> confusions;
  std::vector<std::pair<std::string, ErrorAttribution>> attributions;
};

/// value * 100 truncated (not rounded) to two decimals: 0.609375 -> "60.93%".
std::string format_percent(double value);

inline constexpr int kReportSchemaVersion = 1;

std::string report_to_json(const Report& report);
std::string report_to_markdown(const Report& report);

/// Throws DataError naming the first schema violation.
void validate_report_json(std::string_view json_text);

/// Writes report.json, report.md and confusion_<name>.csv per matrix into
/// dir (created if missing). Returns the written paths. Throws DataError
/// when dir is not writable.
std::vector<std::filesystem::path> emit_report(const Report& report,
                                               const std::filesystem::path& dir);

}  // namespace lipfuse
