#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lipfuse/language.hpp"
#include "lipfuse/score_matrix.hpp"

namespace lipfuse {

/// Label -> language lookup (probe predictions or gallery enrolment).
using LanguageMap = std::map<std::string, Language, std::less<>>;

inline constexpr int kDefaultFusionDepth = 8;

struct FusionDecision {
  std::string probe_id;
  std::string predicted_identity;
  Language predicted_language = Language::kFrench;
  int rank_of_choice = 1;  // 1-based position in the probe's rank list
  bool fallback = false;   // no top-k identity spoke the predicted language

  friend bool operator==(const FusionDecision&, const FusionDecision&) = default;
};

/// Language-gated identity decision. For each probe, scans the k best
/// identities in rank order and picks the first whose enrolled language
/// equals the predicted language; when none does, keeps the rank-1 identity
/// and sets fallback.
///
/// Throws InvalidArgument unless 1 <= k <= class count, and DataError when
/// an identity has no enrolled language or a probe has no prediction.
std::vector<FusionDecision> fuse(const ScoreMatrix& identity_scores,
                                 const LanguageMap& language_pred,
                                 const LanguageMap& subject_language,
                                 int k = kDefaultFusionDepth);

std::string decisions_to_json(const std::vector<FusionDecision>& decisions);
std::vector<FusionDecision> parse_decisions(std::string_view json_text);
void save_decisions(const std::vector<FusionDecision>& decisions, const std::filesystem::path& path);
std::vector<FusionDecision> load_decisions(const std::filesystem::path& path);

/// Two-column CSV "<key_header>,language" with lowercase language names.
std::string language_map_to_csv(const LanguageMap& map, std::string_view key_header);
/// Accepts any two-column CSV whose first row is a header.
LanguageMap parse_language_map_csv(std::string_view text);
void save_language_map(const LanguageMap& map, std::string_view key_header,
                       const std::filesystem::path& path);
LanguageMap load_language_map(const std::filesystem::path& path);

}  // namespace lipfuse
