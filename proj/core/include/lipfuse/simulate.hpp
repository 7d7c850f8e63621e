#pragma once

#include <cstdint>
#include <vector>

#include "lipfuse/fusion.hpp"
#include "lipfuse/score_matrix.hpp"

namespace lipfuse {

/// Controls a synthetic identification + language-prediction run.
struct SimulationConfig {
  int n_subjects = 256;
  int n_languages = 8;
  int n_probes = 10000;
  double top1_acc = 0.496;  // P(true identity at rank 1)
  double topk_hit = 0.80;   // P(true identity within the first k ranks)
  int k = kDefaultFusionDepth;
  double lang_acc = 0.86;   // P(language prediction is correct)
  std::uint64_t seed = 0;
};

/// Throws InvalidArgument when: n_languages outside [1, 8]; n_subjects not a
/// positive multiple of n_languages; n_probes < 0; probabilities outside
/// [0, 1]; topk_hit < top1_acc; k outside [1, n_subjects]; k == 1 with
/// topk_hit != top1_acc; k == n_subjects with topk_hit != 1.
void validate(const SimulationConfig& config);

struct SimulationResult {
  ScoreMatrix identity_scores;
  LanguageMap language_predictions;  // probe -> predicted language
  LanguageMap subject_language;      // identity -> enrolled language
  std::vector<std::string> true_identity;
  std::vector<Language> true_language;
  std::vector<int> true_rank;  // 1-based rank of the true identity
};

/// Gallery "S000".. with languages assigned round-robin by language code.
/// Per probe (ids "P00000".., drawn in order): the true identity is uniform
/// over the gallery; its rank is 1 with probability top1_acc, uniform in
/// [2, k] with probability topk_hit - top1_acc, and uniform in
/// [k + 1, n_subjects] otherwise; the other identities fill the remaining
/// ranks in a uniformly shuffled order. The score at rank r is
/// 1 - (r - 1) / n + u / (2n) with u uniform in [0, 1), which is strictly
/// decreasing in r. The language prediction is the true language with
/// probability lang_acc, otherwise uniform over the other languages.
SimulationResult simulate_scores(const SimulationConfig& config);

}  // namespace lipfuse
