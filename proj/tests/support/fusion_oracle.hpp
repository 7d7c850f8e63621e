#pragma once

// Linear-scan reference for language-gated fusion. Instead of sorting, it
// walks ranks 1..k by repeatedly picking the highest unpicked score (lowest
// column wins ties), stopping at the first identity that speaks the
// predicted language.

#include <string>
#include <vector>

#include "lipfuse/fusion.hpp"
#include "lipfuse/score_matrix.hpp"

namespace lipfuse::testing {

inline std::vector<FusionDecision> fuse_oracle(const ScoreMatrix& scores, const LanguageMap& lang_pred,
                                               const LanguageMap& enrolled, int k) {
  std::vector<FusionDecision> out;
  const std::size_t n = scores.class_count();
  for (std::size_t p = 0; p < scores.probe_count(); ++p) {
    const auto row = scores.row(p);
    const Language want = lang_pred.at(scores.probe_ids()[p]);
    std::vector<bool> taken(n, false);
    FusionDecision d;
    d.probe_id = scores.probe_ids()[p];
    d.predicted_language = want;
    std::size_t rank1 = 0;
    bool found = false;
    for (int r = 1; r <= k && !found; ++r) {
      std::size_t pick = n;
      for (std::size_t c = 0; c < n; ++c) {
        if (taken[c]) continue;
        if (pick == n || row[c] > row[pick]) pick = c;
      }
      taken[pick] = true;
      if (r == 1) rank1 = pick;
      const std::string& label = scores.class_labels()[pick];
      if (enrolled.at(label) == want) {
        d.predicted_identity = label;
        d.rank_of_choice = r;
        found = true;
      }
    }
    if (!found) {
      d.predicted_identity = scores.class_labels()[rank1];
      d.rank_of_choice = 1;
      d.fallback = true;
    }
    out.push_back(d);
  }
  return out;
}

}  // namespace lipfuse::testing
