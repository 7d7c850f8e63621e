#pragma once

#include <random>
#include <string>

#include "lipfuse/fusion.hpp"
#include "lipfuse/score_matrix.hpp"

namespace lipfuse::testing {

struct FusionInstance {
  ScoreMatrix scores;
  LanguageMap predictions;
  LanguageMap enrolled;
  int k = 1;
};

/// Random gallery of 2..40 identities over 1..8 languages, 1..5 probes.
/// Half the instances draw scores from a 5-value set so ties are common.
inline FusionInstance random_fusion_instance(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> n_ids(2, 40), n_langs(1, 8), n_probes(1, 5), coarse(0, 4);
  std::uniform_real_distribution<double> fine(-1.0, 1.0);
  const int n = n_ids(gen);
  const int langs = n_langs(gen);
  const int probes = n_probes(gen);
  const bool tied = gen() % 2 == 0;
  FusionInstance inst;
  std::vector<std::string> labels, probe_ids;
  for (int i = 0; i < n; ++i) {
    labels.push_back("id" + std::to_string(i));
    inst.enrolled[labels.back()] = static_cast<Language>(gen() % static_cast<unsigned>(langs));
  }
  RowMatrix m(probes, n);
  for (int p = 0; p < probes; ++p) {
    probe_ids.push_back("p" + std::to_string(p));
    inst.predictions[probe_ids.back()] = static_cast<Language>(gen() % static_cast<unsigned>(langs));
    for (int c = 0; c < n; ++c) m(p, c) = tied ? coarse(gen) * 0.25 : fine(gen);
  }
  inst.scores = ScoreMatrix(probe_ids, labels, m);
  inst.k = 1 + static_cast<int>(gen() % static_cast<unsigned>(n));
  return inst;
}

}  // namespace lipfuse::testing
