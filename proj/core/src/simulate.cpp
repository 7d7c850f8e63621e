#include "lipfuse/simulate.hpp"

#include <algorithm>
#include <numeric>

#include "lipfuse/error.hpp"
#include "lipfuse/rng.hpp"

namespace lipfuse {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::string numbered(char prefix, int value, int width) {
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  }
  return prefix + digits;
}

}  // namespace

void validate(const SimulationConfig& c) {
  if (c.n_languages < 1 || c.n_languages > kLanguageCount) {
    throw InvalidArgument("n_languages must be in [1, 8]");
  }
  if (c.n_subjects < 1 || c.n_subjects % c.n_languages != 0) {
    throw InvalidArgument("n_subjects must be a positive multiple of n_languages");
  }
  if (c.n_probes < 0) throw InvalidArgument("n_probes must be non-negative");
  if (!is_probability(c.top1_acc) || !is_probability(c.topk_hit) || !is_probability(c.lang_acc)) {
    throw InvalidArgument("simulation rates must lie in [0, 1]");
  }
  if (c.topk_hit < c.top1_acc) throw InvalidArgument("topk_hit must be >= top1_acc");
  if (c.k < 1 || c.k > c.n_subjects) throw InvalidArgument("k must be in [1, n_subjects]");
  if (c.k == 1 && c.topk_hit != c.top1_acc) {
    throw InvalidArgument("with k = 1, topk_hit must equal top1_acc");
  }
  if (c.k == c.n_subjects && c.topk_hit != 1.0) {
    throw InvalidArgument("with k = n_subjects, topk_hit must be 1");
  }
  if (c.n_languages == 1 && c.lang_acc != 1.0) {
    throw InvalidArgument("with a single language, lang_acc must be 1");
  }
}

SimulationResult simulate_scores(const SimulationConfig& config) {
  validate(config);
  const int n = config.n_subjects;
  const int width = std::max(3, static_cast<int>(std::to_string(n - 1).size()));
  const int probe_width = std::max(5, static_cast<int>(std::to_string(config.n_probes).size()));

  std::vector<std::string> gallery;
  SimulationResult out;
  for (int s = 0; s < n; ++s) {
    gallery.push_back(numbered('S', s, width));
    out.subject_language.emplace(gallery.back(), language_from_code(s % config.n_languages));
  }

  Rng rng(config.seed);
  std::vector<std::string> probes;
  RowMatrix scores(config.n_probes, n);
  std::vector<int> others(static_cast<std::size_t>(n - 1));
  for (int p = 0; p < config.n_probes; ++p) {
    probes.push_back(numbered('P', p, probe_width));
    const int truth = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    const double u = rng.uniform01();
    int true_rank = 1;
    if (u < config.top1_acc) {
      true_rank = 1;
    } else if (u < config.topk_hit) {
      true_rank = 2 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(config.k - 1)));
    } else {
      true_rank = config.k + 1 +
                  static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n - config.k)));
    }

    // Ranked identity list: shuffled impostors with the true identity
    // inserted at true_rank.
    std::iota(others.begin(), others.end(), 0);
    if (truth < n - 1) others[static_cast<std::size_t>(truth)] = n - 1;
    rng.shuffle(std::span<int>(others));
    std::vector<int> ranked(others.begin(), others.end());
    ranked.insert(ranked.begin() + (true_rank - 1), truth);

    for (int r = 0; r < n; ++r) {
      const double jitter = rng.uniform01() / (2.0 * n);
      scores(p, ranked[static_cast<std::size_t>(r)]) =
          1.0 - static_cast<double>(r) / static_cast<double>(n) + jitter;
    }

    const Language true_lang = out.subject_language.at(gallery[static_cast<std::size_t>(truth)]);
    Language predicted = true_lang;
    if (rng.uniform01() >= config.lang_acc) {
      int code = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(config.n_languages - 1)));
      if (code >= language_code(true_lang)) ++code;
      predicted = language_from_code(code);
    }
    out.language_predictions.emplace(probes.back(), predicted);
    out.true_identity.push_back(gallery[static_cast<std::size_t>(truth)]);
    out.true_language.push_back(true_lang);
    out.true_rank.push_back(true_rank);
  }
  out.identity_scores = ScoreMatrix(std::move(probes), std::move(gallery), std::move(scores));
  return out;
}

}  // namespace lipfuse
