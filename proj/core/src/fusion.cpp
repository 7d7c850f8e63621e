#include "lipfuse/fusion.hpp"

#include "io_util.hpp"
#include "json.hpp"
#include "lipfuse/error.hpp"

namespace lipfuse {

using nlohmann::json;

std::vector<FusionDecision> fuse(const ScoreMatrix& identity_scores,
                                 const LanguageMap& language_pred,
                                 const LanguageMap& subject_language, int k) {
  const auto classes = identity_scores.class_count();
  if (k < 1 || static_cast<std::size_t>(k) > classes) {
    throw InvalidArgument("fusion depth k must be in [1, " + std::to_string(classes) + "]");
  }
  std::vector<Language> gallery_language;
  gallery_language.reserve(classes);
  for (const auto& label : identity_scores.class_labels()) {
    const auto it = subject_language.find(label);
    if (it == subject_language.end()) {
      throw DataError("identity '" + label + "' has no enrolled language");
    }
    gallery_language.push_back(it->second);
  }

  std::vector<FusionDecision> out;
  out.reserve(identity_scores.probe_count());
  for (std::size_t p = 0; p < identity_scores.probe_count(); ++p) {
    const auto& probe = identity_scores.probe_ids()[p];
    const auto pred = language_pred.find(probe);
    if (pred == language_pred.end()) {
      throw DataError("probe '" + probe + "' has no language prediction");
    }
    const auto order = rank_order(identity_scores.row(p));
    FusionDecision d;
    d.probe_id = probe;
    d.predicted_language = pred->second;
    d.fallback = true;
    d.rank_of_choice = 1;
    d.predicted_identity = identity_scores.class_labels()[order.front()];
    for (int r = 0; r < k; ++r) {
      const auto c = order[static_cast<std::size_t>(r)];
      if (gallery_language[c] == pred->second) {
        d.predicted_identity = identity_scores.class_labels()[c];
        d.rank_of_choice = r + 1;
        d.fallback = false;
        break;
      }
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::string decisions_to_json(const std::vector<FusionDecision>& decisions) {
  json arr = json::array();
  for (const auto& d : decisions) {
    arr.push_back({{"probe_id", d.probe_id},
                   {"predicted_identity", d.predicted_identity},
                   {"predicted_language", std::string(language_name(d.predicted_language))},
                   {"rank_of_choice", d.rank_of_choice},
                   {"fallback", d.fallback}});
  }
  return arr.dump(2) + "\n";
}

std::vector<FusionDecision> parse_decisions(std::string_view json_text) {
  std::vector<FusionDecision> out;
  try {
    const json arr = json::parse(json_text);
    if (!arr.is_array()) throw DataError("fusion decisions must be a JSON array");
    for (const auto& j : arr) {
      FusionDecision d;
      d.probe_id = j.at("probe_id").get<std::string>();
      d.predicted_identity = j.at("predicted_identity").get<std::string>();
      d.predicted_language = language_from_name(j.at("predicted_language").get<std::string>());
      d.rank_of_choice = j.at("rank_of_choice").get<int>();
      d.fallback = j.at("fallback").get<bool>();
      if (d.rank_of_choice < 1 || (d.fallback && d.rank_of_choice != 1)) {
        throw DataError("decision for '" + d.probe_id + "' has an invalid rank_of_choice");
      }
      out.push_back(std::move(d));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("fusion decisions: ") + e.what());
  }
  return out;
}

void save_decisions(const std::vector<FusionDecision>& decisions, const std::filesystem::path& path) {
  detail::write_text_file(path, decisions_to_json(decisions));
}

std::vector<FusionDecision> load_decisions(const std::filesystem::path& path) {
  return parse_decisions(detail::read_text_file(path));
}

std::string language_map_to_csv(const LanguageMap& map, std::string_view key_header) {
  std::string out = std::string(key_header) + ",language\n";
  for (const auto& [key, lang] : map) {
    detail::check_csv_field(key);
    out += key + ',' + std::string(language_name(lang)) + '\n';
  }
  return out;
}

LanguageMap parse_language_map_csv(std::string_view text) {
  const auto rows = detail::parse_csv(text);
  if (rows.empty() || rows.front().size() != 2) {
    throw DataError("language CSV must have a two-column header");
  }
  LanguageMap out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (!out.emplace(rows[r][0], language_from_name(rows[r][1])).second) {
      throw DataError("duplicate key '" + rows[r][0] + "' in language CSV");
    }
  }
  return out;
}

void save_language_map(const LanguageMap& map, std::string_view key_header,
                       const std::filesystem::path& path) {
  detail::write_text_file(path, language_map_to_csv(map, key_header));
}

LanguageMap load_language_map(const std::filesystem::path& path) {
  return parse_language_map_csv(detail::read_text_file(path));
}

}  // namespace lipfuse
