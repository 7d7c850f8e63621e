#include "lipfuse/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "io_util.hpp"
#include "json.hpp"
#include "lipfuse/error.hpp"

namespace lipfuse {

using nlohmann::json;

double accuracy(std::span<const std::string> predictions, std::span<const std::string> truth) {
  if (predictions.size() != truth.size()) throw DataError("accuracy: length mismatch");
  if (predictions.empty()) throw DataError("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predictions[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)), counts_(labels_.size() * labels_.size(), 0) {}

std::size_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::size_t s = 0;
  for (std::size_t j = 0; j < size(); ++j) s += count(truth, j);
  return s;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t s = 0;
  for (std::size_t i = 0; i < size(); ++i) s += count(i, i);
  return s;
}

std::string ConfusionMatrix::to_csv() const {
  std::string out = "truth\\predicted";
  for (const auto& l : labels_) {
    detail::check_csv_field(l);
    out += ',' + l;
  }
  out += '\n';
  for (std::size_t i = 0; i < size(); ++i) {
    out += labels_[i];
    for (std::size_t j = 0; j < size(); ++j) out += ',' + std::to_string(count(i, j));
    out += '\n';
  }
  return out;
}

ConfusionMatrix confusion(std::span<const std::string> predictions,
                          std::span<const std::string> truth, std::span<const std::string> labels) {
  if (predictions.size() != truth.size()) throw DataError("confusion: length mismatch");
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!index.emplace(labels[i], i).second) {
      throw DataError("confusion: duplicate label '" + labels[i] + "'");
    }
  }
  auto lookup = [&](const std::string& v) {
    const auto it = index.find(v);
    if (it == index.end()) throw DataError("confusion: unknown label '" + v + "'");
    return it->second;
  };
  ConfusionMatrix m({labels.begin(), labels.end()});
  for (std::size_t i = 0; i < truth.size(); ++i) m.add(lookup(truth[i]), lookup(predictions[i]));
  return m;
}

std::vector<std::string> language_labels() {
  std::vector<std::string> out;
  for (Language l : kAllLanguages) out.emplace_back(language_name(l));
  return out;
}

ErrorAttribution attribute_errors(std::span<const FusionDecision> decisions,
                                  std::span<const RankList> rank_lists,
                                  std::span<const std::string> truth_ids,
                                  std::span<const Language> truth_langs, int k) {
  const auto n = decisions.size();
  if (rank_lists.size() != n || truth_ids.size() != n || truth_langs.size() != n) {
    throw DataError("attribute_errors: inputs have different lengths");
  }
  if (k < 1) throw InvalidArgument("attribute_errors: k must be >= 1");
  ErrorAttribution out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& d = decisions[i];
    if (d.probe_id != rank_lists[i].probe_id) {
      throw DataError("attribute_errors: probe '" + d.probe_id + "' misaligned with rank list '" +
                      rank_lists[i].probe_id + "'");
    }
    if (d.predicted_identity == truth_ids[i]) continue;
    ++out.total_errors;
    if (d.predicted_language != truth_langs[i]) {
      ++out.lang_wrong;
      continue;
    }
    const auto& ranked = rank_lists[i].ranked;
    const auto depth = std::min(ranked.size(), static_cast<std::size_t>(k));
    const bool present = std::any_of(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(depth),
                                     [&](const RankEntry& e) { return e.label == truth_ids[i]; });
    if (present) {
      ++out.lang_correct_outranked;
    } else {
      ++out.lang_correct_id_absent;
    }
  }
  return out;
}

ErrorAttribution attribute_errors(std::span<const FusionDecision> decisions,
                                  const ScoreMatrix& identity_scores,
                                  std::span<const std::string> truth_ids,
                                  std::span<const Language> truth_langs, int k) {
  if (decisions.size() != identity_scores.probe_count()) {
    throw DataError("attribute_errors: decision count differs from probe count");
  }
  std::vector<RankList> lists;
  lists.reserve(decisions.size());
  for (std::size_t p = 0; p < identity_scores.probe_count(); ++p) {
    lists.push_back(rank_row(identity_scores, p));
  }
  return attribute_errors(decisions, lists, truth_ids, truth_langs, k);
}

std::string format_percent(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("format_percent: value is not finite");
  // Truncate to hundredths of a percent: 156/256 prints 60.93%, 127/256 prints 49.60%.
  // The epsilon absorbs representation error in values such as 0.5 or 0.25.
  const auto basis = static_cast<long long>(std::floor(std::abs(value) * 1e4 + 1e-6));
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%s%lld.%02lld%%", value < 0 && basis > 0 ? "-" : "", basis / 100,
                basis % 100);
  return buf;
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string cell(const std::optional<double>& v) { return v ? format_percent(*v) : "-"; }

std::string sanitize_name(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out.empty() ? "unnamed" : out;
}

}  // namespace

std::string report_to_json(const Report& report) {
  json doc;
  doc["schema"] = "lipfuse-report";
  doc["schema_version"] = kReportSchemaVersion;
  json acc = json::array();
  for (const auto& [name, value] : report.accuracies) acc.push_back({{"name", name}, {"value", value}});
  doc["accuracies"] = std::move(acc);
  json summary = json::array();
  for (const auto& row : report.summary) {
    summary.push_back({{"model", row.model},
                       {"vli_subject_independent", optional_number(row.vli_subject_independent)},
                       {"vli_subject_dependent", optional_number(row.vli_subject_dependent)},
                       {"identification", optional_number(row.identification)},
                       {"fused", optional_number(row.fused)}});
  }
  doc["summary"] = std::move(summary);
  json confusions = json::array();
  for (const auto& [name, m] : report.confusions) {
    json counts = json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m.count(i, j));
      counts.push_back(std::move(row));
    }
    confusions.push_back({{"name", name}, {"labels", m.labels()}, {"counts", std::move(counts)}});
  }
  doc["confusion_matrices"] = std::move(confusions);
  json attributions = json::array();
  for (const auto& [name, a] : report.attributions) {
    attributions.push_back({{"name", name},
                            {"total_errors", a.total_errors},
                            {"lang_correct_id_absent", a.lang_correct_id_absent},
                            {"lang_wrong", a.lang_wrong},
                            {"lang_correct_outranked", a.lang_correct_outranked}});
  }
  doc["error_attribution"] = std::move(attributions);
  return doc.dump(2) + "\n";
}

std::string report_to_markdown(const Report& report) {
  std::string md = "# Evaluation report\n\n## Summary\n\n";
  md += "| Model | Language ID (subject independent) | Language ID (subject dependent) | "
        "Identification | Fused |\n";
  md += "| --- | --- | --- | --- | --- |\n";
  for (const auto& row : report.summary) {
    md += "| " + row.model + " | " + cell(row.vli_subject_independent) + " | " +
          cell(row.vli_subject_dependent) + " | " + cell(row.identification) + " | " +
          cell(row.fused) + " |\n";
  }
  md += "\n## Accuracies\n\n| Name | Accuracy |\n| --- | --- |\n";
  for (const auto& [name, value] : report.accuracies) {
    md += "| " + name + " | " + format_percent(value) + " |\n";
  }
  md += "\n## Error attribution\n\n";
  md += "| Name | Errors | Language wrong | Language correct, identity not in top-k | "
        "Language correct, outranked |\n";
  md += "| --- | --- | --- | --- | --- |\n";
  for (const auto& [name, a] : report.attributions) {
    auto share = [&](std::size_t v) {
      const double frac = a.total_errors ? static_cast<double>(v) / static_cast<double>(a.total_errors) : 0.0;
      return std::to_string(v) + " (" + format_percent(frac) + ")";
    };
    md += "| " + name + " | " + std::to_string(a.total_errors) + " | " + share(a.lang_wrong) +
          " | " + share(a.lang_correct_id_absent) + " | " + share(a.lang_correct_outranked) + " |\n";
  }
  for (const auto& [name, m] : report.confusions) {
    md += "\n## Confusion matrix: " + name + "\n\nRows are truth, columns are predictions.\n\n|  |";
    for (const auto& l : m.labels()) md += " " + l + " |";
    md += "\n| --- |";
    for (std::size_t j = 0; j < m.size(); ++j) md += " --- |";
    md += "\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
      md += "| " + m.labels()[i] + " |";
      for (std::size_t j = 0; j < m.size(); ++j) md += " " + std::to_string(m.count(i, j)) + " |";
      md += "\n";
    }
  }
  return md;
}

void validate_report_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("report: not JSON: ") + e.what());
  }
  auto fail = [](const std::string& what) { throw DataError("report schema: " + what); };
  auto is_rate = [](const json& v) {
    return v.is_number() && v.get<double>() >= 0.0 && v.get<double>() <= 1.0;
  };
  if (!doc.is_object()) fail("top level is not an object");
  if (doc.value("schema", "") != "lipfuse-report") fail("schema tag missing");
  if (!doc.contains("schema_version") || doc["schema_version"] != kReportSchemaVersion) {
    fail("unsupported schema_version");
  }
  for (const char* key : {"accuracies", "summary", "confusion_matrices", "error_attribution"}) {
    if (!doc.contains(key) || !doc[key].is_array()) fail(std::string(key) + " must be an array");
  }
  for (const auto& a : doc["accuracies"]) {
    if (!a.contains("name") || !a["name"].is_string()) fail("accuracy entry without name");
    if (!a.contains("value") || !is_rate(a["value"])) fail("accuracy value outside [0,1]");
  }
  for (const auto& r : doc["summary"]) {
    if (!r.contains("model") || !r["model"].is_string()) fail("summary row without model");
    for (const char* key : {"vli_subject_independent", "vli_subject_dependent", "identification", "fused"}) {
      if (!r.contains(key)) fail(std::string("summary row missing ") + key);
      if (!r[key].is_null() && !is_rate(r[key])) fail(std::string("summary ") + key + " outside [0,1]");
    }
  }
  for (const auto& m : doc["confusion_matrices"]) {
    if (!m.contains("name") || !m.contains("labels") || !m.contains("counts")) {
      fail("confusion matrix missing name/labels/counts");
    }
    const auto n = m["labels"].size();
    if (!m["counts"].is_array() || m["counts"].size() != n) fail("confusion counts not square");
    for (const auto& row : m["counts"]) {
      if (!row.is_array() || row.size() != n) fail("confusion counts not square");
      for (const auto& v : row) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
          fail("confusion count is not a non-negative integer");
        }
      }
    }
  }
  for (const auto& a : doc["error_attribution"]) {
    for (const char* key : {"total_errors", "lang_correct_id_absent", "lang_wrong", "lang_correct_outranked"}) {
      if (!a.contains(key) || !a[key].is_number_integer()) fail(std::string("attribution missing ") + key);
    }
    if (a["lang_correct_id_absent"].get<long long>() + a["lang_wrong"].get<long long>() +
            a["lang_correct_outranked"].get<long long>() !=
        a["total_errors"].get<long long>()) {
      fail("attribution categories do not sum to total_errors");
    }
  }
}

std::vector<std::filesystem::path> emit_report(const Report& report,
                                               const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create report directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  const auto json_path = dir / "report.json";
  detail::write_text_file(json_path, report_to_json(report));
  written.push_back(json_path);
  const auto md_path = dir / "report.md";
  detail::write_text_file(md_path, report_to_markdown(report));
  written.push_back(md_path);
  for (const auto& [name, m] : report.confusions) {
    const auto csv_path = dir / ("confusion_" + sanitize_name(name) + ".csv");
    detail::write_text_file(csv_path, m.to_csv());
    written.push_back(csv_path);
  }
  return written;
}

}  // namespace lipfuse
