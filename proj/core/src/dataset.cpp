#include "lipfuse/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "io_util.hpp"
#include "json.hpp"
#include "lipfuse/error.hpp"
#include "lipfuse/rng.hpp"

namespace lipfuse {

using nlohmann::json;

std::string_view gender_name(Gender g) { return g == Gender::kMale ? "M" : "F"; }

std::string_view age_band_name(AgeBand a) {
  return a == AgeBand::kUnder30 ? "U30" : "O30";
}

namespace {

bool is_relative_path(std::string_view p) {
  if (p.empty()) return false;
  if (p.front() == '/' || p.front() == '\\') return false;
  if (p.size() >= 2 && p[1] == ':') return false;  // drive letter
  return true;
}

void check_record(const ClipRecord& r) {
  const std::string where = "clip '" + r.clip_id + "': ";
  if (r.clip_id.empty()) throw DataError("record with empty clip_id");
  if (r.subject_id.empty()) throw DataError(where + "empty subject_id");
  if (r.clip_index < 1 || r.clip_index > kClipsPerSubject) {
    throw DataError(where + "clip_index " + std::to_string(r.clip_index) +
                    " outside [1,5]");
  }
  if (r.fps.den <= 0 || r.fps.num <= 0) throw DataError(where + "invalid fps");
  const double fps = r.fps.value();
  if (fps < kMinFps || fps > kMaxFps) {
    throw DataError(where + "fps " + detail::format_double(fps) + " outside [25,60]");
  }
  if (!is_relative_path(r.landmark_path)) {
    throw DataError(where + "landmark_path must be a non-empty relative path");
  }
  if (r.frames_path && !is_relative_path(*r.frames_path)) {
    throw DataError(where + "frames_path must be a relative path");
  }
}

Rational parse_fps(const json& j, const std::string& clip_id) {
  if (j.is_number_integer()) return {j.get<std::int64_t>(), 1};
  if (j.is_number()) {
    // Decimal rates such as 29.97 are kept to millihertz precision.
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw DataError("clip '" + clip_id + "': invalid fps");
    Rational r{static_cast<std::int64_t>(std::llround(v * 1000.0)), 1000};
    const std::int64_t g = std::gcd(r.num, r.den);
    if (g > 1) r = {r.num / g, r.den / g};
    return r;
  }
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return {std::stoll(s), 1};
      return {std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1))};
    } catch (const std::exception&) {
      throw DataError("clip '" + clip_id + "': cannot parse fps '" + s + "'");
    }
  }
  throw DataError("clip '" + clip_id + "': fps must be a number or \"num/den\"");
}

json fps_to_json(const Rational& r) {
  if (r.den == 1) return r.num;
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

template <typename T>
T required(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError(ctx + "missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw DataError(ctx + "field '" + key + "' has the wrong type");
  }
}

ClipRecord record_from_json(const json& j, std::size_t pos) {
  const std::string ctx = "record " + std::to_string(pos) + ": ";
  if (!j.is_object()) throw DataError(ctx + "not an object");
  ClipRecord r;
  r.clip_id = required<std::string>(j, "clip_id", ctx);
  r.subject_id = required<std::string>(j, "subject_id", ctx);
  r.language = language_from_name(required<std::string>(j, "language", ctx));
  const auto gender = required<std::string>(j, "gender", ctx);
  if (gender == "M") {
    r.gender = Gender::kMale;
  } else if (gender == "F") {
    r.gender = Gender::kFemale;
  } else {
    throw DataError(ctx + "unknown gender '" + gender + "'");
  }
  const auto age = required<std::string>(j, "age_band", ctx);
  if (age == "U30") {
    r.age_band = AgeBand::kUnder30;
  } else if (age == "O30") {
    r.age_band = AgeBand::kOver30;
  } else {
    throw DataError(ctx + "unknown age_band '" + age + "'");
  }
  if (!j.contains("clip_index") || !j["clip_index"].is_number_integer()) {
    throw DataError(ctx + "clip_index must be an integer");
  }
  r.clip_index = j["clip_index"].get<int>();
  if (!j.contains("fps")) throw DataError(ctx + "missing field 'fps'");
  r.fps = parse_fps(j["fps"], r.clip_id);
  r.landmark_path = required<std::string>(j, "landmark_path", ctx);
  if (auto it = j.find("frames_path"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw DataError(ctx + "frames_path must be a string");
    r.frames_path = it->get<std::string>();
  }
  return r;
}

}  // namespace

DatasetManifest::DatasetManifest(std::vector<ClipRecord> records, bool strict)
    : records_(std::move(records)), strict_(strict) {
  struct SubjectInfo {
    Language language;
    Gender gender;
    AgeBand age_band;
    std::set<int> clip_indices;
    int count = 0;
  };
  std::map<std::string, SubjectInfo, std::less<>> subjects;

  for (std::size_t i = 0; i < records_.size(); ++i) {
    const ClipRecord& r = records_[i];
    check_record(r);
    if (!index_.emplace(r.clip_id, i).second) {
      throw DataError("duplicate clip_id '" + r.clip_id + "'");
    }
    auto [it, inserted] = subjects.try_emplace(
        r.subject_id, SubjectInfo{r.language, r.gender, r.age_band, {}, 0});
    SubjectInfo& s = it->second;
    if (!inserted &&
        (s.language != r.language || s.gender != r.gender || s.age_band != r.age_band)) {
      throw DataError("inconsistent subject labels for subject '" + r.subject_id +
                      "' (clip '" + r.clip_id + "')");
    }
    s.clip_indices.insert(r.clip_index);
    ++s.count;
  }

  for (const auto& [id, info] : subjects) {
    if (strict_) {
      if (info.count != kClipsPerSubject) {
        throw DataError("subject '" + id + "' has " + std::to_string(info.count) +
                        " clips, strict mode requires 5");
      }
      if (info.clip_indices.size() != static_cast<std::size_t>(kClipsPerSubject)) {
        throw DataError("subject '" + id + "' has repeated clip_index values");
      }
    }
    subjects_.push_back(id);
    subject_language_.emplace(id, info.language);
  }
}

Language DatasetManifest::subject_language(const std::string& subject_id) const {
  auto it = subject_language_.find(subject_id);
  if (it == subject_language_.end()) {
    throw DataError("unknown subject '" + subject_id + "'");
  }
  return it->second;
}

std::optional<std::size_t> DatasetManifest::find(std::string_view clip_id) const {
  auto it = index_.find(clip_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const ClipRecord& DatasetManifest::at(std::string_view clip_id) const {
  auto idx = find(clip_id);
  if (!idx) throw DataError("unknown clip_id '" + std::string(clip_id) + "'");
  return records_[*idx];
}

DatasetManifest parse_manifest(std::string_view json_text, bool strict) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("manifest parse failure: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("manifest must be a JSON object");
  if (!doc.contains("version") || doc["version"] != 1) {
    throw DataError("manifest version must be 1");
  }
  if (!doc.contains("records") || !doc["records"].is_array()) {
    throw DataError("manifest 'records' must be an array");
  }
  std::vector<ClipRecord> records;
  records.reserve(doc["records"].size());
  std::size_t pos = 0;
  for (const auto& item : doc["records"]) {
    records.push_back(record_from_json(item, pos++));
  }
  return DatasetManifest(std::move(records), strict);
}

DatasetManifest load_manifest(const std::filesystem::path& path, bool strict) {
  return parse_manifest(detail::read_text_file(path), strict);
}

std::string manifest_to_json(const DatasetManifest& manifest) {
  json records = json::array();
  for (const auto& r : manifest.records()) {
    json j;
    j["clip_id"] = r.clip_id;
    j["subject_id"] = r.subject_id;
    j["language"] = std::string(language_name(r.language));
    j["gender"] = std::string(gender_name(r.gender));
    j["age_band"] = std::string(age_band_name(r.age_band));
    j["clip_index"] = r.clip_index;
    j["fps"] = fps_to_json(r.fps);
    j["landmark_path"] = r.landmark_path;
    if (r.frames_path) j["frames_path"] = *r.frames_path;
    records.push_back(std::move(j));
  }
  json doc;
  doc["version"] = 1;
  doc["records"] = std::move(records);
  return doc.dump(2) + "\n";
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  detail::write_text_file(path, manifest_to_json(manifest));
}

std::string_view protocol_name(Protocol p) {
  return p == Protocol::kSubjectDependent ? "subject_dependent" : "subject_independent";
}

Protocol parse_protocol(std::string_view name) {
  if (name == "subject_dependent") return Protocol::kSubjectDependent;
  if (name == "subject_independent") return Protocol::kSubjectIndependent;
  throw InvalidArgument("unknown protocol '" + std::string(name) +
                        "' (expected subject_dependent or subject_independent)");
}

namespace {

std::map<std::string, std::vector<std::size_t>, std::less<>> clips_by_subject(
    const DatasetManifest& manifest) {
  std::map<std::string, std::vector<std::size_t>, std::less<>> out;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    out[manifest.records()[i].subject_id].push_back(i);
  }
  return out;
}

}  // namespace

Split partition_subject_dependent(const DatasetManifest& manifest, std::uint64_t seed) {
  if (!manifest.strict()) {
    throw DataError("subject-dependent partition requires a strict manifest");
  }
  Rng rng(seed);
  std::vector<bool> is_test(manifest.size(), false);
  for (const auto& [subject, clips] : clips_by_subject(manifest)) {
    // Candidate order is clip_index order, independent of record order.
    std::vector<std::size_t> ordered = clips;
    std::sort(ordered.begin(), ordered.end(), [&](std::size_t a, std::size_t b) {
      return manifest.records()[a].clip_index < manifest.records()[b].clip_index;
    });
    is_test[ordered[rng.uniform_index(ordered.size())]] = true;
  }
  Split split;
  split.protocol = Protocol::kSubjectDependent;
  split.seed = seed;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    (is_test[i] ? split.test : split.train).push_back(manifest.records()[i].clip_id);
  }
  return split;
}

Split partition_subject_independent(const DatasetManifest& manifest, std::uint64_t seed) {
  if (!manifest.strict()) {
    throw DataError("subject-independent partition requires a strict manifest");
  }
  constexpr std::size_t kPerPart = 4;
  std::array<std::vector<std::string>, kLanguageCount> by_language;
  for (const auto& subject : manifest.subjects()) {
    by_language[static_cast<std::size_t>(language_code(manifest.subject_language(subject)))]
        .push_back(subject);
  }

  enum Part : std::uint8_t { kTrain, kValidation, kTest };
  std::map<std::string, Part, std::less<>> assignment;
  Rng rng(seed);
  for (int code = 0; code < kLanguageCount; ++code) {
    auto& subjects = by_language[static_cast<std::size_t>(code)];
    if (subjects.empty()) continue;
    if (subjects.size() < 2 * kPerPart + 1) {
      throw DataError("language '" + std::string(language_name(language_from_code(code))) +
                      "' has " + std::to_string(subjects.size()) +
                      " subjects; subject-independent partition needs at least 9");
    }
    rng.shuffle(std::span<std::string>(subjects));
    for (std::size_t i = 0; i < subjects.size(); ++i) {
      assignment[subjects[i]] = i < kPerPart ? kTest : (i < 2 * kPerPart ? kValidation : kTrain);
    }
  }

  Split split;
  split.protocol = Protocol::kSubjectIndependent;
  split.seed = seed;
  for (const auto& r : manifest.records()) {
    switch (assignment.at(r.subject_id)) {
      case kTrain: split.train.push_back(r.clip_id); break;
      case kValidation: split.validation.push_back(r.clip_id); break;
      case kTest: split.test.push_back(r.clip_id); break;
    }
  }
  return split;
}

Split partition(const DatasetManifest& manifest, Protocol protocol, std::uint64_t seed) {
  return protocol == Protocol::kSubjectDependent
             ? partition_subject_dependent(manifest, seed)
             : partition_subject_independent(manifest, seed);
}

void validate_split(const DatasetManifest& manifest, const Split& split) {
  std::set<std::string, std::less<>> seen;
  for (const auto* part : {&split.train, &split.validation, &split.test}) {
    for (const auto& id : *part) {
      if (!manifest.find(id)) throw DataError("split references unknown clip '" + id + "'");
      if (!seen.insert(id).second) {
        throw DataError("clip '" + id + "' appears more than once in the split");
      }
    }
  }
  if (seen.size() != manifest.size()) {
    throw DataError("split covers " + std::to_string(seen.size()) + " of " +
                    std::to_string(manifest.size()) + " clips");
  }
}

std::string split_to_json(const Split& split) {
  json doc;
  doc["protocol"] = std::string(protocol_name(split.protocol));
  doc["seed"] = split.seed;
  doc["train"] = split.train;
  doc["validation"] = split.validation;
  doc["test"] = split.test;
  return doc.dump(2) + "\n";
}

Split parse_split(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("split parse failure: ") + e.what());
  }
  const std::string ctx = "split: ";
  Split split;
  try {
    split.protocol = parse_protocol(required<std::string>(doc, "protocol", ctx));
  } catch (const InvalidArgument& e) {
    throw DataError(e.what());
  }
  split.seed = required<std::uint64_t>(doc, "seed", ctx);
  split.train = required<std::vector<std::string>>(doc, "train", ctx);
  if (doc.contains("validation") && !doc["validation"].is_null()) {
    split.validation = required<std::vector<std::string>>(doc, "validation", ctx);
  }
  split.test = required<std::vector<std::string>>(doc, "test", ctx);
  return split;
}

Split load_split(const std::filesystem::path& path) {
  return parse_split(detail::read_text_file(path));
}

void save_split(const Split& split, const std::filesystem::path& path) {
  detail::write_text_file(path, split_to_json(split));
}

std::vector<std::vector<std::size_t>> kfold(std::span<const int> labels, int k,
                                            std::uint64_t seed, FoldMode mode) {
  if (k < kMinFolds || k > kMaxFolds) {
    throw InvalidArgument("k must be in [2,10], got " + std::to_string(k));
  }
  const auto folds_n = static_cast<std::size_t>(k);
  if (labels.size() < folds_n) {
    throw InvalidArgument("k=" + std::to_string(k) + " exceeds the number of items (" +
                          std::to_string(labels.size()) + ")");
  }
  Rng rng(seed);
  std::vector<std::size_t> order;
  order.reserve(labels.size());
  if (mode == FoldMode::kStratified) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    for (auto& [label, items] : by_class) {
      if (items.size() < folds_n) {
        throw DataError("class " + std::to_string(label) + " has " +
                        std::to_string(items.size()) + " items, fewer than k=" +
                        std::to_string(k));
      }
      rng.shuffle(std::span<std::size_t>(items));
      order.insert(order.end(), items.begin(), items.end());
    }
  } else {
    order.resize(labels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
  }
  std::vector<std::vector<std::size_t>> folds(folds_n);
  for (std::size_t j = 0; j < order.size(); ++j) folds[j % folds_n].push_back(order[j]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

EncodedLabels encode_labels(std::span<const std::string> labels) {
  EncodedLabels out;
  out.classes.assign(labels.begin(), labels.end());
  std::sort(out.classes.begin(), out.classes.end());
  out.classes.erase(std::unique(out.classes.begin(), out.classes.end()), out.classes.end());
  out.ids.reserve(labels.size());
  for (const auto& l : labels) {
    const auto it = std::lower_bound(out.classes.begin(), out.classes.end(), l);
    out.ids.push_back(static_cast<int>(it - out.classes.begin()));
  }
  return out;
}

}  // namespace lipfuse
