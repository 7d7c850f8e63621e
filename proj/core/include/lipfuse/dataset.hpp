#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lipfuse/language.hpp"

namespace lipfuse {

enum class Gender : std::uint8_t { kMale, kFemale };
enum class AgeBand : std::uint8_t { kUnder30, kOver30 };

std::string_view gender_name(Gender g);     // "M" / "F"
std::string_view age_band_name(AgeBand a);  // "U30" / "O30"

/// Exact frame rate, e.g. 30000/1001.
struct Rational {
  std::int64_t num = 25;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

inline constexpr int kClipsPerSubject = 5;
inline constexpr double kMinFps = 25.0;
inline constexpr double kMaxFps = 60.0;

struct ClipRecord {
  std::string clip_id;
  std::string subject_id;
  Language language = Language::kFrench;
  Gender gender = Gender::kMale;
  AgeBand age_band = AgeBand::kUnder30;
  int clip_index = 1;  // 1..5
  Rational fps;
  std::string landmark_path;               // relative to the manifest directory
  std::optional<std::string> frames_path;  // relative

  friend bool operator==(const ClipRecord&, const ClipRecord&) = default;
};

/// Validated, immutable clip collection.
///
/// Non-strict mode checks per-record invariants, clip_id uniqueness and
/// per-subject label consistency. Strict mode additionally requires every
/// subject to have exactly five clips with distinct clip indices.
class DatasetManifest {
 public:
  DatasetManifest() = default;

  /// Throws DataError on any invariant violation.
  DatasetManifest(std::vector<ClipRecord> records, bool strict);

  const std::vector<ClipRecord>& records() const { return records_; }
  bool strict() const { return strict_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// Subject ids in ascending order.
  const std::vector<std::string>& subjects() const { return subjects_; }
  Language subject_language(const std::string& subject_id) const;

  /// Record index for clip_id, or nullopt.
  std::optional<std::size_t> find(std::string_view clip_id) const;
  const ClipRecord& at(std::string_view clip_id) const;

 private:
  std::vector<ClipRecord> records_;
  bool strict_ = false;
  std::vector<std::string> subjects_;
  std::map<std::string, Language, std::less<>> subject_language_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

DatasetManifest parse_manifest(std::string_view json_text, bool strict);
DatasetManifest load_manifest(const std::filesystem::path& path, bool strict);
std::string manifest_to_json(const DatasetManifest& manifest);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

enum class Protocol : std::uint8_t { kSubjectDependent, kSubjectIndependent };

std::string_view protocol_name(Protocol p);  // "subject_dependent" / ...
Protocol parse_protocol(std::string_view name);  // throws InvalidArgument

struct Split {
  Protocol protocol = Protocol::kSubjectDependent;
  std::uint64_t seed = 0;
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;

  friend bool operator==(const Split&, const Split&) = default;
};

/// Each subject contributes four clips to train and one, drawn by the seeded
/// generator, to test. Subjects are visited in ascending id order; the output
/// lists keep manifest record order. Requires a strict manifest.
Split partition_subject_dependent(const DatasetManifest& manifest, std::uint64_t seed);

/// Per language (code order), the language's subjects in ascending id order
/// are shuffled by the seeded generator; the first four go to test, the next
/// four to validation, the rest to train. Requires a strict manifest with at
/// least nine subjects in every language that occurs.
Split partition_subject_independent(const DatasetManifest& manifest, std::uint64_t seed);

Split partition(const DatasetManifest& manifest, Protocol protocol, std::uint64_t seed);

/// Throws DataError unless the split parts are pairwise disjoint and cover
/// exactly the manifest's clip ids.
void validate_split(const DatasetManifest& manifest, const Split& split);

std::string split_to_json(const Split& split);
Split parse_split(std::string_view json_text);
Split load_split(const std::filesystem::path& path);
void save_split(const Split& split, const std::filesystem::path& path);

enum class FoldMode : std::uint8_t { kStratified, kPlain };

inline constexpr int kMinFolds = 2;
inline constexpr int kMaxFolds = 10;

/// Partition of [0, labels.size()) into k folds, each fold sorted ascending.
///
/// Items are shuffled (per class when stratified), laid out class by class in
/// ascending label order and dealt round-robin to the folds, so fold sizes
/// differ by at most one and, when stratified, so do per-class counts.
/// Throws InvalidArgument for k outside [2, 10] or k > labels.size(), and
/// DataError when a class has fewer than k items in stratified mode.
std::vector<std::vector<std::size_t>> kfold(std::span<const int> labels, int k,
                                            std::uint64_t seed,
                                            FoldMode mode = FoldMode::kStratified);

/// Dense integer encoding of string labels; classes sorted ascending.
struct EncodedLabels {
  std::vector<int> ids;
  std::vector<std::string> classes;
};
EncodedLabels encode_labels(std::span<const std::string> labels);

}  // namespace lipfuse
