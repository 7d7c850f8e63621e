#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "lipfuse/dataset.hpp"
#include "lipfuse/error.hpp"
#include "lipfuse/synthetic.hpp"
#include "temp_dir.hpp"

namespace lipfuse {
namespace {

std::string record_json(const std::string& clip, const std::string& subject,
                        const std::string& lang = "french", int index = 1,
                        const std::string& fps = "25", const std::string& gender = "M",
                        const std::string& path = "") {
  const std::string p = path.empty() ? "landmarks/" + clip + ".json" : path;
  return R"({"clip_id": ")" + clip + R"(", "subject_id": ")" + subject + R"(", "language": ")" + lang +
         R"(", "gender": ")" + gender + R"(", "age_band": "U30", "clip_index": )" +
         std::to_string(index) + R"(, "fps": )" + fps + R"(, "landmark_path": ")" + p + "\"}";
}

std::string manifest_json(const std::vector<std::string>& records) {
  std::string out = R"({"version": 1, "records": [)";
  for (std::size_t i = 0; i < records.size(); ++i) out += (i ? ", " : "") + records[i];
  return out + "]}";
}

std::vector<std::string> five_clips(const std::string& subject, const std::string& lang = "french") {
  std::vector<std::string> out;
  for (int i = 1; i <= 5; ++i) {
    out.push_back(record_json(subject + "_c" + std::to_string(i), subject, lang, i));
  }
  return out;
}

TEST(Manifest, ParsesValidRecords) {
  const auto m = parse_manifest(manifest_json(five_clips("s1", "japanese")), true);
  ASSERT_EQ(m.size(), 5U);
  EXPECT_EQ(m.records()[0].language, Language::kJapanese);
  EXPECT_EQ(m.subjects(), std::vector<std::string>{"s1"});
  EXPECT_EQ(m.at("s1_c3").clip_index, 3);
  EXPECT_FALSE(m.find("nope").has_value());
}

TEST(Manifest, FixtureOf256SubjectsHas1280Records) {
  const auto m = synthetic::make_manifest(8, 32);
  EXPECT_EQ(m.size(), 1280U);
  EXPECT_EQ(m.subjects().size(), 256U);
  const auto again = parse_manifest(manifest_to_json(m), true);
  EXPECT_EQ(again.records(), m.records());
}

TEST(Manifest, RejectsDuplicateClipId) {
  auto recs = five_clips("s1");
  recs.push_back(record_json("s1_c1", "s2"));
  EXPECT_THROW(parse_manifest(manifest_json(recs), false), DataError);
}

TEST(Manifest, RejectsUnknownLanguage) {
  EXPECT_THROW(parse_manifest(manifest_json({record_json("a", "s", "klingon")}), false), DataError);
}

TEST(Manifest, RejectsInconsistentSubjectLabels) {
  auto recs = five_clips("s1");
  recs[2] = record_json("s1_c3", "s1", "german", 3);
  EXPECT_THROW(parse_manifest(manifest_json(recs), false), DataError);
  recs = five_clips("s1");
  recs[4] = record_json("s1_c5", "s1", "french", 5, "25", "F");
  EXPECT_THROW(parse_manifest(manifest_json(recs), false), DataError);
}

TEST(Manifest, StrictRequiresFiveClips) {
  auto recs = five_clips("s1");
  recs.pop_back();
  EXPECT_NO_THROW(parse_manifest(manifest_json(recs), false));
  EXPECT_THROW(parse_manifest(manifest_json(recs), true), DataError);
}

TEST(Manifest, StrictRejectsRepeatedClipIndex) {
  auto recs = five_clips("s1");
  recs[4] = record_json("s1_c5", "s1", "french", 4);
  EXPECT_NO_THROW(parse_manifest(manifest_json(recs), false));
  EXPECT_THROW(parse_manifest(manifest_json(recs), true), DataError);
}

TEST(Manifest, RecordInvariants) {
  EXPECT_THROW(parse_manifest(manifest_json({record_json("a", "s", "french", 0)}), false), DataError);
  EXPECT_THROW(parse_manifest(manifest_json({record_json("a", "s", "french", 6)}), false), DataError);
  EXPECT_THROW(parse_manifest(manifest_json({record_json("a", "s", "french", 1, "24.9")}), false),
               DataError);
  EXPECT_THROW(parse_manifest(manifest_json({record_json("a", "s", "french", 1, "61")}), false),
               DataError);
  EXPECT_THROW(
      parse_manifest(manifest_json({record_json("a", "s", "french", 1, "25", "M", "/abs/x.json")}), false),
      DataError);
  EXPECT_THROW(parse_manifest("{not json", false), DataError);
}

TEST(Manifest, FpsAcceptsRationalStrings) {
  const auto m = parse_manifest(manifest_json({record_json("a", "s", "french", 1, "\"30000/1001\"")}), false);
  EXPECT_EQ(m.records()[0].fps, (Rational{30000, 1001}));
  const auto again = parse_manifest(manifest_to_json(m), false);
  EXPECT_EQ(again.records()[0].fps, (Rational{30000, 1001}));
}

TEST(Manifest, SaveLoadRoundTrip) {
  testing::TempDir dir;
  const auto m = synthetic::make_manifest(2, 3);
  save_manifest(m, dir / "m.json");
  EXPECT_EQ(load_manifest(dir / "m.json", true).records(), m.records());
  EXPECT_THROW(load_manifest(dir / "missing.json", false), DataError);
}

void expect_partition_of(const DatasetManifest& m, const Split& s) {
  std::set<std::string> all;
  std::size_t total = 0;
  for (const auto* part : {&s.train, &s.validation, &s.test}) {
    all.insert(part->begin(), part->end());
    total += part->size();
  }
  EXPECT_EQ(total, all.size()) << "parts overlap";
  std::set<std::string> ids;
  for (const auto& r : m.records()) ids.insert(r.clip_id);
  EXPECT_EQ(all, ids);
}

TEST(Partition, SubjectDependentFourOne) {
  const auto m = synthetic::make_manifest(8, 32);
  const Split s = partition_subject_dependent(m, 7);
  EXPECT_EQ(s.train.size(), 1024U);
  EXPECT_EQ(s.test.size(), 256U);
  EXPECT_TRUE(s.validation.empty());
  expect_partition_of(m, s);
  std::map<std::string, int> test_per_subject;
  for (const auto& id : s.test) ++test_per_subject[m.at(id).subject_id];
  EXPECT_EQ(test_per_subject.size(), 256U);
  for (const auto& [subj, n] : test_per_subject) EXPECT_EQ(n, 1) << subj;
}

TEST(Partition, SubjectDependentTestClipVariesWithSeed) {
  const auto m = synthetic::make_manifest(2, 9);
  EXPECT_EQ(partition_subject_dependent(m, 1), partition_subject_dependent(m, 1));
  EXPECT_NE(partition_subject_dependent(m, 1).test, partition_subject_dependent(m, 2).test);
}

TEST(Partition, SubjectIndependentIsSubjectDisjoint) {
  const auto m = synthetic::make_manifest(8, 32);
  const Split s = partition_subject_independent(m, 7);
  EXPECT_EQ(s.train.size(), 960U);
  EXPECT_EQ(s.validation.size(), 160U);
  EXPECT_EQ(s.test.size(), 160U);
  expect_partition_of(m, s);

  auto subjects = [&](const std::vector<std::string>& part) {
    std::set<std::string> out;
    for (const auto& id : part) out.insert(m.at(id).subject_id);
    return out;
  };
  const auto tr = subjects(s.train), va = subjects(s.validation), te = subjects(s.test);
  for (const auto& sub : te) {
    EXPECT_FALSE(tr.contains(sub));
    EXPECT_FALSE(va.contains(sub));
  }
  for (const auto& sub : va) EXPECT_FALSE(tr.contains(sub));

  std::map<Language, int> test_subjects;
  for (const auto& sub : te) ++test_subjects[m.subject_language(sub)];
  EXPECT_EQ(test_subjects.size(), 8U);
  for (const auto& [lang, n] : test_subjects) EXPECT_EQ(n, 4);
}

TEST(Partition, PreconditionsEnforced) {
  EXPECT_THROW(partition_subject_independent(synthetic::make_manifest(3, 6), 0), DataError);
  auto recs = synthetic::make_manifest(1, 2).records();
  recs.pop_back();
  const DatasetManifest loose(recs, false);
  EXPECT_THROW(partition_subject_dependent(loose, 0), DataError);
}

TEST(Partition, ValidateSplitCatchesOverlapAndGaps) {
  const auto m = synthetic::make_manifest(2, 9);
  Split s = partition_subject_dependent(m, 3);
  EXPECT_NO_THROW(validate_split(m, s));
  Split overlap = s;
  overlap.test.push_back(overlap.train.front());
  EXPECT_THROW(validate_split(m, overlap), DataError);
  Split missing = s;
  missing.train.pop_back();
  EXPECT_THROW(validate_split(m, missing), DataError);
  Split unknown = s;
  unknown.train.push_back("ghost");
  EXPECT_THROW(validate_split(m, unknown), DataError);
}

TEST(Partition, SplitJsonRoundTripIsByteStable) {
  const auto m = synthetic::make_manifest(8, 9);
  const Split s = partition(m, Protocol::kSubjectIndependent, 42);
  const std::string text = split_to_json(s);
  const Split back = parse_split(text);
  EXPECT_EQ(back, s);
  EXPECT_EQ(split_to_json(back), text);
  EXPECT_EQ(parse_protocol("subject_dependent"), Protocol::kSubjectDependent);
  EXPECT_THROW(parse_protocol("loso"), InvalidArgument);
}

std::vector<int> class_labels(int classes, int per_class) {
  std::vector<int> out;
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) out.push_back((c * 7 + i) % classes);
  }
  return out;
}

TEST(KFold, FoldsPartitionIndicesWithBalancedSizes) {
  for (int k = kMinFolds; k <= kMaxFolds; ++k) {
    const auto labels = class_labels(4, 13);
    for (FoldMode mode : {FoldMode::kStratified, FoldMode::kPlain}) {
      const auto folds = kfold(labels, k, 5, mode);
      ASSERT_EQ(folds.size(), static_cast<std::size_t>(k));
      std::vector<int> seen(labels.size(), 0);
      std::size_t lo = labels.size(), hi = 0;
      for (const auto& f : folds) {
        EXPECT_TRUE(std::is_sorted(f.begin(), f.end()));
        for (auto i : f) ++seen[i];
        lo = std::min(lo, f.size());
        hi = std::max(hi, f.size());
      }
      EXPECT_LE(hi - lo, 1U);
      for (int s : seen) EXPECT_EQ(s, 1);
    }
  }
}

TEST(KFold, StratifiedKeepsClassCountsWithinOne) {
  const auto labels = class_labels(5, 17);
  const auto folds = kfold(labels, 4, 9);
  for (int c = 0; c < 5; ++c) {
    int lo = 1 << 30, hi = 0;
    for (const auto& f : folds) {
      const int n = static_cast<int>(std::count_if(f.begin(), f.end(), [&](auto i) { return labels[i] == c; }));
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
    EXPECT_LE(hi - lo, 1) << "class " << c;
  }
}

TEST(KFold, DeterministicPerSeed) {
  const auto labels = class_labels(3, 10);
  EXPECT_EQ(kfold(labels, 5, 1), kfold(labels, 5, 1));
  EXPECT_NE(kfold(labels, 5, 1), kfold(labels, 5, 2));
}

TEST(KFold, Preconditions) {
  const auto labels = class_labels(2, 4);
  EXPECT_THROW(kfold(labels, 1, 0), InvalidArgument);
  EXPECT_THROW(kfold(labels, 11, 0), InvalidArgument);
  EXPECT_THROW(kfold(std::vector<int>{0, 1, 0}, 4, 0, FoldMode::kPlain), InvalidArgument);
  EXPECT_THROW(kfold(labels, 5, 0), DataError);  // a class has only 4 items
  EXPECT_NO_THROW(kfold(labels, 5, 0, FoldMode::kPlain));
}

TEST(Labels, EncodingSortsClasses) {
  const std::vector<std::string> labels{"b", "a", "c", "a"};
  const auto enc = encode_labels(labels);
  EXPECT_EQ(enc.classes, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(enc.ids, (std::vector<int>{1, 0, 2, 0}));
}

}  // namespace
}  // namespace lipfuse
