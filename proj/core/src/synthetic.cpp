#include "lipfuse/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include "lipfuse/error.hpp"
#include "lipfuse/rng.hpp"

namespace lipfuse::synthetic {

DatasetManifest make_manifest(int languages, int subjects_per_language) {
  if (languages < 1 || languages > kLanguageCount || subjects_per_language < 0) {
    throw InvalidArgument("synthetic manifest: bad language or subject count");
  }
  std::vector<ClipRecord> records;
  for (int code = 0; code < languages; ++code) {
    const Language lang = language_from_code(code);
    for (int s = 0; s < subjects_per_language; ++s) {
      char subject[64];
      std::snprintf(subject, sizeof(subject), "%s_s%03d", std::string(language_name(lang)).c_str(), s);
      for (int c = 1; c <= kClipsPerSubject; ++c) {
        ClipRecord r;
        r.subject_id = subject;
        r.clip_id = r.subject_id + "_c" + std::to_string(c);
        r.language = lang;
        r.gender = s % 2 == 0 ? Gender::kMale : Gender::kFemale;
        r.age_band = (s / 2) % 2 == 0 ? AgeBand::kUnder30 : AgeBand::kOver30;
        r.clip_index = c;
        r.fps = {25, 1};
        r.landmark_path = "landmarks/" + r.clip_id + ".json";
        records.push_back(std::move(r));
      }
    }
  }
  return DatasetManifest(std::move(records), true);
}

Dataset make_dataset(const DatasetSpec& spec) {
  if (spec.frames < 2 || !(spec.fps > 0.0) || spec.noise < 0.0) {
    throw InvalidArgument("synthetic dataset: bad frame count, fps or noise");
  }
  Dataset ds;
  ds.manifest = make_manifest(spec.languages, spec.subjects_per_language);
  Rng rng(spec.seed);

  struct Subject {
    double width, height, cx, cy, phase, amp;
  };
  std::map<std::string, Subject> subjects;
  for (const auto& id : ds.manifest.subjects()) {
    subjects[id] = Subject{0.20 + 0.10 * rng.uniform01(), 0.06 + 0.05 * rng.uniform01(),
                           0.45 + 0.10 * rng.uniform01(), 0.45 + 0.10 * rng.uniform01(),
                           2.0 * std::numbers::pi * rng.uniform01(), 0.6 + 0.4 * rng.uniform01()};
  }

  for (const auto& rec : ds.manifest.records()) {
    const Subject& s = subjects.at(rec.subject_id);
    const double freq = 1.0 + 0.6 * language_code(rec.language);  // Hz
    const double clip_phase = 0.3 * rng.uniform01();
    LandmarkSequence seq;
    seq.clip_id = rec.clip_id;
    seq.fps = spec.fps;
    seq.frames.resize(static_cast<std::size_t>(spec.frames));
    for (int t = 0; t < spec.frames; ++t) {
      const double time = t / spec.fps;
      const double opening =
          s.amp * (0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * freq * time + s.phase + clip_phase));
      for (int k = 0; k < kLandmarkCount; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / kLandmarkCount;
        const double x = s.cx + s.width * std::cos(angle);
        const double y = s.cy + s.height * std::sin(angle) * (1.0 + opening);
        auto& p = seq.frames[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)];
        p.x = std::clamp(x + spec.noise * (2.0 * rng.uniform01() - 1.0), 0.0, 1.0);
        p.y = std::clamp(y + spec.noise * (2.0 * rng.uniform01() - 1.0), 0.0, 1.0);
      }
    }
    ds.sequences.push_back(std::move(seq));
  }
  return ds;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "landmarks");
  save_manifest(dataset.manifest, dir / "manifest.json");
  for (std::size_t i = 0; i < dataset.sequences.size(); ++i) {
    save_landmarks(dataset.sequences[i], dir / dataset.manifest.records()[i].landmark_path);
  }
}

}  // namespace lipfuse::synthetic
