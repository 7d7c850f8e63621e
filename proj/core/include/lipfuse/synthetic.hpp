#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lipfuse/dataset.hpp"
#include "lipfuse/geometry.hpp"

namespace lipfuse::synthetic {

/// Strict manifest with `languages` languages (codes 0..languages-1) and
/// `subjects_per_language` subjects each, five clips per subject. Subject
/// ids are "<language>_sNNN", clip ids "<subject>_cK", landmark paths
/// "landmarks/<clip>.json". Gender and age band alternate by subject.
DatasetManifest make_manifest(int languages, int subjects_per_language);

struct DatasetSpec {
  int languages = 3;
  int subjects_per_language = 6;
  int frames = 75;     // raw frames per clip
  double fps = 25.0;
  double noise = 0.004;  // per-coordinate jitter amplitude
  std::uint64_t seed = 1;
};

/// Manifest plus one landmark sequence per record (same order). Mouth
/// opening oscillates with a language-dependent frequency; mouth width,
/// height and rest position are subject-dependent, so both language and
/// identity are learnable from pivot distances.
struct Dataset {
  DatasetManifest manifest;
  std::vector<LandmarkSequence> sequences;
};

Dataset make_dataset(const DatasetSpec& spec);

/// Writes manifest.json and landmarks/<clip>.json under dir.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

}  // namespace lipfuse::synthetic
