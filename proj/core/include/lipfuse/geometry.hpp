#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lipfuse/matrix.hpp"

namespace lipfuse {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

inline constexpr int kLandmarkCount = 8;

/// The eight lip landmarks of one frame. Index semantics are owned by the
/// landmark producer; the core treats indices as opaque.
using LandmarkFrame = std::array<Point2, kLandmarkCount>;

/// Throws InvalidArgument on non-finite coordinates.
double euclidean(Point2 p, Point2 q);
double manhattan(Point2 p, Point2 q);

struct CosineDistance {
  double value = 1.0;      // in [0, 2]
  bool zero_norm = false;  // an operand was the zero vector; value is 1.0
};

/// 1 - cos(angle) between p and q taken as position vectors.
CosineDistance cosine_distance(Point2 p, Point2 q);

enum class Metric : std::uint8_t { kEuclidean = 0, kManhattan = 1, kCosine = 2 };

std::string_view metric_name(Metric m);
Metric parse_metric(std::string_view name);  // throws InvalidArgument

/// Non-empty subset of the three metrics. Iteration order is always
/// euclidean, manhattan, cosine regardless of how the set was built.
class MetricSet {
 public:
  MetricSet() = default;
  MetricSet(std::initializer_list<Metric> metrics);

  static MetricSet all() { return {Metric::kEuclidean, Metric::kManhattan, Metric::kCosine}; }
  /// Parses "euclidean,manhattan" style lists; throws InvalidArgument.
  static MetricSet parse(std::string_view list);

  bool contains(Metric m) const { return (bits_ >> static_cast<int>(m)) & 1U; }
  std::size_t size() const;
  bool empty() const { return bits_ == 0; }
  std::vector<Metric> ordered() const;
  std::string to_string() const;  // comma separated, fixed order

  friend bool operator==(const MetricSet&, const MetricSet&) = default;

 private:
  std::uint8_t bits_ = 0;
};

struct LandmarkSequence {
  std::string clip_id;
  double fps = 25.0;
  std::vector<LandmarkFrame> frames;
};

/// Throws DataError unless fps > 0, frame count >= 2 and all coordinates
/// are finite.
void validate_sequence(const LandmarkSequence& seq);

/// Linear interpolation to exactly `frames` frames. Output frame t samples
/// the input at fractional position t*(N-1)/(T-1); output fps is
/// T / (N / fps). Positions that land on an input frame copy it exactly.
LandmarkSequence resample_temporal(const LandmarkSequence& seq, int frames);

inline constexpr int kDefaultFrames = 250;
inline constexpr int kDefaultPivot = 0;

struct FeatureConfig {
  int pivot = kDefaultPivot;
  MetricSet metrics = MetricSet{Metric::kEuclidean};
  int frames = kDefaultFrames;

  std::size_t feature_len() const {
    return static_cast<std::size_t>(frames) * (kLandmarkCount - 1) * metrics.size();
  }
  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

struct FeatureVector {
  std::string clip_id;
  FeatureConfig config;
  std::vector<double> values;  // frame-major: [frame][landmark != pivot][metric]
  std::size_t zero_norm_count = 0;  // cosine evaluations that hit a zero vector
};

/// Resamples to config.frames, then appends, per frame, per non-pivot
/// landmark in ascending index, per chosen metric in fixed order, the
/// pivot-to-landmark distance.
FeatureVector extract_features(const LandmarkSequence& seq, const FeatureConfig& config);

using FeatureMatrix = RowMatrix;

/// Row i = extract_features(sequences[i]). Rows are computed on `jobs`
/// threads (0 = hardware concurrency).
FeatureMatrix extract_feature_matrix(std::span<const LandmarkSequence> sequences,
                                     const FeatureConfig& config, unsigned jobs = 1);

LandmarkSequence parse_landmarks(std::string_view json_text);
LandmarkSequence load_landmarks(const std::filesystem::path& path);
std::string landmarks_to_json(const LandmarkSequence& seq);
void save_landmarks(const LandmarkSequence& seq, const std::filesystem::path& path);

}  // namespace lipfuse
