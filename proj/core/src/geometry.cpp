#include "lipfuse/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "io_util.hpp"
#include "json.hpp"
#include "lipfuse/error.hpp"
#include "parallel.hpp"

namespace lipfuse {

using nlohmann::json;

namespace {

void require_finite(Point2 p, Point2 q) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(q.x) ||
      !std::isfinite(q.y)) {
    throw DataError("distance of non-finite point");
  }
}

}  // namespace

double euclidean(Point2 p, Point2 q) {
  require_finite(p, q);
  return std::hypot(p.x - q.x, p.y - q.y);
}

double manhattan(Point2 p, Point2 q) {
  require_finite(p, q);
  return std::abs(p.x - q.x) + std::abs(p.y - q.y);
}

CosineDistance cosine_distance(Point2 p, Point2 q) {
  require_finite(p, q);
  const double np = std::hypot(p.x, p.y);
  const double nq = std::hypot(q.x, q.y);
  if (np == 0.0 || nq == 0.0) return {1.0, true};
  const double cos = (p.x * q.x + p.y * q.y) / (np * nq);
  return {std::clamp(1.0 - cos, 0.0, 2.0), false};
}

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kEuclidean: return "euclidean";
    case Metric::kManhattan: return "manhattan";
    case Metric::kCosine: return "cosine";
  }
  return "?";
}

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::kEuclidean;
  if (name == "manhattan") return Metric::kManhattan;
  if (name == "cosine") return Metric::kCosine;
  throw InvalidArgument("unknown metric '" + std::string(name) + "'");
}

MetricSet::MetricSet(std::initializer_list<Metric> metrics) {
  for (Metric m : metrics) bits_ |= static_cast<std::uint8_t>(1U << static_cast<int>(m));
}

MetricSet MetricSet::parse(std::string_view list) {
  MetricSet set;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t comma = list.find(',', start);
    if (comma == std::string_view::npos) comma = list.size();
    const auto name = list.substr(start, comma - start);
    if (name == "all") {
      set = all();
    } else {
      set.bits_ |= static_cast<std::uint8_t>(1U << static_cast<int>(parse_metric(name)));
    }
    start = comma + 1;
  }
  return set;
}

std::size_t MetricSet::size() const {
  return static_cast<std::size_t>(std::popcount(static_cast<unsigned>(bits_)));
}

std::vector<Metric> MetricSet::ordered() const {
  std::vector<Metric> out;
  for (Metric m : {Metric::kEuclidean, Metric::kManhattan, Metric::kCosine}) {
    if (contains(m)) out.push_back(m);
  }
  return out;
}

std::string MetricSet::to_string() const {
  std::string out;
  for (Metric m : ordered()) {
    if (!out.empty()) out += ',';
    out += metric_name(m);
  }
  return out;
}

void validate_sequence(const LandmarkSequence& seq) {
  const std::string where = "landmarks '" + seq.clip_id + "': ";
  if (!(seq.fps > 0.0) || !std::isfinite(seq.fps)) throw DataError(where + "fps must be positive");
  if (seq.frames.size() < 2) throw DataError(where + "at least 2 frames required");
  for (const auto& frame : seq.frames) {
    for (const auto& p : frame) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw DataError(where + "non-finite coordinate");
      }
    }
  }
}

LandmarkSequence resample_temporal(const LandmarkSequence& seq, int frames) {
  if (frames < 2) throw InvalidArgument("resample_temporal: T must be >= 2");
  validate_sequence(seq);
  const auto n = static_cast<std::int64_t>(seq.frames.size());
  const std::int64_t t_out = frames;

  LandmarkSequence out;
  out.clip_id = seq.clip_id;
  out.fps = static_cast<double>(t_out) * seq.fps / static_cast<double>(n);
  out.frames.resize(static_cast<std::size_t>(t_out));
  for (std::int64_t t = 0; t < t_out; ++t) {
    // Exact rational position t*(N-1)/(T-1).
    const std::int64_t num = t * (n - 1);
    const std::int64_t i0 = num / (t_out - 1);
    const std::int64_t rem = num % (t_out - 1);
    const auto& a = seq.frames[static_cast<std::size_t>(i0)];
    auto& dst = out.frames[static_cast<std::size_t>(t)];
    if (rem == 0) {
      dst = a;
      continue;
    }
    const auto& b = seq.frames[static_cast<std::size_t>(i0 + 1)];
    const double w = static_cast<double>(rem) / static_cast<double>(t_out - 1);
    for (int k = 0; k < kLandmarkCount; ++k) {
      dst[k].x = a[k].x + w * (b[k].x - a[k].x);
      dst[k].y = a[k].y + w * (b[k].y - a[k].y);
    }
  }
  return out;
}

namespace {

void check_feature_config(const FeatureConfig& config) {
  if (config.pivot < 0 || config.pivot >= kLandmarkCount) {
    throw InvalidArgument("pivot must be in [0,7], got " + std::to_string(config.pivot));
  }
  if (config.metrics.empty()) throw InvalidArgument("metric set is empty");
  if (config.frames < 2) throw InvalidArgument("T must be >= 2");
}

std::size_t write_features(const LandmarkSequence& seq, const FeatureConfig& config,
                           double* dst) {
  const auto resampled = resample_temporal(seq, config.frames);
  const bool use_e = config.metrics.contains(Metric::kEuclidean);
  const bool use_m = config.metrics.contains(Metric::kManhattan);
  const bool use_c = config.metrics.contains(Metric::kCosine);
  std::size_t zero_norm = 0;
  for (const auto& frame : resampled.frames) {
    const Point2 pivot = frame[static_cast<std::size_t>(config.pivot)];
    for (int k = 0; k < kLandmarkCount; ++k) {
      if (k == config.pivot) continue;
      const Point2 q = frame[static_cast<std::size_t>(k)];
      if (use_e) *dst++ = euclidean(pivot, q);
      if (use_m) *dst++ = manhattan(pivot, q);
      if (use_c) {
        const auto c = cosine_distance(pivot, q);
        zero_norm += c.zero_norm ? 1 : 0;
        *dst++ = c.value;
      }
    }
  }
  return zero_norm;
}

}  // namespace

FeatureVector extract_features(const LandmarkSequence& seq, const FeatureConfig& config) {
  check_feature_config(config);
  FeatureVector fv;
  fv.clip_id = seq.clip_id;
  fv.config = config;
  fv.values.resize(config.feature_len());
  fv.zero_norm_count = write_features(seq, config, fv.values.data());
  return fv;
}

FeatureMatrix extract_feature_matrix(std::span<const LandmarkSequence> sequences,
                                     const FeatureConfig& config, unsigned jobs) {
  check_feature_config(config);
  FeatureMatrix x(static_cast<Eigen::Index>(sequences.size()),
                  static_cast<Eigen::Index>(config.feature_len()));
  detail::parallel_for(sequences.size(), jobs, [&](std::size_t i) {
    write_features(sequences[i], config, x.row(static_cast<Eigen::Index>(i)).data());
  });
  return x;
}

LandmarkSequence parse_landmarks(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("landmark parse failure: ") + e.what());
  }
  LandmarkSequence seq;
  try {
    seq.clip_id = doc.at("clip_id").get<std::string>();
    seq.fps = doc.at("fps").get<double>();
    const auto& frames = doc.at("frames");
    if (!frames.is_array()) throw DataError("landmarks: 'frames' must be an array");
    seq.frames.reserve(frames.size());
    for (const auto& f : frames) {
      if (!f.is_array() || f.size() != kLandmarkCount) {
        throw DataError("landmarks '" + seq.clip_id + "': frame " +
                        std::to_string(seq.frames.size()) + " does not have 8 points");
      }
      LandmarkFrame frame;
      for (std::size_t k = 0; k < kLandmarkCount; ++k) {
        const auto& p = f[k];
        if (!p.is_array() || p.size() != 2) {
          throw DataError("landmarks '" + seq.clip_id + "': point is not [x, y]");
        }
        frame[k] = {p[0].get<double>(), p[1].get<double>()};
        if (!(frame[k].x >= 0.0 && frame[k].x <= 1.0 && frame[k].y >= 0.0 &&
              frame[k].y <= 1.0)) {
          throw DataError("landmarks '" + seq.clip_id + "': coordinate outside [0,1]");
        }
      }
      seq.frames.push_back(frame);
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("landmarks: malformed document: ") + e.what());
  }
  validate_sequence(seq);
  return seq;
}

LandmarkSequence load_landmarks(const std::filesystem::path& path) {
  return parse_landmarks(detail::read_text_file(path));
}

std::string landmarks_to_json(const LandmarkSequence& seq) {
  json frames = json::array();
  for (const auto& f : seq.frames) {
    json pts = json::array();
    for (const auto& p : f) pts.push_back({p.x, p.y});
    frames.push_back(std::move(pts));
  }
  json doc;
  doc["clip_id"] = seq.clip_id;
  doc["fps"] = seq.fps;
  doc["frames"] = std::move(frames);
  return doc.dump() + "\n";
}

void save_landmarks(const LandmarkSequence& seq, const std::filesystem::path& path) {
  detail::write_text_file(path, landmarks_to_json(seq));
}

}  // namespace lipfuse
