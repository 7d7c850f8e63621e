#include "lipfuse/score_matrix.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "io_util.hpp"
#include "json.hpp"
#include "lipfuse/error.hpp"
#include "lipfuse/tensor.hpp"

namespace lipfuse {

namespace {

void require_unique(const std::vector<std::string>& items, const char* what) {
  std::set<std::string_view> seen;
  for (const auto& s : items) {
    if (!seen.insert(s).second) {
      throw DataError(std::string("duplicate ") + what + " '" + s + "'");
    }
  }
}

}  // namespace

ScoreMatrix::ScoreMatrix(std::vector<std::string> probe_ids, std::vector<std::string> class_labels,
                         RowMatrix scores)
    : probe_ids_(std::move(probe_ids)),
      class_labels_(std::move(class_labels)),
      scores_(std::move(scores)) {
  if (static_cast<std::size_t>(scores_.rows()) != probe_ids_.size() ||
      static_cast<std::size_t>(scores_.cols()) != class_labels_.size()) {
    throw DataError("score matrix shape does not match probe/class counts");
  }
  require_unique(probe_ids_, "probe id");
  require_unique(class_labels_, "class label");
  if (!scores_.allFinite()) throw DataError("score matrix has non-finite entries");
}

std::size_t ScoreMatrix::probe_index(std::string_view probe_id) const {
  const auto it = std::find(probe_ids_.begin(), probe_ids_.end(), probe_id);
  if (it == probe_ids_.end()) throw DataError("unknown probe '" + std::string(probe_id) + "'");
  return static_cast<std::size_t>(it - probe_ids_.begin());
}

std::vector<std::size_t> rank_order(std::span<const double> row) {
  std::vector<std::size_t> order(row.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
  return order;
}

RankList rank_row(const ScoreMatrix& scores, std::size_t probe) {
  RankList out;
  out.probe_id = scores.probe_ids().at(probe);
  const auto row = scores.row(probe);
  for (std::size_t c : rank_order(row)) {
    out.ranked.push_back({scores.class_labels()[c], row[c]});
  }
  return out;
}

RankList rank(const ScoreMatrix& scores, std::string_view probe_id) {
  return rank_row(scores, scores.probe_index(probe_id));
}

std::vector<std::string> top1_labels(const ScoreMatrix& scores) {
  std::vector<std::string> out;
  out.reserve(scores.probe_count());
  for (std::size_t p = 0; p < scores.probe_count(); ++p) {
    const auto row = scores.row(p);
    // First maximum, matching the rank tie-break.
    const auto best = std::max_element(row.begin(), row.end()) - row.begin();
    out.push_back(scores.class_labels()[static_cast<std::size_t>(best)]);
  }
  return out;
}

std::string score_matrix_to_csv(const ScoreMatrix& scores) {
  std::string out = "probe_id";
  for (const auto& label : scores.class_labels()) {
    detail::check_csv_field(label);
    out += ',';
    out += label;
  }
  out += '\n';
  for (std::size_t p = 0; p < scores.probe_count(); ++p) {
    detail::check_csv_field(scores.probe_ids()[p]);
    out += scores.probe_ids()[p];
    for (double v : scores.row(p)) {
      out += ',';
      out += detail::format_double(v);
    }
    out += '\n';
  }
  return out;
}

ScoreMatrix parse_score_matrix_csv(std::string_view text) {
  const auto rows = detail::parse_csv(text);
  if (rows.empty() || rows.front().empty() || rows.front().front() != "probe_id") {
    throw DataError("score CSV must start with a 'probe_id' header column");
  }
  std::vector<std::string> labels(rows.front().begin() + 1, rows.front().end());
  std::vector<std::string> probes;
  RowMatrix m(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(labels.size()));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    probes.push_back(rows[r][0]);
    for (std::size_t c = 0; c < labels.size(); ++c) {
      m(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) =
          detail::parse_double(rows[r][c + 1]);
    }
  }
  return ScoreMatrix(std::move(probes), std::move(labels), std::move(m));
}

void save_score_matrix_csv(const ScoreMatrix& scores, const std::filesystem::path& path) {
  detail::write_text_file(path, score_matrix_to_csv(scores));
}

ScoreMatrix load_score_matrix_csv(const std::filesystem::path& path) {
  return parse_score_matrix_csv(detail::read_text_file(path));
}

void save_score_matrix_tensor(const ScoreMatrix& scores, const std::filesystem::path& tensor_path,
                              const std::filesystem::path& sidecar_path) {
  const auto& m = scores.scores();
  write_tensor(Tensor::from_f64({static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())},
                                std::span<const double>(m.data(), static_cast<std::size_t>(m.size()))),
               tensor_path);
  nlohmann::json side;
  side["probe_ids"] = scores.probe_ids();
  side["class_labels"] = scores.class_labels();
  detail::write_text_file(sidecar_path, side.dump(2) + "\n");
}

ScoreMatrix load_score_matrix_tensor(const std::filesystem::path& tensor_path,
                                     const std::filesystem::path& sidecar_path) {
  const Tensor t = read_tensor(tensor_path);
  if (t.dtype() != DType::kF64 || t.rank() != 2) {
    throw DataError("score tensor must be a rank-2 f64 tensor");
  }
  nlohmann::json side;
  try {
    side = nlohmann::json::parse(detail::read_text_file(sidecar_path));
    auto probes = side.at("probe_ids").get<std::vector<std::string>>();
    auto labels = side.at("class_labels").get<std::vector<std::string>>();
    RowMatrix m(static_cast<Eigen::Index>(t.dims()[0]), static_cast<Eigen::Index>(t.dims()[1]));
    std::copy(t.f64().begin(), t.f64().end(), m.data());
    return ScoreMatrix(std::move(probes), std::move(labels), std::move(m));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("score sidecar: ") + e.what());
  }
}

ScoreMatrix load_score_matrix(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return load_score_matrix_csv(path);
  return load_score_matrix_tensor(path, std::filesystem::path(path.string() + ".json"));
}

}  // namespace lipfuse
