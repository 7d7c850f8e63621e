#include "lipfuse/multiclass.hpp"

#include <algorithm>
#include <cmath>

#include "io_util.hpp"
#include "json.hpp"
#include "lipfuse/dataset.hpp"
#include "lipfuse/error.hpp"
#include "lipfuse/tensor.hpp"
#include "parallel.hpp"

namespace lipfuse {

using nlohmann::json;

namespace {
constexpr double kMinScale = 1e-12;
}

Standardizer Standardizer::fit(const RowMatrix& x) {
  Standardizer s;
  const auto d = static_cast<std::size_t>(x.cols());
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  if (x.rows() == 0) return s;
  const double n = static_cast<double>(x.rows());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double mu = x.col(c).sum() / n;
    const double var = (x.col(c).array() - mu).square().sum() / n;
    const double sd = std::sqrt(var);
    s.mean[static_cast<std::size_t>(c)] = mu;
    s.scale[static_cast<std::size_t>(c)] = sd > kMinScale ? sd : 1.0;
  }
  return s;
}

RowMatrix Standardizer::apply(const RowMatrix& x) const {
  if (empty()) return x;
  if (static_cast<std::size_t>(x.cols()) != mean.size()) {
    throw DataError("standardizer dimension mismatch");
  }
  RowMatrix out = x;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    apply_inplace(std::span<double>(out.row(r).data(), mean.size()));
  }
  return out;
}

void Standardizer::apply_inplace(std::span<double> row) const {
  for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - mean[c]) / scale[c];
}

bool OvrTrainResult::converged() const {
  return std::all_of(statuses.begin(), statuses.end(),
                     [](SmoStatus s) { return s == SmoStatus::kConverged; });
}

std::vector<SmoSolution> solve_one_vs_rest(const Eigen::MatrixXd& gram,
                                           std::span<const int> class_ids,
                                           std::size_t class_count, const SmoParams& params,
                                           unsigned jobs) {
  std::vector<SmoSolution> out(class_count);
  detail::parallel_for(class_count, jobs, [&](std::size_t c) {
    std::vector<int> y(class_ids.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = class_ids[i] == static_cast<int>(c) ? 1 : -1;
    }
    out[c] = smo_solve(gram, y, params);
  });
  return out;
}

OvrTrainResult train_one_vs_rest(const RowMatrix& x, std::span<const std::string> labels,
                                 const OvrParams& params) {
  params.smo.kernel.validate();
  if (static_cast<std::size_t>(x.rows()) != labels.size()) {
    throw DataError("feature rows and label count differ");
  }
  if (!x.allFinite()) throw DataError("non-finite feature value");
  const EncodedLabels enc = encode_labels(labels);
  if (enc.classes.size() < 2) throw DataError("one-vs-rest training needs at least two classes");

  OvrTrainResult result;
  auto& model = result.model;
  model.class_labels = enc.classes;
  model.feature_len = static_cast<std::size_t>(x.cols());
  if (params.standardize) model.standardizer = Standardizer::fit(x);
  const RowMatrix xs = model.standardizer.apply(x);

  const Eigen::MatrixXd gram = gram_matrix(xs, params.smo.kernel);
  const auto solutions =
      solve_one_vs_rest(gram, enc.ids, enc.classes.size(), params.smo, params.jobs);
  for (std::size_t c = 0; c < solutions.size(); ++c) {
    std::vector<int> y(enc.ids.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = enc.ids[i] == static_cast<int>(c) ? 1 : -1;
    model.binaries.push_back(make_binary_model(xs, y, solutions[c], params.smo));
    result.statuses.push_back(solutions[c].status);
  }
  return result;
}

ScoreMatrix predict_scores(const SvmMulticlassModel& model, const RowMatrix& x,
                           std::vector<std::string> probe_ids) {
  if (static_cast<std::size_t>(x.rows()) != probe_ids.size()) {
    throw DataError("predict_scores: row count and probe id count differ");
  }
  if (static_cast<std::size_t>(x.cols()) != model.feature_len) {
    throw DataError("predict_scores: expected " + std::to_string(model.feature_len) +
                    " features, got " + std::to_string(x.cols()));
  }
  const RowMatrix xs = model.standardizer.apply(x);
  RowMatrix scores(x.rows(), static_cast<Eigen::Index>(model.binaries.size()));
  for (Eigen::Index r = 0; r < xs.rows(); ++r) {
    const std::span<const double> row(xs.row(r).data(), model.feature_len);
    for (std::size_t c = 0; c < model.binaries.size(); ++c) {
      scores(r, static_cast<Eigen::Index>(c)) = decision_value(model.binaries[c], row);
    }
  }
  return ScoreMatrix(std::move(probe_ids), model.class_labels, std::move(scores));
}

namespace {

json kernel_to_json(const Kernel& k) {
  json j;
  j["kind"] = std::string(kernel_kind_name(k.kind));
  if (k.kind != KernelKind::kLinear) j["gamma"] = k.gamma;
  if (k.kind == KernelKind::kPolynomial) {
    j["degree"] = k.degree;
    j["coef0"] = k.coef0;
  }
  return j;
}

Kernel kernel_from_json(const json& j) {
  Kernel k;
  k.kind = parse_kernel_kind(j.at("kind").get<std::string>());
  if (k.kind != KernelKind::kLinear) k.gamma = j.at("gamma").get<double>();
  if (k.kind == KernelKind::kPolynomial) {
    k.degree = j.at("degree").get<int>();
    k.coef0 = j.at("coef0").get<double>();
  }
  k.validate();
  return k;
}

std::filesystem::path tensor_path_for(const std::filesystem::path& json_path) {
  auto p = json_path;
  p.replace_extension(".sv.lbtf");
  return p;
}

}  // namespace

void save_model(const SvmMulticlassModel& model, const std::filesystem::path& json_path) {
  if (model.binaries.size() != model.class_labels.size()) {
    throw DataError("model has mismatched class and binary counts");
  }
  const auto tensor_path = tensor_path_for(json_path);
  std::size_t total_sv = 0;
  for (const auto& b : model.binaries) total_sv += b.support_count();
  const std::size_t width = model.feature_len + 1;
  std::vector<double> buf;
  buf.reserve(total_sv * width);
  json binaries = json::array();
  for (const auto& b : model.binaries) {
    if (b.feature_len() != model.feature_len && b.support_count() > 0) {
      throw DataError("binary feature length differs from model feature_len");
    }
    for (std::size_t i = 0; i < b.support_count(); ++i) {
      buf.push_back(b.coefficients[i]);
      const auto row = b.support_vectors.row(static_cast<Eigen::Index>(i));
      buf.insert(buf.end(), row.data(), row.data() + model.feature_len);
    }
    json jb;
    jb["support_count"] = b.support_count();
    jb["bias"] = b.bias;
    jb["tolerance"] = b.tolerance;
    binaries.push_back(std::move(jb));
  }

  json doc;
  doc["format"] = "lipfuse-svm-ovr";
  doc["version"] = 1;
  const Kernel kernel = model.binaries.empty() ? Kernel{} : model.binaries.front().kernel;
  doc["kernel"] = kernel_to_json(kernel);
  doc["C"] = model.binaries.empty() ? 1.0 : model.binaries.front().C;
  doc["class_labels"] = model.class_labels;
  doc["feature_len"] = model.feature_len;
  doc["standardization"] = model.standardizer.empty()
                               ? json(nullptr)
                               : json{{"mean", model.standardizer.mean},
                                      {"scale", model.standardizer.scale}};
  if (model.feature_config) {
    doc["feature_config"] = {{"pivot", model.feature_config->pivot},
                             {"metrics", model.feature_config->metrics.to_string()},
                             {"frames", model.feature_config->frames}};
  }
  doc["binaries"] = std::move(binaries);
  doc["support_vectors"] = tensor_path.filename().string();

  write_tensor(Tensor::from_f64({total_sv, width}, buf), tensor_path);
  detail::write_text_file(json_path, doc.dump(2) + "\n");
}

SvmMulticlassModel load_model(const std::filesystem::path& json_path) {
  SvmMulticlassModel model;
  try {
    const json doc = json::parse(detail::read_text_file(json_path));
    if (doc.at("format") != "lipfuse-svm-ovr" || doc.at("version") != 1) {
      throw DataError("not a version-1 lipfuse SVM model");
    }
    const Kernel kernel = kernel_from_json(doc.at("kernel"));
    const double c = doc.at("C").get<double>();
    model.class_labels = doc.at("class_labels").get<std::vector<std::string>>();
    model.feature_len = doc.at("feature_len").get<std::size_t>();
    if (const auto& st = doc.at("standardization"); !st.is_null()) {
      model.standardizer.mean = st.at("mean").get<std::vector<double>>();
      model.standardizer.scale = st.at("scale").get<std::vector<double>>();
      if (model.standardizer.mean.size() != model.feature_len ||
          model.standardizer.scale.size() != model.feature_len) {
        throw DataError("standardization length differs from feature_len");
      }
    }
    if (doc.contains("feature_config")) {
      const auto& fc = doc["feature_config"];
      model.feature_config = FeatureConfig{fc.at("pivot").get<int>(),
                                           MetricSet::parse(fc.at("metrics").get<std::string>()),
                                           fc.at("frames").get<int>()};
    }
    const auto tensor_file =
        json_path.parent_path() / doc.at("support_vectors").get<std::string>();
    const Tensor t = read_tensor(tensor_file);
    const std::size_t width = model.feature_len + 1;
    if (t.dtype() != DType::kF64 || t.rank() != 2 || t.dims()[1] != width) {
      throw DataError("support-vector tensor has the wrong shape");
    }
    const auto data = t.f64();
    std::size_t offset = 0;
    for (const auto& jb : doc.at("binaries")) {
      SvmBinaryModel b;
      b.kernel = kernel;
      b.C = c;
      b.bias = jb.at("bias").get<double>();
      b.tolerance = jb.at("tolerance").get<double>();
      const auto count = jb.at("support_count").get<std::size_t>();
      if (offset + count > t.dims()[0]) throw DataError("support-vector tensor too short");
      b.support_vectors.resize(static_cast<Eigen::Index>(count),
                               static_cast<Eigen::Index>(model.feature_len));
      for (std::size_t i = 0; i < count; ++i) {
        const double* row = data.data() + (offset + i) * width;
        b.coefficients.push_back(row[0]);
        std::copy(row + 1, row + width, b.support_vectors.row(static_cast<Eigen::Index>(i)).data());
      }
      offset += count;
      model.binaries.push_back(std::move(b));
    }
    if (offset != t.dims()[0]) throw DataError("support-vector tensor has extra rows");
    if (model.binaries.size() != model.class_labels.size()) {
      throw DataError("model binary count differs from class count");
    }
  } catch (const json::exception& e) {
    throw DataError("model " + json_path.string() + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError("model " + json_path.string() + ": " + e.what());
  }
  return model;
}

}  // namespace lipfuse
