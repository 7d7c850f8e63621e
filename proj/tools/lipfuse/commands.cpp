#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lipfuse/dataset.hpp"
#include "lipfuse/error.hpp"
#include "lipfuse/evaluation.hpp"
#include "lipfuse/fusion.hpp"
#include "lipfuse/geometry.hpp"
#include "lipfuse/grid_search.hpp"
#include "lipfuse/multiclass.hpp"
#include "lipfuse/preprocess.hpp"
#include "lipfuse/score_matrix.hpp"
#include "lipfuse/simulate.hpp"
#include "lipfuse/tensor.hpp"

namespace lipfuse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void Context::info(const std::string& msg) const {
  if (log != nullptr) *log << "lipfuse: " << msg << '\n';
}

fs::path Context::output(const std::string& name) {
  if (out_dir.empty()) throw InvalidArgument("no output directory: pass --out or set LIPFUSE_OUTPUT_DIR");
  if (std::find(outputs.begin(), outputs.end(), name) == outputs.end()) outputs.push_back(name);
  return out_dir / name;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out.flush()) throw DataError("write failed for '" + path.string() + "'");
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// Indices of the clips selected from the manifest, in split-list order.
std::vector<std::size_t> select_clips(const DatasetManifest& manifest, const std::string& split_path,
                                      const std::string& subset) {
  static const std::set<std::string> kSubsets{"all", "train", "validation", "test", "trainval"};
  if (!kSubsets.contains(subset)) throw InvalidArgument("unknown subset '" + subset + "'");
  std::vector<std::size_t> out;
  if (split_path.empty()) {
    if (subset != "all") throw InvalidArgument("--subset " + subset + " needs --split");
    for (std::size_t i = 0; i < manifest.size(); ++i) out.push_back(i);
    return out;
  }
  const Split split = load_split(split_path);
  validate_split(manifest, split);
  std::vector<const std::vector<std::string>*> parts;
  if (subset == "train" || subset == "trainval" || subset == "all") parts.push_back(&split.train);
  if (subset == "validation" || subset == "trainval" || subset == "all") {
    parts.push_back(&split.validation);
  }
  if (subset == "test" || subset == "all") parts.push_back(&split.test);
  for (const auto* part : parts) {
    for (const auto& id : *part) out.push_back(*manifest.find(id));
  }
  if (out.empty()) throw DataError("subset '" + subset + "' of the split is empty");
  return out;
}

std::vector<LandmarkSequence> load_sequences(const DatasetManifest& manifest,
                                             const fs::path& manifest_path,
                                             const std::vector<std::size_t>& clips) {
  const fs::path base = manifest_path.parent_path();
  std::vector<LandmarkSequence> seqs;
  seqs.reserve(clips.size());
  for (std::size_t idx : clips) {
    const ClipRecord& rec = manifest.records()[idx];
    LandmarkSequence seq = load_landmarks(base / rec.landmark_path);
    if (seq.clip_id != rec.clip_id) {
      throw DataError("landmark file '" + rec.landmark_path + "' holds clip '" + seq.clip_id +
                      "', expected '" + rec.clip_id + "'");
    }
    seqs.push_back(std::move(seq));
  }
  return seqs;
}

FeatureConfig feature_config(int pivot, const std::string& metrics, int frames) {
  if (pivot < 0 || pivot >= kLandmarkCount) throw InvalidArgument("--pivot must lie in [0,7]");
  if (frames < 2) throw InvalidArgument("--frames must be at least 2");
  return FeatureConfig{pivot, MetricSet::parse(metrics), frames};
}

GridSpec tiny_grid() {
  GridSpec g;
  g.kernels = {Kernel::linear(), Kernel::rbf(0.1)};
  g.Cs = {1.0, 10.0};
  g.pivots = {0};
  g.metric_sets = {MetricSet{Metric::kEuclidean}, MetricSet::all()};
  g.frames = {50};
  return g;
}

LanguageMap subject_languages_from_manifest(const DatasetManifest& manifest) {
  LanguageMap map;
  for (const auto& s : manifest.subjects()) map.emplace(s, manifest.subject_language(s));
  return map;
}

struct Truth {
  std::map<std::string, std::pair<std::string, Language>, std::less<>> by_probe;
};

Truth truth_from_manifest(const DatasetManifest& manifest) {
  Truth t;
  for (const auto& r : manifest.records()) t.by_probe[r.clip_id] = {r.subject_id, r.language};
  return t;
}

// probe_id,identity,language
Truth parse_truth_csv(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path.string() + "' is empty");
  Truth t;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_line(line);
    if (f.size() != 3) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
    }
    if (!t.by_probe.emplace(f[0], std::pair{f[1], language_from_name(f[2])}).second) {
      throw DataError(path.string() + ": duplicate probe '" + f[0] + "'");
    }
  }
  return t;
}

std::string truth_to_csv(const SimulationResult& sim) {
  std::string out = "probe_id,identity,language\n";
  const auto& probes = sim.identity_scores.probe_ids();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    out += probes[i] + ',' + sim.true_identity[i] + ',' +
           std::string(language_name(sim.true_language[i])) + '\n';
  }
  return out;
}

}  // namespace

int cmd_validate(const ValidateOptions& o, Context& ctx) {
  const DatasetManifest m = load_manifest(o.manifest, o.strict);
  std::set<Language> langs;
  for (const auto& r : m.records()) langs.insert(r.language);
  ctx.info(o.manifest + ": " + std::to_string(m.size()) + " records, " +
           std::to_string(m.subjects().size()) + " subjects, " + std::to_string(langs.size()) +
           " languages (" + (o.strict ? "strict" : "non-strict") + ")");
  return 0;
}

int cmd_partition(const PartitionOptions& o, Context& ctx) {
  const Protocol protocol = parse_protocol(o.protocol);
  const fs::path out = ctx.output("split.json");
  const DatasetManifest m = load_manifest(o.manifest, true);
  const Split split = partition(m, protocol, o.seed);
  save_split(split, out);
  ctx.info(std::string(protocol_name(protocol)) + ": train " + std::to_string(split.train.size()) +
           ", validation " + std::to_string(split.validation.size()) + ", test " +
           std::to_string(split.test.size()));
  return 0;
}

int cmd_features(const FeaturesOptions& o, Context& ctx) {
  const FeatureConfig cfg = feature_config(o.pivot, o.metrics, o.frames);
  const fs::path tensor_path = ctx.output("features.lbtf");
  const fs::path sidecar_path = ctx.output("features.json");
  const DatasetManifest m = load_manifest(o.manifest, false);
  const auto clips = select_clips(m, o.split, o.subset);
  const auto seqs = load_sequences(m, o.manifest, clips);
  const FeatureMatrix x = extract_feature_matrix(seqs, cfg, ctx.jobs);

  const std::vector<std::uint64_t> dims{static_cast<std::uint64_t>(x.rows()),
                                        static_cast<std::uint64_t>(x.cols())};
  write_tensor(Tensor::from_f64(dims, {x.data(), static_cast<std::size_t>(x.size())}), tensor_path);

  json side;
  side["version"] = 1;
  side["pivot"] = cfg.pivot;
  side["metrics"] = cfg.metrics.to_string();
  side["frames"] = cfg.frames;
  side["feature_len"] = cfg.feature_len();
  side["clip_ids"] = json::array();
  for (const auto& s : seqs) side["clip_ids"].push_back(s.clip_id);
  write_file(sidecar_path, side.dump(2) + "\n");
  ctx.info("extracted " + std::to_string(x.rows()) + " x " + std::to_string(x.cols()) + " features");
  return 0;
}

int cmd_train(const TrainOptions& o, Context& ctx) {
  if (o.target != "identity" && o.target != "language") {
    throw InvalidArgument("--target must be 'identity' or 'language'");
  }
  if (o.k_min < kMinFolds || o.k_max > kMaxFolds || o.k_min > o.k_max) {
    throw InvalidArgument("fold range must satisfy 2 <= k-min <= k-max <= 10");
  }
  if (!(o.tolerance > 0.0)) throw InvalidArgument("--tolerance must be positive");
  if (o.max_passes < 1) throw InvalidArgument("--max-passes must be at least 1");
  FoldMode fold_mode = FoldMode::kStratified;
  if (o.fold_mode == "plain") {
    fold_mode = FoldMode::kPlain;
  } else if (o.fold_mode != "stratified") {
    throw InvalidArgument("--fold-mode must be 'stratified' or 'plain'");
  }
  GridSpec spec;
  if (!o.grid.empty()) {
    spec = parse_grid_spec(read_file(o.grid));
  } else if (o.grid_preset == "default") {
    spec = GridSpec::default_grid();
  } else if (o.grid_preset == "tiny") {
    spec = tiny_grid();
  } else {
    throw InvalidArgument("--grid-preset must be 'default' or 'tiny'");
  }
  const std::vector<GridConfig> grid = spec.expand();
  if (o.split.empty()) throw InvalidArgument("train needs --split");

  const DatasetManifest m = load_manifest(o.manifest, false);
  const auto clips = select_clips(m, o.split, "trainval");
  const auto seqs = load_sequences(m, o.manifest, clips);
  std::vector<std::string> labels;
  for (std::size_t idx : clips) {
    const ClipRecord& r = m.records()[idx];
    labels.push_back(o.target == "identity" ? r.subject_id : std::string(language_name(r.language)));
  }

  GridSearchOptions gopt;
  gopt.k_min = o.k_min;
  gopt.k_max = o.k_max;
  gopt.seed = o.seed;
  gopt.fold_mode = fold_mode;
  gopt.tolerance = o.tolerance;
  gopt.max_passes = o.max_passes;
  gopt.standardize = !o.no_standardize;
  gopt.jobs = ctx.jobs;
  ctx.info("grid search: " + std::to_string(grid.size()) + " configs, k " + std::to_string(o.k_min) +
           ".." + std::to_string(o.k_max) + ", " + std::to_string(labels.size()) + " clips");
  const GridSearchResult gs = grid_search(seqs, labels, grid, gopt);
  write_file(ctx.output("grid_report.json"), grid_report_json(gs));
  write_file(ctx.output("grid_report.csv"), grid_report_csv(gs));
  ctx.info("best: " + gs.best_config.to_string() + " k=" + std::to_string(gs.best_k) +
           " cv accuracy " + format_percent(gs.best_cv_accuracy));

  const FeatureMatrix x = extract_feature_matrix(seqs, gs.best_config.features, ctx.jobs);
  OvrParams params;
  params.smo.C = gs.best_config.C;
  params.smo.kernel = gs.best_config.kernel;
  params.smo.tolerance = o.tolerance;
  params.smo.max_passes = o.max_passes;
  params.standardize = !o.no_standardize;
  params.jobs = ctx.jobs;
  OvrTrainResult fit = train_one_vs_rest(x, labels, params);
  fit.model.feature_config = gs.best_config.features;
  const fs::path model_path = ctx.output("model.json");
  ctx.output("model.sv.lbtf");
  save_model(fit.model, model_path);
  if (!fit.converged()) {
    ctx.info("final SMO fit did not converge within the iteration budget");
    return 3;
  }
  return 0;
}

int cmd_predict(const PredictOptions& o, Context& ctx) {
  const fs::path scores_path = ctx.output("scores.csv");
  const fs::path pred_path = ctx.output("predictions.csv");
  const SvmMulticlassModel model = load_model(o.model);
  if (!model.feature_config) throw DataError("model '" + o.model + "' has no feature configuration");
  const DatasetManifest m = load_manifest(o.manifest, false);
  const auto clips = select_clips(m, o.split, o.split.empty() ? "all" : o.subset);
  const auto seqs = load_sequences(m, o.manifest, clips);
  const FeatureMatrix x = extract_feature_matrix(seqs, *model.feature_config, ctx.jobs);
  std::vector<std::string> ids;
  for (const auto& s : seqs) ids.push_back(s.clip_id);
  const ScoreMatrix scores = predict_scores(model, x, ids);
  save_score_matrix_csv(scores, scores_path);

  const auto top1 = top1_labels(scores);
  std::string csv = "probe_id,predicted\n";
  for (std::size_t i = 0; i < ids.size(); ++i) csv += ids[i] + ',' + top1[i] + '\n';
  write_file(pred_path, csv);
  ctx.info("scored " + std::to_string(ids.size()) + " probes against " +
           std::to_string(scores.class_count()) + " classes");
  return 0;
}

int cmd_fuse(const FuseOptions& o, Context& ctx) {
  if (o.manifest.empty() == o.subject_languages.empty()) {
    throw InvalidArgument("pass exactly one of --manifest or --subject-languages");
  }
  if (o.k < 1) throw InvalidArgument("--k must be at least 1");
  const fs::path out = ctx.output("decisions.json");
  const ScoreMatrix scores = load_score_matrix(o.identity_scores);
  const LanguageMap preds = load_language_map(o.language_predictions);
  const LanguageMap enrolled = o.manifest.empty()
                                   ? load_language_map(o.subject_languages)
                                   : subject_languages_from_manifest(load_manifest(o.manifest, false));
  const auto decisions = fuse(scores, preds, enrolled, o.k);
  save_decisions(decisions, out);
  const auto fallbacks = std::count_if(decisions.begin(), decisions.end(),
                                       [](const FusionDecision& d) { return d.fallback; });
  ctx.info("fused " + std::to_string(decisions.size()) + " probes, " + std::to_string(fallbacks) +
           " fell back to rank 1");
  return 0;
}

int cmd_evaluate(const EvaluateOptions& o, Context& ctx) {
  if (o.manifest.empty() == o.truth.empty()) {
    throw InvalidArgument("pass exactly one of --manifest or --truth");
  }
  const Protocol protocol = parse_protocol(o.protocol);
  if (o.k < 1) throw InvalidArgument("--k must be at least 1");
  if (ctx.out_dir.empty()) throw InvalidArgument("no output directory: pass --out or set LIPFUSE_OUTPUT_DIR");

  const auto decisions = load_decisions(o.decisions);
  const ScoreMatrix scores = load_score_matrix(o.identity_scores);
  const Truth truth = o.manifest.empty() ? parse_truth_csv(o.truth)
                                         : truth_from_manifest(load_manifest(o.manifest, false));

  const auto& probes = scores.probe_ids();
  if (decisions.size() != probes.size()) {
    throw DataError("decisions and identity scores cover different probe counts");
  }
  std::vector<std::string> truth_ids;
  std::vector<Language> truth_langs;
  std::vector<std::string> truth_lang_names;
  std::vector<std::string> fused_ids;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (decisions[i].probe_id != probes[i]) {
      throw DataError("decision " + std::to_string(i) + " is for probe '" + decisions[i].probe_id +
                      "', identity scores have '" + probes[i] + "'");
    }
    const auto it = truth.by_probe.find(probes[i]);
    if (it == truth.by_probe.end()) throw DataError("no ground truth for probe '" + probes[i] + "'");
    truth_ids.push_back(it->second.first);
    truth_langs.push_back(it->second.second);
    truth_lang_names.emplace_back(language_name(it->second.second));
    fused_ids.push_back(decisions[i].predicted_identity);
  }

  Report report;
  SummaryRow row;
  row.model = o.model_name;
  const double ident = accuracy(top1_labels(scores), truth_ids);
  const double fused = accuracy(fused_ids, truth_ids);
  row.identification = ident;
  row.fused = fused;
  report.accuracies.emplace_back("identification", ident);
  report.accuracies.emplace_back("fused", fused);
  if (!o.language_predictions.empty()) {
    const LanguageMap preds = load_language_map(o.language_predictions);
    std::vector<std::string> pred_names;
    for (const auto& p : probes) {
      const auto it = preds.find(p);
      if (it == preds.end()) throw DataError("no language prediction for probe '" + p + "'");
      pred_names.emplace_back(language_name(it->second));
    }
    const double lang = accuracy(pred_names, truth_lang_names);
    report.accuracies.emplace_back("language", lang);
    (protocol == Protocol::kSubjectDependent ? row.vli_subject_dependent : row.vli_subject_independent) =
        lang;
    report.confusions.emplace_back("language", confusion(pred_names, truth_lang_names, language_labels()));
  }
  report.summary.push_back(row);
  report.attributions.emplace_back("fusion",
                                   attribute_errors(decisions, scores, truth_ids, truth_langs, o.k));

  for (const auto& p : emit_report(report, ctx.out_dir)) ctx.output(p.filename().string());
  ctx.info("identification " + format_percent(ident) + ", fused " + format_percent(fused));
  return 0;
}

int cmd_preprocess(const PreprocessOptions& o, Context& ctx) {
  if (o.ops.empty()) throw InvalidArgument("--ops must name at least one operation");
  std::vector<FrameOp> ops;
  for (const auto& name : o.ops) ops.push_back(parse_frame_op(name));
  const CannyParams canny_params{o.canny_low, o.canny_high, o.canny_sigma};
  if (std::find(ops.begin(), ops.end(), FrameOp::kCanny) != ops.end()) {
    if (!(canny_params.low >= 0.0 && canny_params.low < canny_params.high && canny_params.high <= 1.0)) {
      throw InvalidArgument("canny thresholds must satisfy 0 <= low < high <= 1");
    }
    if (!(canny_params.sigma > 0.0)) throw InvalidArgument("--canny-sigma must be positive");
  }
  if (ctx.out_dir.empty()) throw InvalidArgument("no output directory: pass --out or set LIPFUSE_OUTPUT_DIR");

  std::error_code ec;
  if (!fs::is_directory(o.input, ec)) throw DataError("'" + o.input + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(o.input)) {
    const auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".pgm" || ext == ".ppm")) files.push_back(entry.path());
  }
  if (files.empty()) throw DataError("no .pgm or .ppm frames in '" + o.input + "'");
  std::sort(files.begin(), files.end());
  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (const auto& f : files) frames.push_back(read_pnm(f));

  for (FrameOp op : ops) {
    const auto result = apply_frame_op(frames, op, canny_params, ctx.jobs);
    write_tensor(frames_to_tensor(result), ctx.output(std::string(frame_op_name(op)) + ".lbtf"));
  }
  ctx.info("processed " + std::to_string(frames.size()) + " frames");
  return 0;
}

int cmd_simulate(const SimulateOptions& o, Context& ctx) {
  SimulationConfig cfg;
  cfg.n_subjects = o.subjects;
  cfg.n_languages = o.languages;
  cfg.n_probes = o.probes;
  cfg.top1_acc = o.top1;
  cfg.topk_hit = o.topk_hit;
  cfg.k = o.k;
  cfg.lang_acc = o.lang_acc;
  cfg.seed = o.seed;
  validate(cfg);
  if (ctx.out_dir.empty()) throw InvalidArgument("no output directory: pass --out or set LIPFUSE_OUTPUT_DIR");

  const SimulationResult sim = simulate_scores(cfg);
  save_score_matrix_csv(sim.identity_scores, ctx.output("identity_scores.csv"));
  save_language_map(sim.language_predictions, "probe_id", ctx.output("language_predictions.csv"));
  save_language_map(sim.subject_language, "subject_id", ctx.output("subject_languages.csv"));
  write_file(ctx.output("truth.csv"), truth_to_csv(sim));
  ctx.info("simulated " + std::to_string(o.probes) + " probes over " + std::to_string(o.subjects) +
           " subjects");
  return 0;
}

}  // namespace lipfuse::cli
