#include "cli.hpp"

#include <Eigen/Core>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>

#include "CLI11.hpp"
#include "commands.hpp"
#include "json.hpp"
#include "json_config.hpp"
#include "lipfuse/error.hpp"

#ifndef LIPFUSE_VERSION
#define LIPFUSE_VERSION "0.0.0"
#endif

namespace lipfuse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
  return out;
}

// Effective parameter values of a subcommand, flags and config merged.
json parameters_of(const CLI::App& sub) {
  json params = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
    const std::string& name = opt->get_lnames().front();
    if (opt->count() > 0) {
      const auto& r = opt->results();
      params[name] = r.size() == 1 && opt->get_expected_max() <= 1 ? json(r.front()) : json(r);
    } else {
      params[name] = opt->get_default_str();
    }
  }
  return params;
}

json versions() {
  json v;
  v["lipfuse"] = LIPFUSE_VERSION;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  v["cli11"] = CLI11_VERSION;
  return v;
}

void write_run_metadata(const CLI::App& sub, const Context& ctx, unsigned jobs_flag) {
  const json params = parameters_of(sub);
  json meta;
  meta["tool"] = "lipfuse";
  meta["subcommand"] = sub.get_name();
  if (params.contains("seed")) {
    meta["seed"] = std::stoull(params["seed"].get<std::string>());
  } else {
    meta["seed"] = nullptr;
  }
  meta["config_hash"] = "fnv1a64:" + hex64(fnv1a64(params.dump()));
  meta["parameters"] = params;
  meta["jobs"] = jobs_flag;
  meta["outputs"] = ctx.outputs;
  meta["versions"] = versions();
  const fs::path path = ctx.out_dir / ("run_" + sub.get_name() + ".json");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << meta.dump(2) << '\n';
  if (!out.flush()) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lip-based speaker identification with language-gated score fusion", "lipfuse"};
  app.option_defaults()->always_capture_default();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file of parameter values; command-line flags win");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", LIPFUSE_VERSION);

  std::string out_dir;
  unsigned jobs = 0;
  app.add_option("--out,-o", out_dir,
                 std::string("Output directory (default: $") + kOutputDirEnv + ")");
  app.add_option("--jobs,-j", jobs, "Worker threads for features, grid search and preprocessing; 0 = all cores");

  std::function<int(Context&)> action;

  ValidateOptions vo;
  auto* validate = app.add_subcommand("validate", "Check a dataset manifest");
  validate->add_option("--manifest", vo.manifest, "Manifest JSON")->required();
  validate->add_flag("--strict", vo.strict, "Require five clips per subject");
  validate->callback([&] { action = [&](Context& c) { return cmd_validate(vo, c); }; });

  PartitionOptions po;
  auto* part = app.add_subcommand("partition", "Split a strict manifest into train/validation/test");
  part->add_option("--manifest", po.manifest, "Manifest JSON")->required();
  part->add_option("--protocol", po.protocol, "subject_dependent | subject_independent")->required();
  part->add_option("--seed", po.seed, "Generator seed");
  part->callback([&] { action = [&](Context& c) { return cmd_partition(po, c); }; });

  FeaturesOptions fo;
  auto* feat = app.add_subcommand("features", "Extract pivot-distance features from landmark files");
  feat->add_option("--manifest", fo.manifest, "Manifest JSON")->required();
  feat->add_option("--split", fo.split, "Split JSON selecting clips");
  feat->add_option("--subset", fo.subset, "all | train | validation | test | trainval");
  feat->add_option("--pivot", fo.pivot, "Pivot landmark index 0..7");
  feat->add_option("--metrics", fo.metrics, "Comma list of euclidean, manhattan, cosine, or 'all'");
  feat->add_option("--frames", fo.frames, "Resampled frame count T");
  feat->callback([&] { action = [&](Context& c) { return cmd_features(fo, c); }; });

  TrainOptions to;
  auto* train = app.add_subcommand("train", "Grid search and final one-vs-rest SVM fit");
  train->add_option("--manifest", to.manifest, "Manifest JSON")->required();
  train->add_option("--split", to.split, "Split JSON; trains on train + validation")->required();
  train->add_option("--target", to.target, "identity | language");
  train->add_option("--grid", to.grid, "Grid JSON (overrides --grid-preset)");
  train->add_option("--grid-preset", to.grid_preset, "default | tiny");
  train->add_option("--k-min", to.k_min, "Smallest fold count");
  train->add_option("--k-max", to.k_max, "Largest fold count");
  train->add_option("--seed", to.seed, "Fold seed");
  train->add_option("--fold-mode", to.fold_mode, "stratified | plain");
  train->add_option("--tolerance", to.tolerance, "SMO stopping tolerance");
  train->add_option("--max-passes", to.max_passes, "SMO sweep budget");
  train->add_flag("--no-standardize", to.no_standardize, "Skip per-feature standardization");
  train->callback([&] { action = [&](Context& c) { return cmd_train(to, c); }; });

  PredictOptions pro;
  auto* pred = app.add_subcommand("predict", "Score clips with a trained model");
  pred->add_option("--model", pro.model, "Model JSON")->required();
  pred->add_option("--manifest", pro.manifest, "Manifest JSON")->required();
  pred->add_option("--split", pro.split, "Split JSON selecting clips");
  pred->add_option("--subset", pro.subset, "Split part to score");
  pred->callback([&] { action = [&](Context& c) { return cmd_predict(pro, c); }; });

  FuseOptions fuo;
  auto* fuse = app.add_subcommand("fuse", "Gate identity rank lists by predicted language");
  fuse->add_option("--identity-scores", fuo.identity_scores, "Score matrix CSV or LBTF")->required();
  fuse->add_option("--language-predictions", fuo.language_predictions, "probe,language CSV")
      ->required();
  fuse->add_option("--manifest", fuo.manifest, "Manifest giving enrolled languages");
  fuse->add_option("--subject-languages", fuo.subject_languages, "subject,language CSV");
  fuse->add_option("--k", fuo.k, "Rank depth scanned for a language match");
  fuse->callback([&] { action = [&](Context& c) { return cmd_fuse(fuo, c); }; });

  EvaluateOptions eo;
  auto* eval = app.add_subcommand("evaluate", "Accuracy, confusion and error-attribution reports");
  eval->add_option("--decisions", eo.decisions, "Fusion decisions JSON")->required();
  eval->add_option("--identity-scores", eo.identity_scores, "Score matrix CSV or LBTF")->required();
  eval->add_option("--language-predictions", eo.language_predictions, "probe,language CSV");
  eval->add_option("--manifest", eo.manifest, "Manifest giving ground truth");
  eval->add_option("--truth", eo.truth, "probe_id,identity,language CSV");
  eval->add_option("--k", eo.k, "Rank depth used by the fusion");
  eval->add_option("--model-name", eo.model_name, "Row label in the summary table");
  eval->add_option("--protocol", eo.protocol, "Protocol the language accuracy belongs to");
  eval->callback([&] { action = [&](Context& c) { return cmd_evaluate(eo, c); }; });

  PreprocessOptions ppo;
  auto* pre = app.add_subcommand("preprocess", "Grayscale and edge maps of a frame directory");
  pre->add_option("--input", ppo.input, "Directory of .pgm/.ppm frames, read in name order")->required();
  pre->add_option("--ops", ppo.ops, "grayscale, sobel, laplacian, canny")->delimiter(',');
  pre->add_option("--canny-low", ppo.canny_low, "Low threshold, fraction of max gradient");
  pre->add_option("--canny-high", ppo.canny_high, "High threshold, fraction of max gradient");
  pre->add_option("--canny-sigma", ppo.canny_sigma, "Gaussian pre-blur sigma");
  pre->callback([&] { action = [&](Context& c) { return cmd_preprocess(ppo, c); }; });

  SimulateOptions so;
  auto* sim = app.add_subcommand("simulate", "Synthetic identity scores and language predictions");
  sim->add_option("--subjects", so.subjects, "Gallery size");
  sim->add_option("--languages", so.languages, "Language count, 1..8");
  sim->add_option("--probes", so.probes, "Probe count");
  sim->add_option("--top1", so.top1, "P(true identity at rank 1)");
  sim->add_option("--topk-hit", so.topk_hit, "P(true identity within the first k)");
  sim->add_option("--k", so.k, "Rank depth");
  sim->add_option("--lang-acc", so.lang_acc, "P(language prediction correct)");
  sim->add_option("--seed", so.seed, "Generator seed");
  sim->callback([&] { action = [&](Context& c) { return cmd_simulate(so, c); }; });

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  Context ctx;
  ctx.log = &err;
  ctx.jobs = jobs;
  if (out_dir.empty()) {
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr) out_dir = env;
  }
  const CLI::App* chosen = app.get_subcommands().front();
  try {
    if (!out_dir.empty()) {
      std::error_code ec;
      fs::create_directories(out_dir, ec);
      if (ec || !fs::is_directory(out_dir)) {
        throw DataError("cannot create output directory '" + out_dir + "'");
      }
      ctx.out_dir = out_dir;
    }
    const int status = action(ctx);
    if (!ctx.out_dir.empty()) write_run_metadata(*chosen, ctx, jobs);
    return status;
  } catch (const InvalidArgument& e) {
    err << "lipfuse " << chosen->get_name() << ": error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    err << "lipfuse " << chosen->get_name() << ": error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "lipfuse " << chosen->get_name() << ": error: " << e.what() << '\n';
    return kData;
  }
}

}  // namespace lipfuse::cli
