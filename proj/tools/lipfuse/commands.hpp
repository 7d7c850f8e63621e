#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace lipfuse::cli {

/// State shared by every subcommand.
struct Context {
  std::filesystem::path out_dir;  // empty when no output directory applies
  unsigned jobs = 0;              // 0 = available cores
  std::ostream* log = nullptr;
  std::vector<std::string> outputs;  // file names written into out_dir

  void info(const std::string& msg) const;
  /// out_dir / name, remembered for the run metadata.
  std::filesystem::path output(const std::string& name);
};

struct ValidateOptions {
  std::string manifest;
  bool strict = false;
};

struct PartitionOptions {
  std::string manifest;
  std::string protocol;
  std::uint64_t seed = 0;
};

struct FeaturesOptions {
  std::string manifest;
  std::string split;
  std::string subset = "all";
  int pivot = 0;
  std::string metrics = "euclidean";
  int frames = 250;
};

struct TrainOptions {
  std::string manifest;
  std::string split;
  std::string target = "identity";
  std::string grid;
  std::string grid_preset = "default";
  int k_min = 2;
  int k_max = 10;
  std::uint64_t seed = 0;
  std::string fold_mode = "stratified";
  double tolerance = 1e-3;
  int max_passes = 200;
  bool no_standardize = false;
};

struct PredictOptions {
  std::string model;
  std::string manifest;
  std::string split;
  std::string subset = "test";
};

struct FuseOptions {
  std::string identity_scores;
  std::string language_predictions;
  std::string manifest;
  std::string subject_languages;
  int k = 8;
};

struct EvaluateOptions {
  std::string decisions;
  std::string identity_scores;
  std::string language_predictions;
  std::string manifest;
  std::string truth;
  int k = 8;
  std::string model_name = "model";
  std::string protocol = "subject_dependent";
};

struct PreprocessOptions {
  std::string input;
  std::vector<std::string> ops{"grayscale", "sobel"};
  double canny_low = 0.1;
  double canny_high = 0.3;
  double canny_sigma = 1.4;
};

struct SimulateOptions {
  int subjects = 256;
  int languages = 8;
  int probes = 10000;
  double top1 = 0.496;
  double topk_hit = 0.80;
  int k = 8;
  double lang_acc = 0.86;
  std::uint64_t seed = 0;
};

// Each returns a process exit status; errors are reported by exception.
int cmd_validate(const ValidateOptions& o, Context& ctx);
int cmd_partition(const PartitionOptions& o, Context& ctx);
int cmd_features(const FeaturesOptions& o, Context& ctx);
int cmd_train(const TrainOptions& o, Context& ctx);
int cmd_predict(const PredictOptions& o, Context& ctx);
int cmd_fuse(const FuseOptions& o, Context& ctx);
int cmd_evaluate(const EvaluateOptions& o, Context& ctx);
int cmd_preprocess(const PreprocessOptions& o, Context& ctx);
int cmd_simulate(const SimulateOptions& o, Context& ctx);

}  // namespace lipfuse::cli
