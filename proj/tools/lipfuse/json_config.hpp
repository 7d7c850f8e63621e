#pragma once

#include <istream>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace lipfuse::cli {

/// CLI11 config reader for JSON files. Top-level keys set main options;
/// an object under a subcommand's name sets that subcommand's options,
/// e.g. {"jobs": 2, "partition": {"seed": 7}}. Arrays become multi-value
/// inputs. Command-line flags take precedence over file values.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

}  // namespace lipfuse::cli
