#include "json_config.hpp"

#include "json.hpp"

namespace lipfuse::cli {

using nlohmann::json;

namespace {

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

void flatten(const json& obj, std::vector<std::string> parents,
             std::vector<CLI::ConfigItem>& items) {
  for (const auto& [key, value] : obj.items()) {
    if (value.is_object()) {
      auto next = parents;
      next.push_back(key);
      flatten(value, next, items);
      continue;
    }
    CLI::ConfigItem item;
    item.parents = parents;
    item.name = key;
    if (value.is_array()) {
      for (const auto& v : value) item.inputs.push_back(scalar_text(v));
    } else if (!value.is_null()) {
      item.inputs.push_back(scalar_text(value));
    }
    items.push_back(std::move(item));
  }
}

void dump_app(const CLI::App* app, bool default_also, json& out) {
  for (const CLI::Option* opt : app->get_options()) {
    if (!opt->get_configurable() || opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    const auto& results = opt->results();
    if (!results.empty()) {
      if (results.size() == 1) {
        out[name] = results.front();
      } else {
        out[name] = results;
      }
    } else if (default_also && !opt->get_default_str().empty()) {
      out[name] = opt->get_default_str();
    }
  }
  for (const CLI::App* sub : app->get_subcommands({})) {
    if (sub->get_name().empty() || sub->count_all() == 0) continue;
    json child = json::object();
    dump_app(sub, default_also, child);
    out[sub->get_name()] = std::move(child);
  }
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool /*write_description*/,
                                  std::string /*prefix*/) const {
  json out = json::object();
  dump_app(app, default_also, out);
  return out.dump(2);
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
  json doc;
  try {
    input >> doc;
  } catch (const json::exception& e) {
    throw CLI::ConversionError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
  std::vector<CLI::ConfigItem> items;
  flatten(doc, {}, items);
  return items;
}

}  // namespace lipfuse::cli
