#pragma once

// Run configuration: a YAML (or JSON) document
//
//   experiment: well-ideal
//   seed: 7
//   out: runs/ideal
//   params:
//     p: 2
//     input: "(h1+h2)/sqrt2"
//
// Every experiment has a parameter schema with defaults; unknown keys and
// wrongly typed values are rejected.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hotel::io {

struct RunConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string out;
  nlohmann::json params = nlohmann::json::object();

  nlohmann::json to_json() const;
};

/// Parse YAML or JSON text into a JSON document. Plain scalars become
/// numbers or booleans when they read as such; quoted scalars stay strings.
nlohmann::json parse_config_text(const std::string& text);
nlohmann::json load_config_file(const std::filesystem::path& path);

/// Apply "a.b.c=value"; the value is parsed as a YAML scalar or flow
/// collection. A key that is not a top-level field goes under params.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// A run manifest is accepted in place of a config: its "config" block is used.
nlohmann::json unwrap_manifest(const nlohmann::json& doc);

/// Experiment ids with one-line descriptions, in display order.
struct ExperimentInfo {
  std::string id;
  std::string description;
};
const std::vector<ExperimentInfo>& experiments();

/// Parameter defaults for an experiment; ConfigError for an unknown id.
const nlohmann::json& parameter_defaults(const std::string& experiment);

struct Violation {
  std::string key;
  std::string message;
};

/// Schema and physics checks without running anything.
std::vector<Violation> check_config(const nlohmann::json& doc);

/// Defaults filled in; ConfigError listing the violations if any.
RunConfig resolve_config(const nlohmann::json& doc);

}  // namespace hotel::io
