#pragma once

// Executes one configured experiment into a run directory:
//   manifest.json  resolved config, tool version, timestamps, hashes, metrics
//   metrics.json   summary numbers only, byte-identical across reruns
//   series/*.csv   plot-ready columns
//   rasters/*.bin  binary rasters (see raster.hpp)

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hotel/io/config.hpp"

namespace hotel::io {

inline constexpr const char* kToolName = "hotel_sim";
inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
  std::filesystem::path out;
  unsigned threads = 1;
  /// Hash of the config text as given, recorded in the manifest.
  std::string config_sha256;
  std::string config_source;
};

struct RunOutcome {
  nlohmann::json metrics;
  nlohmann::json manifest;
  std::vector<std::string> warnings;
};

/// Runs the experiment, writes every artifact and returns the manifest.
/// Numerical failures surface as hotel::Error subclasses.
RunOutcome execute_run(const RunConfig& cfg, const RunOptions& opts);

/// The experiment body alone: writes series and rasters under `dir` and
/// returns metrics (deterministic) plus warnings.
RunOutcome run_experiment(const RunConfig& cfg, const std::filesystem::path& dir, unsigned threads);

}  // namespace hotel::io
