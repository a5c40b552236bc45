// hotel_sim: run, validate and list the well and OAM experiments.
//
// Exit codes: 0 success, 2 invalid usage or config, 3 numerical or runtime
// failure. Failures print one JSON object on stderr.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hotel/error.hpp"
#include "hotel/io/config.hpp"
#include "hotel/io/hash.hpp"
#include "hotel/io/run.hpp"

namespace {

using nlohmann::json;
namespace io = hotel::io;

constexpr int kUsage = 2;
constexpr int kFailure = 3;

int fail(int code, const std::string& kind, const std::string& message, json extra = json::object()) {
  json err = {{"error", {{"kind", kind}, {"message", message}}}, {"exit_code", code}};
  err["error"].update(extra);
  std::cerr << err.dump() << '\n';
  return code;
}

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string source_sha;
};

json load(Common& c) {
  json doc = json::object();
  if (!c.config.empty()) {
    std::ifstream is(c.config);
    if (!is) throw hotel::ConfigError("cannot read config " + c.config);
    const std::string text{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
    c.source_sha = io::sha256_hex(text);
    doc = io::unwrap_manifest(io::parse_config_text(text));
  }
  for (const auto& s : c.sets) io::apply_override(doc, s);
  return doc;
}

unsigned thread_budget(unsigned requested) {
  unsigned n = std::max(1u, requested);
  if (const char* env = std::getenv("HOTEL_SIM_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
      throw hotel::ConfigError(std::string("HOTEL_SIM_THREADS is not a number: ") + env);
    }
  }
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hilbert Hotel laboratory: level multiplication in a square well and OAM multiplication"};
  app.require_subcommand(1);

  Common run_opts;
  std::string out_dir;
  long long seed = -1;
  unsigned parallel = 1;
  auto* run = app.add_subcommand("run", "run an experiment and write its artifacts");
  run->add_option("--config", run_opts.config, "YAML or JSON config, or a manifest to rerun");
  run->add_option("--out", out_dir, "output directory (overrides 'out')");
  run->add_option("--seed", seed, "seed for random input states (overrides 'seed')")->check(CLI::NonNegativeNumber);
  run->add_option("--set", run_opts.sets, "override key=value; repeatable");
  run->add_option("--parallel", parallel, "worker threads for sweeps and matrices")->check(CLI::PositiveNumber);

  Common val_opts;
  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("--config", val_opts.config, "YAML or JSON config");
  validate->add_option("--set", val_opts.sets, "override key=value; repeatable");

  bool list_json = false;
  auto* list = app.add_subcommand("list-experiments", "print the experiment ids");
  list->add_flag("--json", list_json, "print as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "usage", e.what());
  }

  if (list->parsed()) {
    json j = json::array();
    for (const auto& e : io::experiments()) {
      if (list_json) {
        j.push_back({{"id", e.id}, {"description", e.description}, {"defaults", io::parameter_defaults(e.id)}});
      } else {
        std::cout << e.id << "  " << e.description << '\n';
      }
    }
    if (list_json) std::cout << j.dump(2) << '\n';
    return 0;
  }

  if (validate->parsed()) {
    try {
      const json doc = load(val_opts);
      json report = {{"valid", true}, {"violations", json::array()}};
      for (const auto& v : io::check_config(doc)) {
        report["valid"] = false;
        report["violations"].push_back({{"key", v.key}, {"message", v.message}});
      }
      std::cout << report.dump(2) << '\n';
      return 0;
    } catch (const hotel::ConfigError& e) {
      return fail(kUsage, "config", e.what());
    }
  }

  json doc;
  io::RunConfig cfg;
  io::RunOptions opts;
  try {
    doc = load(run_opts);
    if (seed >= 0) doc["seed"] = seed;
    if (!out_dir.empty()) doc["out"] = out_dir;
    cfg = io::resolve_config(doc);
    opts.out = cfg.out;
    opts.threads = thread_budget(parallel);
    opts.config_source = run_opts.config;
    opts.config_sha256 = run_opts.source_sha;
    if (opts.out.empty()) throw hotel::ConfigError("no output directory: pass --out or set 'out'");
  } catch (const hotel::ConfigError& e) {
    return fail(kUsage, "config", e.what());
  }

  try {
    const auto outcome = io::execute_run(cfg, opts);
    for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << outcome.metrics.dump(2) << '\n';
    return 0;
  } catch (const hotel::ConfigError& e) {
    return fail(kUsage, "config", e.what());
  } catch (const hotel::InstabilityError& e) {
    return fail(kFailure, "numerical", e.what(), {{"type", "InstabilityError"}, {"norm_drift", e.drift()}});
  } catch (const hotel::NodeError& e) {
    return fail(kFailure, "numerical", e.what(),
                {{"type", "NodeError"}, {"position", e.position()}, {"relative_magnitude", e.relative_magnitude()}});
  } catch (const hotel::Error& e) {
    return fail(kFailure, "numerical", e.what());
  } catch (const std::exception& e) {
    return fail(kFailure, "runtime", e.what());
  }
}
