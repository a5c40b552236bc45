#include "hotel/io/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "hotel/error.hpp"
#include "hotel/io/input.hpp"
#include "hotel/optics/fanout.hpp"

namespace hotel::io {

namespace {

using nlohmann::json;

json scalar(const YAML::Node& n) {
  const std::string& text = n.Scalar();
  if (n.Tag() == "!") return text;  // quoted
  if (text == "~" || text == "null" || text.empty()) return nullptr;
  if (text == "true" || text == "True") return true;
  if (text == "false" || text == "False") return false;
  try {
    std::size_t used = 0;
    const long long i = std::stoll(text, &used);
    if (used == text.size()) return i;
  } catch (const std::exception&) {
  }
  try {
    std::size_t used = 0;
    const double d = std::stod(text, &used);
    if (used == text.size()) return d;
  } catch (const std::exception&) {
  }
  return text;
}

json to_json_node(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Scalar:
      return scalar(n);
    case YAML::NodeType::Sequence: {
      json a = json::array();
      for (const auto& e : n) a.push_back(to_json_node(e));
      return a;
    }
    case YAML::NodeType::Map: {
      json o = json::object();
      for (const auto& kv : n) o[kv.first.as<std::string>()] = to_json_node(kv.second);
      return o;
    }
    default:
      return nullptr;
  }
}

json well_common() {
  return {{"p", 2}, {"N", 64}, {"L", 1.0}, {"input", "h1"}, {"support", 8}, {"capacity", 4096}};
}

json dynamic_common() {
  json j = well_common();
  j["N"] = 16;
  j.update({{"M", 2047},
            {"dt_per_tau", 40000.0},
            {"barrier_ramp_time_tau", 0.0},
            {"barrier_height", 0.0},
            {"barrier_half_width_dx", 0.0},
            {"wall_height", 0.0},
            {"wall_edge_dx", 0.0},
            {"scheme", "strang-split-sine"}});
  return j;
}

json optics_common() {
  return {{"n", 1024},
          {"pitch", 8e-6},
          {"wavelength", 632.8e-9},
          {"p", 3},
          {"ring_radius_fraction", 0.3},
          {"ring_width_fraction", 0.2},
          {"mu", optics::kBalancedMu},
          {"phase_correction", true},
          {"method", "azimuthal"}};
}

const std::map<std::string, json>& schemas() {
  static const std::map<std::string, json> s = [] {
    std::map<std::string, json> m;
    m["well-ideal"] = well_common();
    m["well-ideal"].update({{"work_modes", 0}, {"correct_global_phase", true}});
    m["well-dynamic"] = dynamic_common();
    m["well-dynamic"]["compression_time_tau"] = 40.0;
    m["well-sweep"] = dynamic_common();
    m["well-sweep"]["compression_times_tau"] = json::array({10.0, 40.0, 160.0});
    m["oam-multiply"] = optics_common();
    m["oam-multiply"].update({{"modes", json::array({1})}, {"l_max", 15}, {"write_rasters", true}});
    m["oam-crosstalk"] = optics_common();
    m["oam-crosstalk"].update({{"l_in_max", 3}, {"l_out_max", 15}});
    m["oam-petals"] = optics_common();
    m["oam-petals"]["l"] = json::array({1, 2, 3});
    m["carpet"] = {{"L", 1.0},         {"N", 16},         {"input", "(h1+h2)/sqrt2"},
                   {"support", 8},     {"M", 511},        {"dt_per_tau", 4000.0},
                   {"t_end_tau", 1.0}, {"time_samples", 201}, {"x_samples", 256}};
    return m;
  }();
  return s;
}

bool same_kind(const json& def, const json& v) {
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_number_integer()) return v.is_number_integer();
  if (def.is_number()) return v.is_number();
  if (def.is_string()) return v.is_string();
  if (def.is_array()) {
    if (!v.is_array() || v.empty()) return false;
    for (const auto& e : v) {
      if (!same_kind(def.front(), e)) return false;
    }
    return true;
  }
  return false;
}

std::string kind_name(const json& def) {
  if (def.is_boolean()) return "a boolean";
  if (def.is_number_integer()) return "an integer";
  if (def.is_number()) return "a number";
  if (def.is_string()) return "a string";
  return "a non-empty list like " + def.dump();
}

struct Checker {
  const json& p;
  std::vector<Violation>& out;

  void add(const std::string& key, const std::string& msg) { out.push_back({"params." + key, msg}); }

  double num(const char* key) const { return p.at(key).get<double>(); }
  long long integer(const char* key) const { return p.at(key).get<long long>(); }

  void positive(std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
      if (!(num(k) > 0.0)) add(k, "must be positive");
    }
  }
  void at_least(const char* key, long long lo) {
    if (integer(key) < lo) add(key, "must be >= " + std::to_string(lo));
  }
};

void check_well(Checker& c, bool dynamic) {
  const auto& p = c.p;
  c.positive({"L"});
  c.at_least("p", 2);
  c.at_least("N", 1);
  c.at_least("support", 1);
  if (p.at("N").get<long long>() >= 1 && p.at("support").get<long long>() > p.at("N").get<long long>()) {
    c.add("support", "must not exceed N");
  }
  const long long np = p.at("N").get<long long>() * p.at("p").get<long long>();
  if (np > p.at("capacity").get<long long>()) {
    c.add("capacity", "N * p = " + std::to_string(np) + " exceeds the capacity " +
                          std::to_string(p.at("capacity").get<long long>()));
  }
  try {
    const auto top = input_max_level(p.at("input").get<std::string>(),
                                     static_cast<std::size_t>(std::max(1LL, p.at("support").get<long long>())));
    if (static_cast<long long>(top) > p.at("N").get<long long>()) c.add("input", "uses a level above N");
  } catch (const ConfigError& e) {
    c.add("input", e.what());
  }
  if (!dynamic) return;
  c.positive({"dt_per_tau"});
  for (const char* k : {"barrier_ramp_time_tau", "barrier_height", "barrier_half_width_dx", "wall_height",
                        "wall_edge_dx"}) {
    if (c.num(k) < 0.0) c.add(k, "must be >= 0 (0 picks the default)");
  }
  c.at_least("M", 16);
  if (p.at("M").get<long long>() < np) {
    c.add("M", "grid of " + std::to_string(p.at("M").get<long long>()) +
                   " points cannot hold the " + std::to_string(np) + " output modes");
  }
  const auto scheme = p.at("scheme").get<std::string>();
  if (scheme != "strang-split-sine" && scheme != "crank-nicolson") {
    c.add("scheme", "must be strang-split-sine or crank-nicolson");
  }
}

void check_optics(Checker& c, int l_needed) {
  const auto& p = c.p;
  c.positive({"pitch", "wavelength", "ring_radius_fraction", "ring_width_fraction", "mu"});
  const long long n = p.at("n").get<long long>();
  if (n < 64 || n % 2 != 0) c.add("n", "must be even and >= 64");
  const long long pp = p.at("p").get<long long>();
  if (pp < 1 || pp % 2 == 0) c.add("p", "must be odd and >= 1");
  const auto method = p.at("method").get<std::string>();
  if (method != "azimuthal" && method != "projective") c.add("method", "must be azimuthal or projective");
  const double rf = c.num("ring_radius_fraction");
  const double wf = c.num("ring_width_fraction");
  if (rf > 0.0 && wf > 0.0 && rf * (1.0 + 3.0 * wf) > 0.5) {
    c.add("ring_radius_fraction", "ring plus three widths does not fit in the grid");
  }
  if (rf > 0.0 && n > 0 && l_needed > 0) {
    const double px_per_cycle = 2.0 * std::numbers::pi * rf * static_cast<double>(n) / l_needed;
    if (px_per_cycle < 8.0) {
      std::ostringstream msg;
      msg << "l = " << l_needed << " gets " << px_per_cycle << " px per cycle at the ring; need >= 8";
      c.add("n", msg.str());
    }
  }
}

long long max_abs(const json& a) {
  long long m = 0;
  for (const auto& e : a) m = std::max(m, std::llabs(e.get<long long>()));
  return m;
}

void check_physics(const std::string& exp, const json& p, std::vector<Violation>& out) {
  Checker c{p, out};
  if (exp == "well-ideal") {
    check_well(c, false);
  } else if (exp == "well-dynamic") {
    check_well(c, true);
    c.positive({"compression_time_tau"});
  } else if (exp == "well-sweep") {
    check_well(c, true);
    for (const auto& t : p.at("compression_times_tau")) {
      if (!(t.get<double>() > 0.0)) c.add("compression_times_tau", "times must be positive");
    }
  } else if (exp == "carpet") {
    c.positive({"L", "dt_per_tau", "t_end_tau"});
    c.at_least("N", 1);
    c.at_least("M", 16);
    c.at_least("time_samples", 2);
    c.at_least("x_samples", 2);
    if (p.at("M").get<long long>() < p.at("N").get<long long>()) c.add("M", "must be >= N");
    try {
      const auto top = input_max_level(p.at("input").get<std::string>(),
                                       static_cast<std::size_t>(std::max(1LL, p.at("support").get<long long>())));
      if (static_cast<long long>(top) > p.at("N").get<long long>()) c.add("input", "uses a level above N");
    } catch (const ConfigError& e) {
      c.add("input", e.what());
    }
  } else {
    const long long pp = p.at("p").get<long long>();
    long long l = 0;
    if (exp == "oam-multiply") {
      l = std::max(max_abs(p.at("modes")) * pp, p.at("l_max").get<long long>());
      c.at_least("l_max", 0);
    } else if (exp == "oam-crosstalk") {
      c.at_least("l_in_max", 0);
      l = p.at("l_out_max").get<long long>();
      if (l < pp * p.at("l_in_max").get<long long>()) c.add("l_out_max", "must cover p * l_in_max");
    } else {
      for (const auto& e : p.at("l")) {
        if (e.get<long long>() < 1) c.add("l", "petal orders must be positive");
      }
      l = max_abs(p.at("l")) * pp;
    }
    check_optics(c, static_cast<int>(l));
  }
}

}  // namespace

json RunConfig::to_json() const {
  return {{"experiment", experiment}, {"seed", seed}, {"out", out}, {"params", params}};
}

json parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config does not parse: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping");
  return to_json_node(root);
}

json load_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  const std::string text{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
  return parse_config_text(text);
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  json parsed;
  try {
    parsed = to_json_node(YAML::Load(value));
  } catch (const YAML::Exception&) {
    parsed = value;
  }
  static const std::vector<std::string> top = {"experiment", "seed", "out", "params"};
  const std::string head = key.substr(0, key.find('.'));
  if (std::find(top.begin(), top.end(), head) == top.end()) key = "params." + key;
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw ConfigError("bad key in --set '" + assignment + "'");
    if (dot == std::string::npos) {
      (*node)[part] = parsed;
      break;
    }
    json& next = (*node)[part];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) throw ConfigError("--set '" + assignment + "' descends into a non-mapping");
    node = &next;
    start = dot + 1;
  }
}

json unwrap_manifest(const json& doc) {
  if (doc.contains("config") && doc.contains("tool")) return doc.at("config");
  return doc;
}

const std::vector<ExperimentInfo>& experiments() {
  static const std::vector<ExperimentInfo> list = {
      {"well-ideal", "eigenbasis pipeline against the level-multiplication oracle"},
      {"well-dynamic", "grid dynamics with finite barriers, offsets and a moving wall"},
      {"well-sweep", "well-dynamic over a list of compression times, in parallel"},
      {"oam-multiply", "OAM multiplier on a superposition of ring modes"},
      {"oam-crosstalk", "multiplier crosstalk matrix over input eigenmodes"},
      {"oam-petals", "petal count and visibility of mapped +-l superpositions"},
      {"carpet", "space-time density of a state in a well"},
  };
  return list;
}

const json& parameter_defaults(const std::string& experiment) {
  const auto it = schemas().find(experiment);
  if (it == schemas().end()) throw ConfigError("unknown experiment '" + experiment + "'");
  return it->second;
}

std::vector<Violation> check_config(const json& raw) {
  std::vector<Violation> out;
  const json doc = unwrap_manifest(raw);
  if (!doc.is_object()) return {{"", "config must be a mapping"}};
  for (const auto& [k, v] : doc.items()) {
    if (k != "experiment" && k != "seed" && k != "out" && k != "params") out.push_back({k, "unknown key"});
  }
  if (!doc.contains("experiment") || !doc.at("experiment").is_string()) {
    out.push_back({"experiment", "required string"});
    return out;
  }
  const std::string exp = doc.at("experiment").get<std::string>();
  if (!schemas().contains(exp)) {
    out.push_back({"experiment", "unknown experiment '" + exp + "'"});
    return out;
  }
  if (doc.contains("seed") && !(doc.at("seed").is_number_unsigned() ||
                                (doc.at("seed").is_number_integer() && doc.at("seed").get<long long>() >= 0))) {
    out.push_back({"seed", "must be a non-negative integer"});
  }
  if (doc.contains("out") && !doc.at("out").is_string()) out.push_back({"out", "must be a string"});
  const json& defaults = parameter_defaults(exp);
  json merged = defaults;
  if (doc.contains("params")) {
    if (!doc.at("params").is_object()) {
      out.push_back({"params", "must be a mapping"});
      return out;
    }
    for (const auto& [k, v] : doc.at("params").items()) {
      if (!defaults.contains(k)) {
        out.push_back({"params." + k, "unknown key for " + exp});
      } else if (!same_kind(defaults.at(k), v)) {
        out.push_back({"params." + k, "must be " + kind_name(defaults.at(k))});
      } else {
        merged[k] = v;
      }
    }
  }
  if (out.empty()) check_physics(exp, merged, out);
  return out;
}

RunConfig resolve_config(const json& raw) {
  const auto violations = check_config(raw);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "invalid config:";
    for (const auto& v : violations) msg << "\n  " << v.key << ": " << v.message;
    throw ConfigError(msg.str());
  }
  const json doc = unwrap_manifest(raw);
  RunConfig c;
  c.experiment = doc.at("experiment").get<std::string>();
  c.seed = doc.value("seed", std::uint64_t{0});
  c.out = doc.value("out", std::string{});
  c.params = parameter_defaults(c.experiment);
  if (doc.contains("params")) c.params.update(doc.at("params"));
  return c;
}

}  // namespace hotel::io
