#include "hotel/io/run.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "../detail/parallel.hpp"
#include "hotel/dynamics/carpet.hpp"
#include "hotel/dynamics/protocol.hpp"
#include "hotel/error.hpp"
#include "hotel/io/csv.hpp"
#include "hotel/io/hash.hpp"
#include "hotel/io/input.hpp"
#include "hotel/io/raster.hpp"
#include "hotel/multiplier/multiplier.hpp"
#include "hotel/protocol/hotel.hpp"

namespace hotel::io {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using optics::cplx;

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

std::size_t as_size(const json& p, const char* key) { return p.at(key).get<std::size_t>(); }
double as_double(const json& p, const char* key) { return p.at(key).get<double>(); }

well::SpectralState input_state(const RunConfig& c) {
  const auto& p = c.params;
  const well::WellGeometry g{as_double(p, "L"), 0.0};
  return parse_input_state(p.at("input").get<std::string>(), g, as_size(p, "N"), as_size(p, "support"),
                           c.seed);
}

void amplitude_csv(const fs::path& path, const std::vector<std::pair<std::string, const well::SpectralState*>>& cols,
                   std::size_t modes) {
  std::vector<std::string> header{"n"};
  for (const auto& [name, s] : cols) {
    header.push_back(name + "_re");
    header.push_back(name + "_im");
    header.push_back(name + "_power");
  }
  CsvWriter csv(path, header);
  for (std::size_t n = 1; n <= modes; ++n) {
    std::vector<double> row{static_cast<double>(n)};
    for (const auto& [name, s] : cols) {
      const auto a = s->amp(n);
      row.insert(row.end(), {a.real(), a.imag(), std::norm(a)});
    }
    csv.row(row);
  }
}

RunOutcome well_ideal(const RunConfig& c, const fs::path& dir) {
  const auto& p = c.params;
  protocol::ProtocolConfig cfg;
  cfg.p = as_size(p, "p");
  cfg.L = as_double(p, "L");
  cfg.N = as_size(p, "N");
  cfg.work_modes = as_size(p, "work_modes");
  cfg.correct_global_phase = p.at("correct_global_phase").get<bool>();
  const auto s = input_state(c);
  const auto res = protocol::run_ideal_protocol_p(s, cfg);
  const auto oracle = protocol::hotel_multiply_oracle(s, cfg.p);

  RunOutcome out;
  auto& m = out.metrics;
  m["fidelity"] = well::fidelity(res.output, oracle);
  m["vacancy_leakage"] = protocol::vacancy_leakage(res.output, cfg.p);
  m["output_norm"] = res.output.norm_squared();
  m["norm_captured"] = res.trace.norm_captured;
  m["split_time_revivals"] = res.trace.pattern.split_time_revivals;
  m["copy_residual"] = res.trace.pattern.residual;
  Eigen::Index top = 0;
  res.output.amps.cwiseAbs2().maxCoeff(&top);
  m["dominant_level"] = top + 1;
  m["flags"] = res.trace.flags;
  out.warnings = res.trace.flags;

  amplitude_csv(dir / "series" / "amplitudes.csv",
                {{"input", &s}, {"output", &res.output}, {"oracle", &oracle}}, cfg.p * cfg.N);
  write_json(dir / "series" / "trace.json", res.trace.to_json(64, false));
  return out;
}

struct DynamicSetup {
  protocol::ProtocolConfig cfg;
  dynamics::DynamicKnobs knobs;
  double tau = 0.0;
};

DynamicSetup dynamic_setup(const RunConfig& c) {
  const auto& p = c.params;
  DynamicSetup d;
  d.cfg.p = as_size(p, "p");
  d.cfg.L = as_double(p, "L");
  d.cfg.N = as_size(p, "N");
  d.tau = well::revival_time(d.cfg.L, d.cfg.constants);
  auto& k = d.knobs;
  k.M = as_size(p, "M");
  const double dx = d.cfg.L * static_cast<double>(d.cfg.p) / static_cast<double>(k.M + 1);
  k.dt = d.tau / as_double(p, "dt_per_tau");
  k.barrier_ramp_time = as_double(p, "barrier_ramp_time_tau") * d.tau;
  k.barrier_height = as_double(p, "barrier_height");
  k.barrier_half_width = as_double(p, "barrier_half_width_dx") * dx;
  k.wall_height = as_double(p, "wall_height");
  k.wall_edge = as_double(p, "wall_edge_dx") * dx;
  k.scheme = dynamics::scheme_from_string(p.at("scheme").get<std::string>());
  return d;
}

json dynamic_metrics(const dynamics::DynamicResult& r, double tau) {
  json m = r.report;
  m.erase("step_norms");
  json k = r.knobs;
  k["compression_time_tau"] = r.knobs.compression_time / tau;
  m["knobs"] = k;
  return m;
}

void populations_csv(const fs::path& path, const well::SpectralState& out) {
  CsvWriter csv(path, {"n", "re", "im", "power"});
  for (std::size_t n = 1; n <= out.modes(); ++n) {
    const auto a = out.amp(n);
    csv.row({static_cast<double>(n), a.real(), a.imag(), std::norm(a)});
  }
}

RunOutcome well_dynamic(const RunConfig& c, const fs::path& dir) {
  auto d = dynamic_setup(c);
  d.knobs.compression_time = as_double(c.params, "compression_time_tau") * d.tau;
  const auto r = dynamics::run_dynamic_protocol(input_state(c), d.cfg, d.knobs);
  RunOutcome out;
  out.metrics = dynamic_metrics(r, d.tau);
  out.warnings = r.report.warnings;
  populations_csv(dir / "series" / "output.csv", r.output);
  CsvWriter norms(dir / "series" / "step_norms.csv", {"segment", "norm"});
  for (const auto& [label, n] : r.report.step_norms) norms.row(label, {n});
  return out;
}

RunOutcome well_sweep(const RunConfig& c, const fs::path& dir, unsigned threads) {
  const auto d = dynamic_setup(c);
  const auto times = c.params.at("compression_times_tau").get<std::vector<double>>();
  const auto s = input_state(c);
  std::vector<dynamics::DynamicResult> results(times.size());
  detail::parallel_for(times.size(), threads, [&](std::size_t i) {
    auto knobs = d.knobs;
    knobs.compression_time = times[i] * d.tau;
    results[i] = dynamics::run_dynamic_protocol(s, d.cfg, knobs);
  });

  RunOutcome out;
  json points = json::array();
  CsvWriter csv(dir / "series" / "sweep.csv",
                {"compression_time_tau", "fidelity", "fidelity_raw", "fidelity_fit", "vacancy_leakage",
                 "wall_leakage", "norm_drift"});
  bool monotone = true;
  bool strict = true;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& rep = results[i].report;
    csv.row({times[i], rep.fidelity, rep.fidelity_raw, rep.fidelity_fit, rep.vacancy_leakage, rep.wall_leakage,
             rep.norm_drift});
    points.push_back(dynamic_metrics(results[i], d.tau));
    populations_csv(dir / "series" / ("point_" + std::to_string(i) + ".csv"), results[i].output);
    for (const auto& w : rep.warnings) out.warnings.push_back("t_c = " + format_number(times[i]) + " tau: " + w);
    if (i > 0) {
      const double prev = results[i - 1].report.fidelity;
      if (rep.fidelity < prev - 1e-4) monotone = false;
      if (!(rep.fidelity > prev)) strict = false;
    }
  }
  out.metrics["points"] = points;
  out.metrics["compression_times_tau"] = times;
  out.metrics["monotone_within_1e-4"] = monotone;
  out.metrics["strictly_increasing"] = strict;
  return out;
}

multiplier::MultiplierConfig multiplier_config(const json& p) {
  const optics::GridSpec grid{as_size(p, "n"), as_double(p, "pitch")};
  auto c = multiplier::default_multiplier(p.at("p").get<int>(), grid, as_double(p, "wavelength"),
                                          as_double(p, "ring_radius_fraction"), as_double(p, "ring_width_fraction"));
  c.fanout.mu = as_double(p, "mu");
  c.phase_correction = p.at("phase_correction").get<bool>();
  multiplier::validate(c);
  return c;
}

optics::SpectrumMethod method_of(const json& p) {
  return p.at("method").get<std::string>() == "projective" ? optics::SpectrumMethod::projective
                                                           : optics::SpectrumMethod::azimuthal;
}

std::vector<cplx> flatten(const optics::ComplexGrid& m) {
  std::vector<cplx> v;
  v.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) v.push_back(m(i, j));
  }
  return v;
}

RunOutcome oam_multiply(const RunConfig& c, const fs::path& dir) {
  const auto& p = c.params;
  const auto cfg = multiplier_config(p);
  const multiplier::OamMultiplier mult(cfg);
  const auto modes = p.at("modes").get<std::vector<int>>();
  const int l_max = p.at("l_max").get<int>();
  const auto method = method_of(p);

  optics::Field2D in = optics::blank(cfg.grid, cfg.sorter.wavelength);
  int worst = 0;
  for (int l : modes) worst = std::max(worst, std::abs(l));
  for (int l : modes) {
    in.samples += optics::make_oam_mode(l, cfg.ring, cfg.grid, cfg.sorter.wavelength, cfg.p * worst).samples;
  }
  in.samples /= std::sqrt(in.power());
  const auto res = mult.multiply(in);
  const auto s_in = optics::oam_spectrum(in, l_max, method, &cfg.ring);
  const auto s_out = optics::oam_spectrum(res.field, l_max, method, &cfg.ring);

  RunOutcome out;
  auto& m = out.metrics;
  m["input_modes"] = modes;
  m["dominant_in"] = s_in.dominant();
  m["dominant_out"] = s_out.dominant();
  json mapped = json::object();
  for (int l : modes) {
    if (std::abs(cfg.p * l) <= l_max) mapped[std::to_string(cfg.p * l)] = s_out.at(cfg.p * l);
  }
  m["mapped_power"] = mapped;
  m["window_power_out"] = s_out.total();
  m["output_power"] = res.field.power() / in.power();
  m["outside_annulus_fraction"] = res.outside_fraction;
  m["warnings"] = res.warnings;
  out.warnings = res.warnings;

  CsvWriter csv(dir / "series" / "spectrum.csv", {"l", "input_power", "output_power"});
  for (int l = -l_max; l <= l_max; ++l) csv.row({static_cast<double>(l), s_in.at(l), s_out.at(l)});
  if (p.at("write_rasters").get<bool>()) {
    const auto n = static_cast<std::uint32_t>(cfg.grid.n);
    write_complex_raster(dir / "rasters" / "input.bin", n, n, flatten(in.samples));
    write_complex_raster(dir / "rasters" / "output.bin", n, n, flatten(res.field.samples));
  }
  return out;
}

RunOutcome oam_crosstalk(const RunConfig& c, const fs::path& dir, unsigned threads) {
  const auto& p = c.params;
  const auto cfg = multiplier_config(p);
  const multiplier::OamMultiplier mult(cfg);
  const int l_in_max = p.at("l_in_max").get<int>();
  const int l_out_max = p.at("l_out_max").get<int>();
  std::vector<int> l_in;
  for (int l = -l_in_max; l <= l_in_max; ++l) l_in.push_back(l);
  const auto x = multiplier::crosstalk_matrix(mult, l_in, l_out_max, method_of(p), threads);

  RunOutcome out;
  json rows = json::array();
  bool all_mapped = true;
  double worst_leak = 0.0;
  double worst_single = 0.0;
  for (int l : l_in) {
    int best = -l_out_max;
    for (int o = -l_out_max; o <= l_out_max; ++o) {
      if (x.at(l, o) > x.at(l, best)) best = o;
    }
    const double dom = x.at(l, cfg.p * l);
    double leak = 0.0;
    double single = 0.0;
    for (int o = -l_out_max; o <= l_out_max; ++o) {
      if (std::abs(o - cfg.p * l) >= 3) {
        leak += x.at(l, o);
        single = std::max(single, x.at(l, o));
      }
    }
    all_mapped = all_mapped && best == cfg.p * l;
    worst_leak = std::max(worst_leak, leak / dom);
    worst_single = std::max(worst_single, single / dom);
    rows.push_back({{"l_in", l}, {"argmax", best}, {"target_power", dom}, {"far_leakage_over_target", leak / dom},
                    {"largest_far_over_target", single / dom}});
  }
  double sym = 0.0;
  if (l_in_max >= 0) {
    for (int o = 1; o <= l_out_max; ++o) {
      const double a = x.at(0, o);
      const double b = x.at(0, -o);
      if (std::max(a, b) > 0.0) sym = std::max(sym, std::abs(a - b) / std::max(x.at(0, 0), 1e-300));
    }
  }
  auto& m = out.metrics;
  m["rows"] = rows;
  m["argmax_at_p_l"] = all_mapped;
  m["worst_far_leakage_over_target"] = worst_leak;
  m["worst_largest_far_over_target"] = worst_single;
  m["row0_asymmetry"] = sym;
  m["budget"] = {{"fanout_loss", x.budget.fanout_loss},
                 {"sorter_leakage", x.budget.sorter_leakage},
                 {"seam", x.budget.seam}};
  m["fanout_efficiency"] = optics::fanout_efficiency(cfg.fanout);

  std::vector<std::string> header{"l_in"};
  for (int o = -l_out_max; o <= l_out_max; ++o) header.push_back("out_" + std::to_string(o));
  CsvWriter csv(dir / "series" / "crosstalk.csv", header);
  json matrix = json::array();
  for (std::size_t r = 0; r < l_in.size(); ++r) {
    std::vector<double> row{static_cast<double>(l_in[r])};
    row.insert(row.end(), x.power[r].begin(), x.power[r].end());
    csv.row(row);
    matrix.push_back({{"l_in", l_in[r]}, {"power", x.power[r]}});
  }
  write_json(dir / "series" / "crosstalk.json", {{"l_out_max", l_out_max}, {"rows", matrix}});
  return out;
}

RunOutcome oam_petals(const RunConfig& c, const fs::path& dir, unsigned threads) {
  const auto& p = c.params;
  const auto cfg = multiplier_config(p);
  const multiplier::OamMultiplier mult(cfg);
  const auto ls = p.at("l").get<std::vector<int>>();
  std::vector<multiplier::PetalResult> results(ls.size());
  detail::parallel_for(ls.size(), threads, [&](std::size_t i) { results[i] = multiplier::petal_test(ls[i], mult); });

  RunOutcome out;
  json rows = json::array();
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const auto& r = results[i];
    rows.push_back({{"l", ls[i]},
                    {"petals_in", r.petals_in},
                    {"petals_out", r.petals_out},
                    {"expected_out", 2 * cfg.p * ls[i]},
                    {"visibility_in", r.visibility_in},
                    {"visibility_out", r.visibility_out},
                    {"ring_radius_in", r.ring_in.radius},
                    {"ring_radius_out", r.ring_out.radius}});
    CsvWriter csv(dir / "series" / ("ring_l" + std::to_string(ls[i]) + ".csv"),
                  {"theta", "intensity_in", "intensity_out"});
    for (std::size_t t = 0; t < r.ring_in.theta.size(); ++t) {
      csv.row({r.ring_in.theta[t], r.ring_in.intensity[t], r.ring_out.intensity[t]});
    }
  }
  out.metrics["petals"] = rows;
  if (ls.size() == 1) {
    out.metrics["petals_in"] = results[0].petals_in;
    out.metrics["petals_out"] = results[0].petals_out;
    out.metrics["visibility_out"] = results[0].visibility_out;
  }
  return out;
}

RunOutcome carpet(const RunConfig& c, const fs::path& dir) {
  const auto& p = c.params;
  const auto s = input_state(c);
  const double L = as_double(p, "L");
  const double tau = well::revival_time(L);
  dynamics::PropagatorSettings ps;
  ps.dt = tau / as_double(p, "dt_per_tau");
  const auto g = dynamics::to_grid(s, as_size(p, "M"));
  const double t_end = as_double(p, "t_end_tau") * tau;
  const auto cp = dynamics::carpet(g, {}, t_end, as_size(p, "time_samples"), as_size(p, "x_samples"), ps);

  RunOutcome out;
  double peak = 0.0;
  double drift = 0.0;
  const std::size_t last = cp.rows() - 1;
  for (std::size_t x = 0; x < cp.cols(); ++x) {
    peak = std::max(peak, cp.at(0, x));
    drift = std::max(drift, std::abs(cp.at(last, x) - cp.at(0, x)));
  }
  auto& m = out.metrics;
  m["rows"] = cp.rows();
  m["cols"] = cp.cols();
  m["t_end_tau"] = as_double(p, "t_end_tau");
  m["peak_density"] = peak;
  m["final_minus_initial_max"] = drift;

  CsvWriter csv(dir / "series" / "carpet.csv", {"t", "x", "density"});
  for (std::size_t t = 0; t < cp.rows(); ++t) {
    for (std::size_t x = 0; x < cp.cols(); ++x) csv.row({cp.times[t], cp.xs[x], cp.at(t, x)});
  }
  write_raster(dir / "rasters" / "carpet.bin", static_cast<std::uint32_t>(cp.rows()),
               static_cast<std::uint32_t>(cp.cols()), cp.density);
  return out;
}

std::vector<std::string> list_files(const fs::path& dir) {
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir).generic_string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

RunOutcome run_experiment(const RunConfig& c, const fs::path& dir, unsigned threads) {
  fs::create_directories(dir / "series");
  fs::create_directories(dir / "rasters");
  const std::string& e = c.experiment;
  if (e == "well-ideal") return well_ideal(c, dir);
  if (e == "well-dynamic") return well_dynamic(c, dir);
  if (e == "well-sweep") return well_sweep(c, dir, threads);
  if (e == "oam-multiply") return oam_multiply(c, dir);
  if (e == "oam-crosstalk") return oam_crosstalk(c, dir, threads);
  if (e == "oam-petals") return oam_petals(c, dir, threads);
  if (e == "carpet") return carpet(c, dir);
  throw ConfigError("unknown experiment '" + e + "'");
}

RunOutcome execute_run(const RunConfig& cfg, const RunOptions& opts) {
  if (opts.out.empty()) throw ConfigError("no output directory (--out or 'out' in the config)");
  const std::string started = utc_now();
  RunOutcome out = run_experiment(cfg, opts.out, opts.threads);
  write_json(opts.out / "metrics.json", out.metrics);

  RunConfig recorded = cfg;
  recorded.out = opts.out.generic_string();
  json outputs = json::object();
  for (const auto& f : list_files(opts.out)) {
    if (f != "manifest.json") outputs[f] = sha256_file(opts.out / f);
  }
  const json resolved = recorded.to_json();
  out.manifest = {
      {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
      {"config", resolved},
      {"started_utc", started},
      {"finished_utc", utc_now()},
      {"threads", opts.threads},
      {"inputs",
       {{"config_source", opts.config_source},
        {"config_sha256", opts.config_sha256},
        {"resolved_config_sha256", sha256_hex(resolved.dump())}}},
      {"random", {{"generator", "std::mt19937_64 with std::normal_distribution"}, {"seed", cfg.seed}}},
      {"metrics", out.metrics},
      {"warnings", out.warnings},
      {"outputs", outputs},
  };
  write_json(opts.out / "manifest.json", out.manifest);
  return out;
}

}  // namespace hotel::io
