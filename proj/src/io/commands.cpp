#include "amc/io/commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

namespace amc::io {

namespace {

using nlohmann::json;

std::string file_name(std::string_view stem, Format format) {
  return std::string(stem) + (format == Format::json ? ".json" : ".csv");
}

ReducedParams reduced(const RunConfig& cfg) { return ReducedParams{cfg.c, cfg.omega, cfg.model.r, cfg.gamma.front()}; }

Table fixed_point_table(const std::vector<FixedPoint>& interior, const std::optional<FixedPoint>& boundary) {
  Table t{{"s", "theta", "kind", "eig1_re", "eig1_im", "eig2_re", "eig2_im", "residual", "on_boundary"}, {}};
  auto add = [&t](const FixedPoint& fp) {
    t.add_row({fp.s, fp.theta, std::string(to_string(fp.kind)), fp.eigenvalues[0].real(), fp.eigenvalues[0].imag(),
               fp.eigenvalues[1].real(), fp.eigenvalues[1].imag(), fp.residual, fp.on_boundary});
  };
  for (const FixedPoint& fp : interior) add(fp);
  if (boundary) add(*boundary);
  return t;
}

std::vector<OutputFile> cmd_evolve(const RunConfig& cfg) {
  const Amplitudes x0 = amplitudes_from_canonical(CanonicalState{cfg.s0, cfg.theta0, cfg.n0});
  const Trajectory traj = evolve(x0, cfg.model, effective_integrator(cfg));
  Table t{{"t", "re_a", "im_a", "re_b", "im_b", "n", "s", "theta", "hx", "hy", "hz", "energy"}, {}};
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Amplitudes& x = traj.states[i];
    const DerivedSample& d = traj.derived[i];
    t.add_row({traj.times[i], x.a.real(), x.a.imag(), x.b.real(), x.b.imag(), d.n, d.s,
               d.theta_defined ? d.theta : std::nan(""), d.hx, d.hy, d.hz, d.energy});
  }
  return {{file_name("trajectory", cfg.format), render(t, cfg.format)}};
}

std::vector<OutputFile> cmd_fixed_points(const RunConfig& cfg) {
  const ReducedParams q = reduced(cfg);
  return {{file_name("fixed_points", cfg.format),
           render(fixed_point_table(interior_fixed_points(q), boundary_fixed_point(q)), cfg.format)}};
}

json polyline_json(const Polyline& line) {
  json pts = json::array();
  for (const auto& [c, r] : line.points) pts.push_back({c, r});
  return {{"kind", line.kind}, {"points", std::move(pts)}};
}

std::vector<OutputFile> cmd_regimes(const RunConfig& cfg) {
  const double gamma = cfg.gamma.front();
  const RegimeMap map = scan_plane(cfg.window, cfg.resolution_c, cfg.resolution_r, cfg.omega, gamma);
  Table cells{{"c", "r", "label", "n_interior", "has_boundary_fp"}, {}};
  for (std::size_t ic = 0; ic < map.c_axis.size(); ++ic) {
    for (std::size_t ir = 0; ir < map.r_axis.size(); ++ir) {
      const RegimeLabel& l = map.at(ic, ir);
      cells.add_row({map.c_axis[ic], map.r_axis[ir], std::string(to_string(l.label)),
                     static_cast<long long>(l.n_interior), l.has_boundary_fp});
    }
  }
  json lines = json::array();
  for (const Polyline& p : trace_boundaries(map, cfg.refine_tol)) lines.push_back(polyline_json(p));
  for (const Polyline& p : boundary_existence_curves(cfg.window, cfg.omega)) lines.push_back(polyline_json(p));
  const json doc = {{"omega", cfg.omega},
                    {"gamma", gamma},
                    {"window", {cfg.window.c_min, cfg.window.c_max, cfg.window.r_min, cfg.window.r_max}},
                    {"refine_tol", cfg.refine_tol},
                    {"polylines", std::move(lines)}};
  return {{file_name("regime_cells", cfg.format), render(cells, cfg.format)},
          {"regime_boundaries.json", doc.dump(1) + "\n"}};
}

// Runs job(i) for i in [0, n) on a small thread pool; results are stored by
// index so output order does not depend on scheduling.
template <class Job>
void parallel_for(std::size_t n, Job&& job) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < n && !failed; i = next++) {
      try {
        job(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), n));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<OutputFile> cmd_sweep(const RunConfig& cfg) {
  const std::size_t ng = cfg.gamma.size();
  std::vector<EfficiencyReport> reports(cfg.beta.size() * ng);
  parallel_for(reports.size(), [&](std::size_t k) {
    SweepProtocol protocol{cfg.beta[k / ng], cfg.t_span, cfg.r_max};
    const Params p = Params::from_rates(cfg.model.v, cfg.model.u, cfg.model.r, 0.0, cfg.gamma[k % ng]);
    reports[k] = sweep_conversion(protocol, p, effective_integrator(cfg), cfg.coupling);
  });
  Table t{{"beta", "gamma", "w", "m", "m_defined", "w_baseline", "molecular_fraction"}, {}};
  for (const EfficiencyReport& r : reports) {
    t.add_row({r.beta, r.gamma_minus, r.w, r.m.value_or(std::nan("")), r.m.has_value(), r.w_baseline,
               r.molecular_fraction()});
  }
  return {{file_name("sweep", cfg.format), render(t, cfg.format)}};
}

std::vector<OutputFile> cmd_trap(const RunConfig& cfg) {
  const double span = cfg.t_span > 0.0 ? cfg.t_span : 20.0;
  std::vector<TrappingRun> runs(cfg.gamma.size());
  const IntegratorConfig integrator = effective_integrator(cfg);
  parallel_for(runs.size(), [&](std::size_t k) {
    runs[k] = self_trapping_run(cfg.model.u, cfg.model.v, cfg.model.r, cfg.gamma[k], cfg.a0_sq, span, integrator,
                                cfg.trap_phase, cfg.coupling);
  });
  Table series{{"gamma", "t", "p_atomic"}, {}};
  Table summary{{"gamma", "trapped", "min_p_atomic", "amplitude"}, {}};
  for (std::size_t k = 0; k < runs.size(); ++k) {
    for (std::size_t i = 0; i < runs[k].times.size(); ++i) {
      series.add_row({cfg.gamma[k], runs[k].times[i], runs[k].p_atomic[i]});
    }
    summary.add_row({cfg.gamma[k], runs[k].trapped, runs[k].min_p_atomic, oscillation_amplitude(runs[k].p_atomic)});
  }
  return {{file_name("trap", cfg.format), render(series, cfg.format)},
          {file_name("trap_summary", cfg.format), render(summary, cfg.format)}};
}

std::vector<OutputFile> cmd_portrait(const RunConfig& cfg) {
  const ReducedParams q = reduced(cfg);
  const auto initial = initial_condition_grid(cfg.ns, cfg.ntheta, cfg.s_lo, cfg.s_hi);
  std::vector<ReducedTrajectory> trajs(initial.size());
  parallel_for(initial.size(), [&](std::size_t k) {
    trajs[k] = evolve_reduced(initial[k][0], initial[k][1], q, effective_integrator(cfg));
  });
  Table points{{"trajectory", "t", "s", "theta", "energy"}, {}};
  Table summary{{"trajectory", "s0", "theta0", "reached_pole", "pole_time"}, {}};
  for (std::size_t k = 0; k < trajs.size(); ++k) {
    const auto id = static_cast<long long>(k);
    const ReducedTrajectory& tr = trajs[k];
    for (std::size_t i = 0; i < tr.size(); ++i) {
      points.add_row({id, tr.times[i], tr.s[i], tr.theta[i], effective_energy(tr.s[i], tr.theta[i], q)});
    }
    summary.add_row({id, initial[k][0], initial[k][1], tr.pole_time.has_value(), tr.pole_time.value_or(std::nan(""))});
  }
  return {{file_name("portrait", cfg.format), render(points, cfg.format)},
          {file_name("portrait_summary", cfg.format), render(summary, cfg.format)},
          {file_name("portrait_fixed_points", cfg.format),
           render(fixed_point_table(interior_fixed_points(q), boundary_fixed_point(q)), cfg.format)}};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace

std::vector<OutputFile> render_outputs(const RunConfig& cfg) {
  validate(cfg);
  switch (cfg.command) {
    case Command::evolve: return cmd_evolve(cfg);
    case Command::fixed_points: return cmd_fixed_points(cfg);
    case Command::regimes: return cmd_regimes(cfg);
    case Command::sweep: return cmd_sweep(cfg);
    case Command::trap: return cmd_trap(cfg);
    case Command::portrait: return cmd_portrait(cfg);
  }
  return {};
}

std::string make_manifest(const RunConfig& cfg, const std::vector<OutputFile>& files) {
  json config = json::object();
  for (const ConfigKey& k : config_keys()) {
    config[std::string(k.section)][std::string(k.name)] = get_value(cfg, k.name);
  }
  const std::string text = serialize_config(cfg);
  json derived;
  switch (cfg.command) {
    case Command::evolve:
      derived = {{"gamma_plus", cfg.model.gamma_plus()},
                 {"gamma_minus", cfg.model.gamma_minus()},
                 {"c", cfg.model.u * cfg.n0},
                 {"omega", cfg.model.v * std::sqrt(cfg.n0)}};
      break;
    case Command::fixed_points:
    case Command::regimes:
    case Command::portrait:
      // The reduced flow is independent of Gamma_plus.
      derived = {{"gamma_plus", nullptr}, {"gamma_minus", cfg.gamma.front()}, {"c", cfg.c}, {"omega", cfg.omega}};
      break;
    case Command::sweep:
    case Command::trap:
      // Gamma_minus comes from the gamma list, Gamma_plus is fixed at 0 and
      // the runs start from n = 1.
      derived = {{"gamma_plus", 0.0}, {"gamma_minus", cfg.gamma}, {"c", cfg.model.u}, {"omega", cfg.model.v}};
      break;
  }
  json names = json::array();
  for (const OutputFile& f : files) names.push_back(f.name);
  const json doc = {{"tool", kToolName},
                    {"version", kToolVersion},
                    {"command", to_string(cfg.command)},
                    {"created_utc", utc_timestamp()},
                    {"config", std::move(config)},
                    {"config_text", text},
                    {"config_digest", "fnv1a64:" + fnv1a_hex(text)},
                    {"derived", std::move(derived)},
                    {"files", std::move(names)}};
  return doc.dump(1) + "\n";
}

RunConfig config_from_manifest(std::string_view manifest_text) {
  json doc;
  try {
    doc = json::parse(manifest_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  if (!doc.contains("config_text") || !doc["config_text"].is_string()) {
    throw ConfigError("manifest: missing config_text");
  }
  const std::string text = doc["config_text"].get<std::string>();
  const std::string digest = "fnv1a64:" + fnv1a_hex(text);
  if (doc.value("config_digest", std::string()) != digest) throw ConfigError("manifest: config digest mismatch");
  return parse_config(text);
}

RunResult run(const RunConfig& cfg) {
  const std::vector<OutputFile> files = render_outputs(cfg);
  RunResult result;
  result.directory = cfg.output;
  std::error_code ec;
  std::filesystem::create_directories(result.directory, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.output + ": " + ec.message());
  for (const OutputFile& f : files) {
    write_file(result.directory / f.name, f.content);
    result.files.push_back(f.name);
  }
  write_file(result.directory / kManifestName, make_manifest(cfg, files));
  result.files.emplace_back(kManifestName);
  return result;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return ss.str();
}

RunResult rerun(const std::filesystem::path& manifest, const std::optional<std::string>& output) {
  RunConfig cfg = config_from_manifest(read_file(manifest));
  if (output) cfg.output = *output;
  return run(cfg);
}

}  // namespace amc::io
