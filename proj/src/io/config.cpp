#include "amc/io/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace amc::io {

std::string_view to_string(Command command) {
  switch (command) {
    case Command::evolve: return "evolve";
    case Command::fixed_points: return "fixed-points";
    case Command::regimes: return "regimes";
    case Command::sweep: return "sweep";
    case Command::trap: return "trap";
    case Command::portrait: return "portrait";
  }
  return "evolve";
}

Command parse_command(std::string_view text) {
  for (Command c : {Command::evolve, Command::fixed_points, Command::regimes, Command::sweep, Command::trap,
                    Command::portrait}) {
    if (to_string(c) == text) return c;
  }
  throw ConfigError("command: unknown command '" + std::string(text) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (std::size_t pos = 0;;) {
    const std::size_t next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<double> parse_list(std::string_view text, std::string_view key) {
  std::vector<double> out;
  for (std::string_view item : split(text, ',')) out.push_back(parse_double(item, key));
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_double(xs[i]);
  return out;
}

int parse_count(std::string_view text, std::string_view key) {
  const long long v = parse_int(text, key);
  if (v < 0 || v > 1'000'000) throw ConfigError(std::string(key) + ": out of range");
  return static_cast<int>(v);
}

struct Field {
  ConfigKey key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class Member>
Field real(std::string_view section, std::string_view name, std::string_view help, Member member) {
  return Field{{section, name, help},
               [=](RunConfig& c, std::string_view v) { std::invoke(member, c) = parse_double(v, name); },
               [=](const RunConfig& c) { return format_double(std::invoke(member, const_cast<RunConfig&>(c))); }};
}

template <class Member>
Field count(std::string_view section, std::string_view name, std::string_view help, Member member) {
  return Field{{section, name, help},
               [=](RunConfig& c, std::string_view v) { std::invoke(member, c) = parse_count(v, name); },
               [=](const RunConfig& c) { return std::to_string(std::invoke(member, const_cast<RunConfig&>(c))); }};
}

template <class Member>
Field list(std::string_view section, std::string_view name, std::string_view help, Member member) {
  return Field{{section, name, help},
               [=](RunConfig& c, std::string_view v) { std::invoke(member, c) = parse_list(v, name); },
               [=](const RunConfig& c) { return join(std::invoke(member, const_cast<RunConfig&>(c))); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({{"run", "command", "evolve | fixed-points | regimes | sweep | trap | portrait"},
                 [](RunConfig& c, std::string_view v) { c.command = parse_command(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.command)); }});
    f.push_back(real("model", "v", "conversion rate V", [](RunConfig& c) -> double& { return c.model.v; }));
    f.push_back(real("model", "u", "effective coupling U", [](RunConfig& c) -> double& { return c.model.u; }));
    f.push_back(real("model", "r", "energy difference R", [](RunConfig& c) -> double& { return c.model.r; }));
    f.push_back(real("model", "gamma_a", "atomic loss rate", [](RunConfig& c) -> double& { return c.model.gamma_a; }));
    f.push_back(
        real("model", "gamma_b", "molecular loss rate", [](RunConfig& c) -> double& { return c.model.gamma_b; }));
    f.push_back(real("reduced", "c", "reduced nonlinearity C", [](RunConfig& c) -> double& { return c.c; }));
    f.push_back(real("reduced", "omega", "reduced conversion rate Omega", [](RunConfig& c) -> double& { return c.omega; }));
    f.push_back(list("reduced", "gamma", "relative decoherence rate(s), comma separated",
                     [](RunConfig& c) -> std::vector<double>& { return c.gamma; }));
    f.push_back(real("initial", "s0", "initial population imbalance", [](RunConfig& c) -> double& { return c.s0; }));
    f.push_back(real("initial", "theta0", "initial relative phase", [](RunConfig& c) -> double& { return c.theta0; }));
    f.push_back(real("initial", "n0", "initial particle number", [](RunConfig& c) -> double& { return c.n0; }));
    f.push_back({{"integrator", "method", "dopri45 | rk4"},
                 [](RunConfig& c, std::string_view v) {
                   if (v == "dopri45") c.integrator.method = Method::dopri45;
                   else if (v == "rk4") c.integrator.method = Method::rk4;
                   else throw ConfigError("method: expected dopri45 or rk4, got '" + std::string(v) + "'");
                 },
                 [](const RunConfig& c) { return std::string(c.integrator.method == Method::rk4 ? "rk4" : "dopri45"); }});
    f.push_back({{"integrator", "error_control", "auto | per_unit_step | per_step"},
                 [](RunConfig& c, std::string_view v) {
                   c.error_control_auto = v == "auto";
                   if (v == "auto" || v == "per_unit_step") c.integrator.error_control = ErrorControl::per_unit_step;
                   else if (v == "per_step") c.integrator.error_control = ErrorControl::per_step;
                   else if (v != "auto") {
                     throw ConfigError("error_control: expected auto, per_unit_step or per_step, got '" +
                                       std::string(v) + "'");
                   }
                 },
                 [](const RunConfig& c) {
                   if (c.error_control_auto) return std::string("auto");
                   return std::string(c.integrator.error_control == ErrorControl::per_step ? "per_step"
                                                                                           : "per_unit_step");
                 }});
    f.push_back(real("integrator", "dt", "fixed step for rk4", [](RunConfig& c) -> double& { return c.integrator.dt; }));
    f.push_back(real("integrator", "rtol", "relative tolerance", [](RunConfig& c) -> double& { return c.integrator.rtol; }));
    f.push_back(real("integrator", "atol", "absolute tolerance", [](RunConfig& c) -> double& { return c.integrator.atol; }));
    f.push_back(real("integrator", "t_final", "integration end time",
                     [](RunConfig& c) -> double& { return c.integrator.t_final; }));
    f.push_back(real("integrator", "record_every", "output interval, 0 for every step",
                     [](RunConfig& c) -> double& { return c.integrator.record_every; }));
    f.push_back({{"regimes", "window", "c_min,c_max,r_min,r_max"},
                 [](RunConfig& c, std::string_view v) {
                   const auto xs = parse_list(v, "window");
                   if (xs.size() != 4) throw ConfigError("window: expected c_min,c_max,r_min,r_max");
                   c.window = Window{xs[0], xs[1], xs[2], xs[3]};
                 },
                 [](const RunConfig& c) {
                   return join({c.window.c_min, c.window.c_max, c.window.r_min, c.window.r_max});
                 }});
    f.push_back({{"regimes", "resolution", "grid nodes per axis, N or NCxNR"},
                 [](RunConfig& c, std::string_view v) {
                   const auto x = v.find('x');
                   if (x == std::string_view::npos) {
                     c.resolution_c = c.resolution_r = parse_count(v, "resolution");
                   } else {
                     c.resolution_c = parse_count(v.substr(0, x), "resolution");
                     c.resolution_r = parse_count(v.substr(x + 1), "resolution");
                   }
                 },
                 [](const RunConfig& c) {
                   return std::to_string(c.resolution_c) + "x" + std::to_string(c.resolution_r);
                 }});
    f.push_back(real("regimes", "refine_tol", "boundary bisection tolerance",
                     [](RunConfig& c) -> double& { return c.refine_tol; }));
    f.push_back(count("portrait", "ns", "initial S values", [](RunConfig& c) -> int& { return c.ns; }));
    f.push_back(count("portrait", "ntheta", "initial theta values", [](RunConfig& c) -> int& { return c.ntheta; }));
    f.push_back(real("portrait", "s_lo", "lowest initial S", [](RunConfig& c) -> double& { return c.s_lo; }));
    f.push_back(real("portrait", "s_hi", "highest initial S", [](RunConfig& c) -> double& { return c.s_hi; }));
    f.push_back(list("experiments", "beta", "sweep rate(s), comma separated",
                     [](RunConfig& c) -> std::vector<double>& { return c.beta; }));
    f.push_back(real("experiments", "r_max", "sweep half-window in R", [](RunConfig& c) -> double& { return c.r_max; }));
    f.push_back(real("experiments", "t_span", "experiment duration, 0 for the default",
                     [](RunConfig& c) -> double& { return c.t_span; }));
    f.push_back(real("experiments", "a0_sq", "initial atomic population |a(0)|^2",
                     [](RunConfig& c) -> double& { return c.a0_sq; }));
    f.push_back(real("experiments", "trap_phase", "initial relative phase of trapping runs",
                     [](RunConfig& c) -> double& { return c.trap_phase; }));
    f.push_back({{"experiments", "coupling", "floating | frozen"},
                 [](RunConfig& c, std::string_view v) {
                   if (v == "floating") c.coupling = CouplingMode::floating;
                   else if (v == "frozen") c.coupling = CouplingMode::frozen;
                   else throw ConfigError("coupling: expected floating or frozen, got '" + std::string(v) + "'");
                 },
                 [](const RunConfig& c) { return std::string(to_string(c.coupling)); }});
    f.push_back({{"output", "output", "output directory"},
                 [](RunConfig& c, std::string_view v) {
                   if (v.empty()) throw ConfigError("output: must not be empty");
                   c.output = std::string(v);
                 },
                 [](const RunConfig& c) { return c.output; }});
    f.push_back({{"output", "format", "csv | json"},
                 [](RunConfig& c, std::string_view v) { c.format = parse_format(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.format)); }});
    return f;
  }();
  return table;
}

const Field* find_field(std::string_view key) {
  for (const Field& f : fields()) {
    if (f.key.name == key) return &f;
  }
  return nullptr;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const Field& f : fields()) out.push_back(f.key);
    return out;
  }();
  return keys;
}

void set_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  const Field* f = find_field(key);
  if (!f) throw ConfigError("unknown key '" + std::string(key) + "'");
  f->set(cfg, value);
}

std::string get_value(const RunConfig& cfg, std::string_view key) {
  const Field* f = find_field(key);
  if (!f) throw ConfigError("unknown key '" + std::string(key) + "'");
  return f->get(cfg);
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::string section;
  std::map<std::string, int> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  for (int line_no = 1; std::getline(in, raw); ++line_no) {
    const std::string where = "line " + std::to_string(line_no) + ": ";
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      const bool known = std::any_of(fields().begin(), fields().end(),
                                     [&](const Field& f) { return f.key.section == section; });
      if (!known) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const Field* f = find_field(key);
    if (!f || f->key.section != section) {
      throw ConfigError(where + "unknown key '" + key + "' in section [" + section + "]");
    }
    if (!seen.emplace(key, line_no).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      f->set(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  std::string_view section;
  for (const Field& f : fields()) {
    if (f.key.section != section) {
      if (!out.empty()) out += '\n';
      section = f.key.section;
      out += "[" + std::string(section) + "]\n";
    }
    out += std::string(f.key.name) + " = " + f.get(cfg) + "\n";
  }
  return out;
}

namespace {

void require(bool ok, std::string_view key, std::string_view message) {
  if (!ok) throw ConfigError(std::string(key) + ": " + std::string(message));
}

template <class F>
void prefixed(std::string_view section, F&& check) {
  try {
    check();
  } catch (const ConfigError& e) {
    throw ConfigError("[" + std::string(section) + "] " + e.what());
  }
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

IntegratorConfig effective_integrator(const RunConfig& cfg) {
  IntegratorConfig out = cfg.integrator;
  if (cfg.error_control_auto) {
    const bool growing = cfg.command == Command::sweep || cfg.command == Command::trap;
    out.error_control = growing ? ErrorControl::per_step : ErrorControl::per_unit_step;
  }
  return out;
}

void validate(const RunConfig& cfg) {
  prefixed("model", [&] { cfg.model.validate(); });
  prefixed("integrator", [&] { cfg.integrator.validate(); });
  require(!cfg.gamma.empty() && std::all_of(cfg.gamma.begin(), cfg.gamma.end(), finite), "gamma",
          "needs at least one finite value");
  require(!cfg.output.empty(), "output", "must not be empty");

  switch (cfg.command) {
    case Command::evolve:
      require(finite(cfg.s0) && std::abs(cfg.s0) <= 1.0, "s0", "must lie in [-1, 1]");
      require(finite(cfg.theta0), "theta0", "must be finite");
      require(finite(cfg.n0) && cfg.n0 > 0.0, "n0", "must be positive");
      break;
    case Command::fixed_points:
    case Command::regimes:
    case Command::portrait:
      require(cfg.gamma.size() == 1, "gamma", "this command takes a single value");
      prefixed("reduced", [&] { ReducedParams{cfg.c, cfg.omega, cfg.model.r, cfg.gamma.front()}.validate(); });
      if (cfg.command == Command::regimes) {
        require(cfg.resolution_c >= 2 && cfg.resolution_r >= 2, "resolution", "needs at least 2 nodes per axis");
        require(cfg.window.c_max > cfg.window.c_min && cfg.window.r_max > cfg.window.r_min, "window",
                "needs c_min < c_max and r_min < r_max");
        require(finite(cfg.refine_tol) && cfg.refine_tol > 0.0, "refine_tol", "must be positive");
      }
      if (cfg.command == Command::portrait) {
        require(cfg.ns >= 1 && cfg.ntheta >= 1, "ns", "ns and ntheta must be at least 1");
        require(cfg.s_lo > -1.0 && cfg.s_hi < 1.0 && cfg.s_lo <= cfg.s_hi, "s_lo",
                "needs -1 < s_lo <= s_hi < 1");
      }
      break;
    case Command::sweep:
      require(!cfg.beta.empty(), "beta", "needs at least one value");
      for (double b : cfg.beta) require(finite(b) && b != 0.0, "beta", "values must be finite and non-zero");
      require(finite(cfg.r_max) && cfg.r_max > 0.0, "r_max", "must be positive");
      require(finite(cfg.t_span) && cfg.t_span >= 0.0, "t_span", "must be >= 0");
      break;
    case Command::trap:
      require(cfg.a0_sq >= 0.0 && cfg.a0_sq <= 1.0, "a0_sq", "must lie in [0, 1]");
      require(finite(cfg.t_span) && cfg.t_span >= 0.0, "t_span", "must be >= 0");
      require(finite(cfg.trap_phase), "trap_phase", "must be finite");
      break;
  }
}

}  // namespace amc::io
