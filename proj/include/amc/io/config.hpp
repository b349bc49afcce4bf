// Run configuration: a flat key-value text format with one section per
// module. Unknown sections and keys are errors; missing keys keep defaults.

#pragma once

#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "amc/experiments.hpp"
#include "amc/integrator.hpp"
#include "amc/io/format.hpp"
#include "amc/model.hpp"
#include "amc/regimes.hpp"

namespace amc::io {

enum class Command { evolve, fixed_points, regimes, sweep, trap, portrait };

std::string_view to_string(Command command);
Command parse_command(std::string_view text);

struct RunConfig {
  // [run]
  Command command = Command::evolve;
  // [model]
  Params model;
  // [reduced]; gamma is the relative rate Gamma_minus and may be a list for
  // sweep and trap, which run with Gamma_plus = 0.
  double c = 0.0;
  double omega = 1.0;
  std::vector<double> gamma{0.0};
  // [initial]
  double s0 = 1.0;
  double theta0 = 0.0;
  double n0 = 1.0;
  // [integrator]; error_control_auto picks per step for sweep and trap, whose
  // particle number (and hence oscillation frequency) can grow by orders of
  // magnitude, and per unit step elsewhere.
  IntegratorConfig integrator;
  bool error_control_auto = true;
  // [regimes]
  Window window;
  int resolution_c = 200;
  int resolution_r = 200;
  double refine_tol = 1e-6;
  // [portrait]
  int ns = 9;
  int ntheta = 8;
  double s_lo = -0.9;
  double s_hi = 0.9;
  // [experiments]; t_span = 0 selects the command default (sweep: 2 r_max /
  // |beta|, trap: 20).
  std::vector<double> beta{0.1};
  double r_max = 5.0;
  double t_span = 0.0;
  double a0_sq = 0.9;
  double trap_phase = kTrapPhase;
  CouplingMode coupling = CouplingMode::floating;
  // [output]
  std::string output = "out";
  Format format = Format::csv;

  bool operator==(const RunConfig&) const = default;
};

struct ConfigKey {
  std::string_view section;
  std::string_view name;  // also the CLI flag, with '_' written as '-'
  std::string_view help;
};

/// Every recognised key, in serialization order.
const std::vector<ConfigKey>& config_keys();

/// Throws ConfigError for unknown keys or malformed values.
void set_value(RunConfig& cfg, std::string_view key, std::string_view value);
std::string get_value(const RunConfig& cfg, std::string_view key);

RunConfig parse_config(std::string_view text);
std::string serialize_config(const RunConfig& cfg);

/// The integrator settings the selected command actually runs with.
IntegratorConfig effective_integrator(const RunConfig& cfg);

/// Field-level checks for the selected command.
void validate(const RunConfig& cfg);

}  // namespace amc::io
