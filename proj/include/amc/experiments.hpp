// Dynamical experiments: phase portraits, Feshbach sweeps and self-trapping.

#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "amc/fixed_points.hpp"
#include "amc/integrator.hpp"

namespace amc {

struct PhasePortrait {
  ReducedParams params;
  std::vector<std::array<double, 2>> initial;  // (s0, theta0) per trajectory
  std::vector<ReducedTrajectory> trajectories;
  std::vector<FixedPoint> fixed_points;
  std::optional<FixedPoint> boundary_point;
};

/// ns x ntheta initial conditions, s in [s_lo, s_hi], theta in [0, 2 pi).
std::vector<std::array<double, 2>> initial_condition_grid(int ns, int ntheta, double s_lo, double s_hi);

PhasePortrait phase_portrait(const ReducedParams& q, const std::vector<std::array<double, 2>>& initial,
                             const IntegratorConfig& cfg);

/// How the couplings C = U n and Omega = V sqrt(n) respond to particle-number
/// changes. `floating` integrates the Gross-Pitaevskii equations as they
/// stand; `frozen` rescales U and V by the instantaneous n so that C and
/// Omega keep their initial values (the autonomous reduced flow).
enum class CouplingMode { floating, frozen };

std::string_view to_string(CouplingMode mode);

/// Linear sweep R(t) = beta (t - T/2) over t in [0, T] starting from the pure
/// atomic state. T defaults to 2 r_max / |beta| when t_span is 0.
struct SweepProtocol {
  double beta = 0.1;
  double t_span = 0.0;
  double r_max = 5.0;

  double duration() const;
  double r_at(double t) const { return beta * (t - 0.5 * duration()); }
  void validate() const;
};

struct EfficiencyReport {
  double w = 0.0;           // |b(T)|^2 / n(T), at most 1/2
  double w_baseline = 0.0;  // same protocol with gamma_a = gamma_b = 0
  std::optional<double> m;  // (W - W0) / W0; empty when W0 < 1e-12
  double beta = 0.0;
  double gamma_minus = 0.0;
  double gamma_plus = 0.0;

  double molecular_fraction() const { return 2.0 * w; }
};

/// Conversion efficiency W of one sweep; cfg.t_final is replaced by T.
double conversion_efficiency(const SweepProtocol& protocol, const Params& p, const IntegratorConfig& cfg,
                             CouplingMode mode = CouplingMode::floating);

EfficiencyReport sweep_conversion(const SweepProtocol& protocol, const Params& p, const IntegratorConfig& cfg,
                                  CouplingMode mode = CouplingMode::floating);

struct TrappingRun {
  std::vector<double> times;
  std::vector<double> p_atomic;  // |a|^2 / n
  bool trapped = false;          // min P(a) > 1/2
  double min_p_atomic = 0.0;
};

/// Relative phase at which the self-trapped elliptic point near the atomic
/// mode sits for C > 0.
inline constexpr double kTrapPhase = std::numbers::pi;

/// Integrates with gamma_a = -gamma_b = gamma_minus from |a(0)|^2 = a0_sq,
/// n(0) = 1 and relative phase theta0.
TrappingRun self_trapping_run(double u, double v, double r, double gamma_minus, double a0_sq, double t_span,
                              const IntegratorConfig& cfg, double theta0 = kTrapPhase,
                              CouplingMode mode = CouplingMode::floating);

/// max - min of the series over samples with t_lo <= t <= t_hi.
double oscillation_amplitude(const std::vector<double>& times, const std::vector<double>& series, double t_lo,
                             double t_hi);
double oscillation_amplitude(const std::vector<double>& series);

}  // namespace amc
