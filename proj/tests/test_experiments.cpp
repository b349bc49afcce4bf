#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "amc/experiments.hpp"
#include "oracles.hpp"

using namespace amc;
using doctest::Approx;

namespace {

IntegratorConfig sweep_config() {
  IntegratorConfig cfg;
  cfg.error_control = ErrorControl::per_step;
  return cfg;
}

Params sweep_params(double gamma_minus) { return Params::from_rates(1.0, 0.0, 0.0, 0.0, gamma_minus); }

double window_amplitude(const TrappingRun& run, double t_hi) {
  return oscillation_amplitude(run.times, run.p_atomic, 0.0, t_hi);
}

// Total angle swept by the trajectory around (s_c, theta_c), with theta
// unwrapped along the path.
double winding_angle(const ReducedTrajectory& tr, double s_c, double theta_c) {
  double total = 0.0;
  double theta = tr.theta.front();
  double prev = std::atan2(tr.s.front() - s_c, oracle::angle_gap(theta, theta_c));
  for (std::size_t i = 1; i < tr.size(); ++i) {
    theta += std::remainder(tr.theta[i] - tr.theta[i - 1], 2 * std::numbers::pi);
    const double ang = std::atan2(tr.s[i] - s_c, theta - theta_c - 2 * std::numbers::pi *
                                                     std::round((theta - theta_c) / (2 * std::numbers::pi)));
    total += std::remainder(ang - prev, 2 * std::numbers::pi);
    prev = ang;
  }
  return total;
}

}  // namespace

TEST_CASE("initial-condition grid") {
  const auto grid = initial_condition_grid(3, 4, -0.5, 0.5);
  REQUIRE(grid.size() == 12);
  CHECK(grid.front()[0] == -0.5);
  CHECK(grid.back()[0] == 0.5);
  CHECK(grid[1][1] == Approx(std::numbers::pi / 2));
  for (const auto& p : grid) CHECK(p[1] < 2 * std::numbers::pi);
  CHECK(initial_condition_grid(1, 1, -0.5, 0.5).front()[0] == 0.0);
  CHECK_THROWS_AS(initial_condition_grid(0, 4, -0.5, 0.5), ConfigError);
}

TEST_CASE("sweep protocol") {
  const SweepProtocol p{0.2, 0.0, 5.0};
  CHECK(p.duration() == Approx(50.0));
  CHECK(p.r_at(0.0) == Approx(-5.0));
  CHECK(p.r_at(50.0) == Approx(5.0));
  CHECK(p.r_at(25.0) == 0.0);
  const SweepProtocol down{-0.2, 0.0, 5.0};
  CHECK(down.duration() == Approx(50.0));
  CHECK(down.r_at(0.0) == Approx(5.0));
  CHECK(SweepProtocol{0.2, 30.0, 5.0}.duration() == 30.0);
  CHECK_THROWS_AS((SweepProtocol{0.0, 0.0, 5.0}.validate()), ConfigError);
  CHECK_THROWS_AS((SweepProtocol{0.1, -1.0, 5.0}.validate()), ConfigError);
}

TEST_CASE("no conversion channel") {
  const SweepProtocol p{0.5, 0.0, 5.0};
  CHECK(conversion_efficiency(p, Params::from_rates(0.0, 0.0, 0.0, 0.0, 0.0), sweep_config()) == 0.0);
  CHECK(conversion_efficiency(p, Params::from_rates(0.0, 1.0, 0.0, 0.0, 0.5), sweep_config()) == 0.0);
  const EfficiencyReport r = sweep_conversion(p, Params::from_rates(0.0, 0.0, 0.0, 0.0, 0.5), sweep_config());
  CHECK_FALSE(r.m.has_value());
}

TEST_CASE("lossless baseline") {
  const SweepProtocol p{0.5, 0.0, 5.0};
  const EfficiencyReport r = sweep_conversion(p, sweep_params(0.0), sweep_config());
  REQUIRE(r.m.has_value());
  CHECK(*r.m == 0.0);
  CHECK(r.w == r.w_baseline);
  CHECK(r.w > 0.0);
  CHECK(r.w <= 0.5);
  CHECK(r.molecular_fraction() == 2 * r.w);
}

TEST_CASE("sweep direction symmetry at U = 0") {
  for (double beta : {0.5, 1.0}) {
    const double up = conversion_efficiency(SweepProtocol{beta, 0.0, 5.0}, sweep_params(0.0), IntegratorConfig{});
    const double down = conversion_efficiency(SweepProtocol{-beta, 0.0, 5.0}, sweep_params(0.0), IntegratorConfig{});
    CHECK(std::abs(up - down) < 1e-6);
  }
}

TEST_CASE("slower sweeps convert more") {
  // The efficiency oscillates weakly inside a decade, so compare decade
  // endpoints.
  double prev = 1.0;
  for (double beta : {0.01, 0.1, 1.0}) {
    const double w = conversion_efficiency(SweepProtocol{beta, 0.0, 5.0}, sweep_params(0.0), IntegratorConfig{});
    CHECK(w < prev);
    CHECK(w <= 0.5);
    prev = w;
  }
  CHECK(conversion_efficiency(SweepProtocol{0.01, 0.0, 5.0}, sweep_params(0.0), IntegratorConfig{}) > 0.49);
}

TEST_CASE("frozen couplings") {
  const SweepProtocol p{0.5, 0.0, 5.0};
  const double floating = conversion_efficiency(p, sweep_params(0.0), sweep_config(), CouplingMode::floating);
  const double frozen = conversion_efficiency(p, sweep_params(0.0), sweep_config(), CouplingMode::frozen);
  CHECK(std::abs(floating - frozen) < 1e-9);

  // With the couplings held at their initial values the amplitude equations
  // reproduce the autonomous reduced flow.
  const ReducedParams q{1.5, 1.0, 0.0, -0.5};
  IntegratorConfig cfg;
  cfg.t_final = 10.0;
  cfg.record_every = 10.0;
  const TrappingRun run = self_trapping_run(1.5, 1.0, 0.0, -0.5, 0.9, 10.0, cfg, kTrapPhase, CouplingMode::frozen);
  const ReducedTrajectory tr = evolve_reduced(0.9 - 0.1, kTrapPhase, q, cfg);
  // S = 2 P(a) - 1 at unit norm.
  CHECK(std::abs((2 * run.p_atomic.back() - 1) - tr.s.back()) < 1e-6);
}

TEST_CASE("conversion efficiency against the sign of decoherence") {
  const IntegratorConfig cfg = sweep_config();
  for (double beta : {0.1, 0.5, 1.0}) {
    const SweepProtocol p{beta, 0.0, 5.0};
    const EfficiencyReport plus = sweep_conversion(p, sweep_params(0.5), cfg);
    const EfficiencyReport zero = sweep_conversion(p, sweep_params(0.0), cfg);
    const EfficiencyReport minus = sweep_conversion(p, sweep_params(-0.5), cfg);
    CHECK(plus.w > zero.w);
    CHECK(zero.w > minus.w);
    REQUIRE(plus.m.has_value());
    REQUIRE(minus.m.has_value());
    CHECK(*plus.m > 0.0);
    CHECK(*minus.m < 0.0);
    CHECK(plus.gamma_plus == 0.0);
    for (const auto* r : {&plus, &zero, &minus}) {
      CHECK(r->w >= 0.0);
      CHECK(r->w <= 0.5);
    }
  }
}

TEST_CASE("self-trapping at strong nonlinearity") {
  const IntegratorConfig cfg = sweep_config();
  const TrappingRun kept = self_trapping_run(1.5, 1.0, 0.0, -0.5, 0.9, 20.0, cfg);
  const TrappingRun ruined = self_trapping_run(1.5, 1.0, 0.0, 0.5, 0.9, 20.0, cfg);
  CHECK(kept.trapped);
  CHECK(kept.min_p_atomic > 0.5);
  CHECK_FALSE(ruined.trapped);
  CHECK(ruined.min_p_atomic < 0.5);
  CHECK(kept.p_atomic.front() == Approx(0.9).epsilon(1e-12));
  CHECK(kept.times.back() == 20.0);
  CHECK_THROWS_AS(self_trapping_run(1.5, 1.0, 0.0, 0.0, 1.5, 20.0, cfg), ConfigError);
}

TEST_CASE("oscillation amplitude") {
  CHECK(oscillation_amplitude(std::vector<double>(7, 0.3)) == 0.0);
  CHECK(oscillation_amplitude({0.1, 0.7, 0.4}) == Approx(0.6));
  CHECK(oscillation_amplitude({0, 1, 2}, {0.5, 0.1, 0.9}, 0.5, 2.0) == Approx(0.8));
  CHECK_THROWS_AS(oscillation_amplitude(std::vector<double>{}), ConfigError);
  CHECK_THROWS_AS(oscillation_amplitude({0, 1}, {0.5, 0.1}, 3.0, 4.0), ConfigError);

  const IntegratorConfig cfg = sweep_config();
  for (double t_hi : {10.0, 20.0}) {
    const double zero = window_amplitude(self_trapping_run(0.0, 1.0, 0.0, 0.0, 0.9, t_hi, cfg), t_hi);
    const double plus = window_amplitude(self_trapping_run(0.0, 1.0, 0.0, 0.5, 0.9, t_hi, cfg), t_hi);
    const double minus = window_amplitude(self_trapping_run(0.0, 1.0, 0.0, -0.5, 0.9, t_hi, cfg), t_hi);
    CHECK(zero > 0.3);
    CHECK(plus > zero);
    CHECK(minus < zero);
  }
}

TEST_CASE("region III portrait conserves energy") {
  const ReducedParams q{0.0, 1.0, 0.0, 0.0};
  const oracle::Flow flow{0.0, 1.0, 0.0, 0.0};
  IntegratorConfig cfg;
  cfg.t_final = 40.0;
  cfg.record_every = 0.05;
  const PhasePortrait portrait = phase_portrait(q, initial_condition_grid(7, 6, -0.8, 0.8), cfg);
  REQUIRE(portrait.trajectories.size() == 42);
  CHECK(portrait.fixed_points.size() == 2);
  for (std::size_t k = 0; k < portrait.trajectories.size(); ++k) {
    const ReducedTrajectory& tr = portrait.trajectories[k];
    const double e0 = oracle::energy(tr.s.front(), tr.theta.front(), flow);
    double drift = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      drift = std::max(drift, std::abs(oracle::energy(tr.s[i], tr.theta[i], flow) - e0));
    }
    CHECK(drift < 1e-8);
    if (tr.pole_time) continue;
    // Every orbit circles one of the two centers at S = 1/3.
    const double around_pi = std::abs(winding_angle(tr, 1.0 / 3.0, std::numbers::pi));
    const double around_zero = std::abs(winding_angle(tr, 1.0 / 3.0, 0.0));
    CHECK(std::max(around_pi, around_zero) > 1.9 * std::numbers::pi);
  }
}

TEST_CASE("region II orbit stays above the saddle") {
  const ReducedParams q{2.0, 1.0, 0.0, 0.0};
  const oracle::Flow flow{2.0, 1.0, 0.0, 0.0};
  const auto fps = interior_fixed_points(q);
  const auto saddle = std::find_if(fps.begin(), fps.end(), [](const FixedPoint& fp) {
    return fp.kind == StabilityKind::saddle;
  });
  REQUIRE(saddle != fps.end());
  const double e_saddle = oracle::energy(saddle->s, saddle->theta, flow);
  const double e_start = oracle::energy(0.9, 0.0, flow);
  // The start lies on the far side of the separatrix level.
  CHECK(std::abs(e_start - e_saddle) > 0.1);

  IntegratorConfig cfg;
  cfg.t_final = 100.0;
  const ReducedTrajectory tr = evolve_reduced(0.9, 0.0, q, cfg);
  REQUIRE_FALSE(tr.pole_time.has_value());
  CHECK(tr.times.back() == 100.0);
  CHECK(*std::min_element(tr.s.begin(), tr.s.end()) > saddle->s);
}
