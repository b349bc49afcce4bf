#include "amc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace amc {

std::vector<std::array<double, 2>> initial_condition_grid(int ns, int ntheta, double s_lo, double s_hi) {
  if (ns < 1 || ntheta < 1) throw ConfigError("initial-condition grid needs at least one point per axis");
  std::vector<std::array<double, 2>> out;
  for (int i = 0; i < ns; ++i) {
    const double s = ns == 1 ? 0.5 * (s_lo + s_hi) : s_lo + (s_hi - s_lo) * i / (ns - 1);
    for (int j = 0; j < ntheta; ++j) out.push_back({s, kTwoPi * j / ntheta});
  }
  return out;
}

PhasePortrait phase_portrait(const ReducedParams& q, const std::vector<std::array<double, 2>>& initial,
                             const IntegratorConfig& cfg) {
  PhasePortrait out;
  out.params = q;
  out.initial = initial;
  for (const auto& [s0, theta0] : initial) out.trajectories.push_back(evolve_reduced(s0, theta0, q, cfg));
  out.fixed_points = interior_fixed_points(q);
  out.boundary_point = boundary_fixed_point(q);
  return out;
}

double SweepProtocol::duration() const { return t_span > 0.0 ? t_span : 2.0 * r_max / std::abs(beta); }

void SweepProtocol::validate() const {
  if (!std::isfinite(beta) || beta == 0.0) throw ConfigError("sweep rate beta must be finite and non-zero");
  if (!(t_span >= 0.0)) throw ConfigError("sweep t_span must be >= 0");
  if (t_span == 0.0 && !(r_max > 0.0)) throw ConfigError("sweep r_max must be positive");
}

std::string_view to_string(CouplingMode mode) {
  return mode == CouplingMode::frozen ? "frozen" : "floating";
}

namespace {

// Amplitude equations with R(t); in frozen mode U and V are rescaled so that
// U n and V sqrt(n) stay at their values for n = n0.
template <class RofT>
auto amplitude_rhs(const Params& p, RofT r_of_t, CouplingMode mode, double n0) {
  return [=](double t, const OdeState<4>& y) {
    const Amplitudes x{{y[0], y[1]}, {y[2], y[3]}};
    Params at_time = p;
    at_time.r = r_of_t(t);
    if (mode == CouplingMode::frozen) {
      const double n = x.number();
      if (!(n > 0.0)) throw DomainError("frozen coupling needs n > 0");
      at_time.u *= n0 / n;
      at_time.v *= std::sqrt(n0 / n);
    }
    const GpDerivative d = gp_rhs(x, at_time);
    return OdeState<4>{d.da.real(), d.da.imag(), d.db.real(), d.db.imag()};
  };
}

}  // namespace

double conversion_efficiency(const SweepProtocol& protocol, const Params& p, const IntegratorConfig& cfg,
                             CouplingMode mode) {
  protocol.validate();
  p.validate();
  IntegratorConfig run = cfg;
  run.t_final = protocol.duration();
  run.record_every = 0.0;
  // Only the final state matters; keep just the last sample.
  Amplitudes last{{1.0, 0.0}, {0.0, 0.0}};
  const auto rhs = amplitude_rhs(p, [&protocol](double t) { return protocol.r_at(t); }, mode, 1.0);
  const IntegrationStatus status =
      integrate<4>(rhs, OdeState<4>{1.0, 0.0, 0.0, 0.0}, run,
                   [&](double, const OdeState<4>& y) { last = Amplitudes{{y[0], y[1]}, {y[2], y[3]}}; });
  if (status.halted) throw NumericalError("sweep integration halted", status.t_end);
  const double n = last.number();
  return n > 0.0 ? std::norm(last.b) / n : 0.0;
}

EfficiencyReport sweep_conversion(const SweepProtocol& protocol, const Params& p, const IntegratorConfig& cfg,
                                  CouplingMode mode) {
  EfficiencyReport out;
  out.beta = protocol.beta;
  out.gamma_minus = p.gamma_minus();
  out.gamma_plus = p.gamma_plus();
  out.w = conversion_efficiency(protocol, p, cfg, mode);
  if (p.gamma_a == 0.0 && p.gamma_b == 0.0) {
    out.w_baseline = out.w;
  } else {
    Params lossless = p;
    lossless.gamma_a = 0.0;
    lossless.gamma_b = 0.0;
    out.w_baseline = conversion_efficiency(protocol, lossless, cfg, mode);
  }
  if (out.w_baseline >= 1e-12) out.m = (out.w - out.w_baseline) / out.w_baseline;
  return out;
}

TrappingRun self_trapping_run(double u, double v, double r, double gamma_minus, double a0_sq, double t_span,
                              const IntegratorConfig& cfg, double theta0, CouplingMode mode) {
  if (!(a0_sq >= 0.0 && a0_sq <= 1.0)) throw ConfigError("a0_sq must lie in [0, 1]");
  if (!(t_span > 0.0)) throw ConfigError("t_span must be positive");
  if (!std::isfinite(theta0)) throw ConfigError("theta0 must be finite");
  const Params p = Params::from_rates(v, u, r, 0.0, gamma_minus);
  p.validate();
  // theta = 2 arg a - arg b with arg a = 0.
  const Amplitudes x0{{std::sqrt(a0_sq), 0.0}, std::polar(std::sqrt((1.0 - a0_sq) / 2.0), -theta0)};
  IntegratorConfig run = cfg;
  run.t_final = t_span;

  TrappingRun out;
  const auto rhs = amplitude_rhs(p, [r](double) { return r; }, mode, 1.0);
  const IntegrationStatus status = integrate<4>(
      rhs, OdeState<4>{x0.a.real(), x0.a.imag(), x0.b.real(), x0.b.imag()}, run,
      [&](double t, const OdeState<4>& y) {
        const double pa = y[0] * y[0] + y[1] * y[1];
        const double n = pa + 2.0 * (y[2] * y[2] + y[3] * y[3]);
        out.times.push_back(t);
        out.p_atomic.push_back(n > 0.0 ? pa / n : 0.0);
      });
  if (status.halted) throw NumericalError("trapping integration halted", status.t_end);
  out.min_p_atomic = *std::min_element(out.p_atomic.begin(), out.p_atomic.end());
  out.trapped = out.min_p_atomic > 0.5;
  return out;
}

double oscillation_amplitude(const std::vector<double>& times, const std::vector<double>& series, double t_lo,
                             double t_hi) {
  if (series.empty() || times.size() != series.size()) throw ConfigError("series must be non-empty and aligned");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi) continue;
    lo = std::min(lo, series[i]);
    hi = std::max(hi, series[i]);
  }
  if (lo > hi) throw ConfigError("analysis window contains no samples");
  return hi - lo;
}

double oscillation_amplitude(const std::vector<double>& series) {
  if (series.empty()) throw ConfigError("series must be non-empty");
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  return *hi - *lo;
}

}  // namespace amc
