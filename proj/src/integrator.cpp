#include "amc/integrator.hpp"

#include <cmath>

namespace amc {

void IntegratorConfig::validate() const {
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be positive");
  if (!(record_every >= 0.0) || !std::isfinite(record_every)) throw ConfigError("record_every must be >= 0");
  if (method == Method::rk4) {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  } else {
    if (!(rtol > 0.0)) throw ConfigError("rtol must be positive");
    if (!(atol > 0.0)) throw ConfigError("atol must be positive");
  }
}

DerivedSample derive_sample(const Amplitudes& x, const Params& p, double r) {
  const CanonicalState c = canonical_from_amplitudes(x);
  const BlochVector h = bloch_vector(x);
  Params at_time = p;
  at_time.r = r;
  return DerivedSample{
      c.s, c.theta, c.n, h.hx, h.hy, h.hz,
      effective_energy(c.s, c.theta, ReducedParams::from_params(at_time, c.n)),
      c.theta_defined,
  };
}

namespace {

OdeState<4> pack(const Amplitudes& x) { return {x.a.real(), x.a.imag(), x.b.real(), x.b.imag()}; }
Amplitudes unpack(const OdeState<4>& y) { return Amplitudes{{y[0], y[1]}, {y[2], y[3]}}; }

}  // namespace

Trajectory evolve(const Amplitudes& x0, const Params& p, const IntegratorConfig& cfg) {
  const double r = p.r;
  return evolve(x0, p, [r](double) { return r; }, cfg);
}

Trajectory evolve(const Amplitudes& x0, const Params& p, const RSchedule& r_of_t, const IntegratorConfig& cfg) {
  p.validate();
  Trajectory out;
  auto rhs = [&](double t, const OdeState<4>& y) {
    Params at_time = p;
    at_time.r = r_of_t(t);
    const GpDerivative d = gp_rhs(unpack(y), at_time);
    return OdeState<4>{d.da.real(), d.da.imag(), d.db.real(), d.db.imag()};
  };
  auto observer = [&](double t, const OdeState<4>& y) {
    const Amplitudes x = unpack(y);
    out.times.push_back(t);
    out.states.push_back(x);
    out.derived.push_back(derive_sample(x, p, r_of_t(t)));
  };
  integrate<4>(rhs, pack(x0), cfg, observer);
  return out;
}

ReducedTrajectory evolve_reduced(double s0, double theta0, const ReducedParams& q, const IntegratorConfig& cfg,
                                 double pole_epsilon) {
  if (!(std::abs(s0) <= 1.0 - pole_epsilon)) throw ConfigError("initial s must satisfy |s| <= 1 - pole_epsilon");
  ReducedTrajectory out;
  auto rhs = [&](double, const OdeState<2>& y) {
    const ReducedDerivative d = reduced_rhs(y[0], y[1], q, pole_epsilon);
    return OdeState<2>{d.ds, d.dtheta};
  };
  auto observer = [&](double t, const OdeState<2>& y) {
    out.times.push_back(t);
    out.s.push_back(y[0]);
    out.theta.push_back(wrap_angle(y[1]));
  };
  // The guard band keeps trajectories from stalling one rounding step below
  // the domain boundary, where no step can make progress.
  auto at_pole = [&](double, const OdeState<2>& y) { return y[0] >= 1.0 - 2.0 * pole_epsilon; };
  const IntegrationStatus status = integrate<2>(rhs, OdeState<2>{s0, theta0}, cfg, observer, at_pole);
  if (status.halted) out.pole_time = status.t_end;
  return out;
}

CanonicalTrajectory evolve_canonical(const CanonicalState& c0, const Params& p, const IntegratorConfig& cfg,
                                     double pole_epsilon) {
  p.validate();
  if (!(std::abs(c0.s) <= 1.0 - pole_epsilon)) throw ConfigError("initial s must satisfy |s| <= 1 - pole_epsilon");
  CanonicalTrajectory out;
  auto rhs = [&](double, const OdeState<3>& y) {
    const CanonicalDerivative d = full_canonical_rhs(CanonicalState{y[0], y[1], y[2]}, p, pole_epsilon);
    return OdeState<3>{d.ds, d.dtheta, d.dn};
  };
  auto observer = [&](double t, const OdeState<3>& y) {
    out.times.push_back(t);
    out.states.push_back(CanonicalState{y[0], wrap_angle(y[1]), y[2]});
  };
  auto at_pole = [&](double, const OdeState<3>& y) { return y[0] >= 1.0 - 2.0 * pole_epsilon; };
  const IntegrationStatus status = integrate<3>(rhs, OdeState<3>{c0.s, c0.theta, c0.n}, cfg, observer, at_pole);
  if (status.halted) out.pole_time = status.t_end;
  return out;
}

}  // namespace amc
