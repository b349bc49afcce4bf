#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "amc/model.hpp"
#include "amc/ode.hpp"

namespace amc {

/// Quantities derived from one amplitude sample.
struct DerivedSample {
  double s = 0.0;
  double theta = 0.0;
  double n = 0.0;
  double hx = 0.0;
  double hy = 0.0;
  double hz = 0.0;
  double energy = 0.0;
  bool theta_defined = true;
};

/// `r` is the energy difference in effect at the sample time.
DerivedSample derive_sample(const Amplitudes& x, const Params& p, double r);

struct Trajectory {
  std::vector<double> times;
  std::vector<Amplitudes> states;
  std::vector<DerivedSample> derived;

  std::size_t size() const { return times.size(); }
};

/// Energy difference as a function of time; used for sweep protocols.
using RSchedule = std::function<double(double)>;

/// Integrates the Gross-Pitaevskii equations in the amplitude representation.
Trajectory evolve(const Amplitudes& x0, const Params& p, const IntegratorConfig& cfg);
Trajectory evolve(const Amplitudes& x0, const Params& p, const RSchedule& r_of_t, const IntegratorConfig& cfg);

struct ReducedTrajectory {
  std::vector<double> times;
  std::vector<double> s;
  std::vector<double> theta;  // wrapped to [0, 2 pi)
  std::optional<double> pole_time;

  std::size_t size() const { return times.size(); }
};

/// Integrates the autonomous (S, theta) flow at constant C and Omega. A
/// trajectory coming within 2 pole_epsilon of S = 1 stops with `pole_time` set.
ReducedTrajectory evolve_reduced(double s0, double theta0, const ReducedParams& q, const IntegratorConfig& cfg,
                                 double pole_epsilon = kPoleEpsilon);

struct CanonicalTrajectory {
  std::vector<double> times;
  std::vector<CanonicalState> states;
  std::optional<double> pole_time;
};

/// Integrates (S, theta, n) with C = U n and Omega = V sqrt(n) floating with n.
CanonicalTrajectory evolve_canonical(const CanonicalState& c0, const Params& p, const IntegratorConfig& cfg,
                                     double pole_epsilon = kPoleEpsilon);

}  // namespace amc
