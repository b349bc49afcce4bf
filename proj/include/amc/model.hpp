// Mean-field model of a two-mode atom-molecule condensate with particle loss.
//
// The regular representation is the complex amplitude pair (a, b) with total
// particle number n = |a|^2 + 2|b|^2. The canonical representation (S, theta, n)
// is derived from it and is singular at the poles S = +-1.

#pragma once

#include <complex>
#include <numbers>

#include "amc/errors.hpp"

namespace amc {

using complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Default guard distance from the S = 1 pole of the reduced equations.
inline constexpr double kPoleEpsilon = 1e-12;

/// Microscopic two-mode Hamiltonian constants, in units of the conversion rate.
struct BareParams {
  double mu_a = 0.0;
  double mu_b = 0.0;
  double u_aa = 0.0;
  double u_bb = 0.0;
  double u_ab = 0.0;
};

/// Parameters of the non-Hermitian Gross-Pitaevskii equations.
struct Params {
  double v = 1.0;        // conversion rate V
  double u = 0.0;        // effective coupling U
  double r = 0.0;        // energy difference R
  double gamma_a = 0.0;  // atomic loss rate (signed)
  double gamma_b = 0.0;  // molecular loss rate (signed)

  double gamma_plus() const { return 0.5 * (gamma_a + gamma_b); }
  double gamma_minus() const { return 0.5 * (gamma_a - gamma_b); }

  /// Builds loss rates from total and relative rates.
  static Params from_rates(double v, double u, double r, double gamma_plus, double gamma_minus) {
    return Params{v, u, r, gamma_plus + gamma_minus, gamma_plus - gamma_minus};
  }

  void validate() const;
  bool operator==(const Params&) const = default;
};

/// Autonomous parameters of the (S, theta) flow at fixed particle number.
struct ReducedParams {
  double c = 0.0;      // C = U n
  double omega = 1.0;  // Omega = V sqrt(n)
  double r = 0.0;      // R
  double gamma = 0.0;  // Gamma = Gamma_minus

  static ReducedParams from_params(const Params& p, double n);
  void validate() const;
};

struct Amplitudes {
  complex a{1.0, 0.0};
  complex b{0.0, 0.0};

  double number() const { return std::norm(a) + 2.0 * std::norm(b); }
  double z() const { return std::norm(a) - 2.0 * std::norm(b); }
};

struct CanonicalState {
  double s = 0.0;
  double theta = 0.0;
  double n = 0.0;
  // False when |a| = 0 or |b| = 0; theta is then reported as 0.
  bool theta_defined = true;
};

struct BlochVector {
  double hx = 0.0;
  double hy = 0.0;
  double hz = 0.0;
};

struct GpDerivative {
  complex da;
  complex db;
};

struct ReducedDerivative {
  double ds;
  double dtheta;
};

struct CanonicalDerivative {
  double ds;
  double dtheta;
  double dn;
};

/// Wraps an angle to [0, 2 pi).
double wrap_angle(double theta);

/// Smallest absolute difference between two angles.
double angle_distance(double x, double y);

/// Effective (r, u) of the two-mode model.
struct ReducedBare {
  double r;
  double u;
};
ReducedBare reduce_bare_params(const BareParams& p);

CanonicalState canonical_from_amplitudes(const Amplitudes& x);

/// Inverse of canonical_from_amplitudes; theta_a fixes the global gauge.
Amplitudes amplitudes_from_canonical(const CanonicalState& c, double theta_a = 0.0);

BlochVector bloch_vector(const Amplitudes& x);

/// hx^2 + hy^2 - (n + hz)^2 (n - hz) / 2; zero on the tear-drop surface.
double surface_defect(const BlochVector& h, double n);

GpDerivative gp_rhs(const Amplitudes& x, const Params& p);

ReducedDerivative reduced_rhs(double s, double theta, const ReducedParams& q,
                              double pole_epsilon = kPoleEpsilon);

CanonicalDerivative full_canonical_rhs(const CanonicalState& c, const Params& p,
                                       double pole_epsilon = kPoleEpsilon);

/// Effective Hamiltonian of the loss-free reduced flow.
double effective_energy(double s, double theta, const ReducedParams& q);

}  // namespace amc
