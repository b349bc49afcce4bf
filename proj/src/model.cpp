#include "amc/model.hpp"

#include <algorithm>
#include <cmath>

namespace amc {

void Params::validate() const {
  if (!std::isfinite(v) || !std::isfinite(u) || !std::isfinite(r) ||
      !std::isfinite(gamma_a) || !std::isfinite(gamma_b)) {
    throw ConfigError("model parameters must be finite");
  }
  if (!(v >= 0.0)) throw ConfigError("conversion rate v must be non-negative");
}

ReducedParams ReducedParams::from_params(const Params& p, double n) {
  return ReducedParams{p.u * n, p.v * std::sqrt(n), p.r, p.gamma_minus()};
}

void ReducedParams::validate() const {
  if (!std::isfinite(c) || !std::isfinite(omega) || !std::isfinite(r) || !std::isfinite(gamma)) {
    throw ConfigError("reduced parameters must be finite");
  }
  if (omega < 0.0) throw ConfigError("omega must be non-negative");
}

double wrap_angle(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod of a tiny negative angle can round back up to 2 pi.
  if (w >= kTwoPi || w == 0.0) w = 0.0;
  return w;
}

double angle_distance(double x, double y) {
  const double d = wrap_angle(x - y);
  return std::min(d, kTwoPi - d);
}

ReducedBare reduce_bare_params(const BareParams& p) {
  return ReducedBare{
      (2.0 * p.mu_a - p.mu_b + 2.0 * p.u_aa - 0.5 * p.u_bb) / 4.0,
      p.u_ab / 4.0 - p.u_aa / 2.0 - p.u_bb / 8.0,
  };
}

CanonicalState canonical_from_amplitudes(const Amplitudes& x) {
  const double na = std::norm(x.a);
  const double nb2 = 2.0 * std::norm(x.b);
  const double n = na + nb2;
  if (n == 0.0) return CanonicalState{0.0, 0.0, 0.0, false};

  CanonicalState c;
  c.n = n;
  c.s = std::clamp((na - nb2) / n, -1.0, 1.0);
  if (x.a == complex{} || x.b == complex{}) {
    c.theta = 0.0;
    c.theta_defined = false;
  } else {
    c.theta = wrap_angle(2.0 * std::arg(x.a) - std::arg(x.b));
    c.theta_defined = true;
  }
  return c;
}

Amplitudes amplitudes_from_canonical(const CanonicalState& c, double theta_a) {
  const double abs_a = std::sqrt(std::max(0.0, c.n * (1.0 + c.s) / 2.0));
  const double abs_b = std::sqrt(std::max(0.0, c.n * (1.0 - c.s) / 4.0));
  return Amplitudes{std::polar(abs_a, theta_a), std::polar(abs_b, 2.0 * theta_a - c.theta)};
}

BlochVector bloch_vector(const Amplitudes& x) {
  const complex w = std::conj(x.a) * std::conj(x.a) * x.b;
  const double k = 2.0 * std::numbers::sqrt2;
  return BlochVector{k * w.real(), k * w.imag(), x.z()};
}

double surface_defect(const BlochVector& h, double n) {
  return h.hx * h.hx + h.hy * h.hy - (n + h.hz) * (n + h.hz) * (n - h.hz) / 2.0;
}

GpDerivative gp_rhs(const Amplitudes& x, const Params& p) {
  constexpr complex i{0.0, 1.0};
  const double z = x.z();
  const complex haa{p.r - p.u * z, -0.5 * p.gamma_a};
  const complex hbb{-2.0 * p.r + 2.0 * p.u * z, -0.5 * p.gamma_b};
  return GpDerivative{
      -i * (haa * x.a + 2.0 * p.v * std::conj(x.a) * x.b),
      -i * (p.v * x.a * x.a + hbb * x.b),
  };
}

namespace {

void check_pole(double s, double pole_epsilon) {
  if (!(s < 1.0 - pole_epsilon)) {
    throw DomainError("reduced equations evaluated at the S = 1 pole (s = " + std::to_string(s) + ")");
  }
}

}  // namespace

ReducedDerivative reduced_rhs(double s, double theta, const ReducedParams& q, double pole_epsilon) {
  check_pole(s, pole_epsilon);
  const double root = std::sqrt(1.0 - s);
  return ReducedDerivative{
      -2.0 * q.omega * (1.0 + s) * root * std::sin(theta) - q.gamma * (1.0 - s * s),
      4.0 * q.c * s - 4.0 * q.r - q.omega * (1.0 - 3.0 * s) / root * std::cos(theta),
  };
}

CanonicalDerivative full_canonical_rhs(const CanonicalState& c, const Params& p, double pole_epsilon) {
  const ReducedDerivative d = reduced_rhs(c.s, c.theta, ReducedParams::from_params(p, c.n), pole_epsilon);
  return CanonicalDerivative{d.ds, d.dtheta, -(p.gamma_plus() + p.gamma_minus() * c.s) * c.n};
}

double effective_energy(double s, double theta, const ReducedParams& q) {
  const double root = std::sqrt(std::max(0.0, 1.0 - s));
  return 2.0 * q.omega * (1.0 + s) * root * std::cos(theta) - 2.0 * q.c * s * s + 4.0 * q.r * s;
}

}  // namespace amc
