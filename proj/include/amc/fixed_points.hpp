// Fixed points of the reduced (S, theta) flow and their linear stability.
//
// Interior fixed points are the admissible real roots of a cubic in S obtained
// by eliminating theta between the two flow equations; theta is then recovered
// from the population equation (sin) and the phase equation (cos). Squaring
// introduces spurious roots, so every candidate is polished and re-verified
// against the raw vector field.

#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "amc/model.hpp"

namespace amc {

enum class StabilityKind {
  center,
  spiral_attractor,
  spiral_repeller,
  node_attractor,
  node_repeller,
  saddle,
  indeterminate,
};

std::string_view to_string(StabilityKind kind);
bool is_attractor(StabilityKind kind);
bool is_repeller(StabilityKind kind);

struct Matrix2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  double trace() const { return a11 + a22; }
  double det() const { return a11 * a22 - a12 * a21; }
};

std::array<complex, 2> eigenvalues(const Matrix2& m);

struct FixedPoint {
  double s = 0.0;
  double theta = 0.0;
  StabilityKind kind = StabilityKind::indeterminate;
  std::array<complex, 2> eigenvalues{};
  double residual = 0.0;  // max(|dS/dt|, |dtheta/dt|) at (s, theta)
  bool on_boundary = false;
  int multiplicity = 1;   // multiplicity of s as a root of the fixed-point cubic

  double max_real_part() const { return std::max(eigenvalues[0].real(), eigenvalues[1].real()); }
};

/// c3 S^3 + c2 S^2 + c1 S + c0.
struct CubicCoefficients {
  double c3 = 0.0, c2 = 0.0, c1 = 0.0, c0 = 0.0;

  double operator()(double s) const { return ((c3 * s + c2) * s + c1) * s + c0; }
  double derivative(double s) const { return (3.0 * c3 * s + 2.0 * c2) * s + c1; }
  double second_derivative(double s) const { return 6.0 * c3 * s + 2.0 * c2; }
  /// Discriminant of the coefficients scaled to unit max-norm.
  double normalized_discriminant() const;
};

CubicCoefficients cubic_coefficients(const ReducedParams& q);

/// The same polynomial built by expanding sin^2 + cos^2 = 1 with polynomial
/// arithmetic; an independent route to cubic_coefficients.
CubicCoefficients eliminate_phase(const ReducedParams& q);

struct PolynomialRoot {
  double value = 0.0;
  int multiplicity = 1;
};

/// Real roots in ascending order. Leading coefficients negligible relative to
/// the others are dropped (degree reduction) instead of being divided by.
std::vector<PolynomialRoot> real_roots(const CubicCoefficients& p);

/// Analytic Jacobian of (dS/dt, dtheta/dt) with respect to (S, theta).
Matrix2 jacobian(double s, double theta, const ReducedParams& q, double pole_epsilon = kPoleEpsilon);

/// Eigenvalue-based classification; `tol` is an absolute threshold on real parts.
StabilityKind classify(const Matrix2& j, double tol);

/// Classification with the default tolerance 1e-9 * max(1, |lambda|max).
StabilityKind classify(const Matrix2& j);

double field_residual(double s, double theta, const ReducedParams& q);

/// Interior fixed points (-1 < S < 1), ascending in S then theta. Throws a
/// ConfigError when omega <= 0.
std::vector<FixedPoint> interior_fixed_points(const ReducedParams& q);

/// The fixed point on the S = -1 boundary, present iff |sqrt2 (C + R)| <= Omega.
std::optional<FixedPoint> boundary_fixed_point(const ReducedParams& q);

/// Decoherence rate at which the cubic acquires a root at S = -1.
std::optional<double> threshold_gamma_closed_form(double c, double r, double omega);
std::optional<double> threshold_gamma_bisection(double c, double r, double omega);

/// Closed form, cross-checked against bisection (NumericalError if they
/// disagree by more than 1e-6).
std::optional<double> threshold_gamma(double c, double r, double omega);

}  // namespace amc
