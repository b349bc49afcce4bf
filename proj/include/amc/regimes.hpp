// Dynamical regimes of the (C, R) parameter plane.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "amc/fixed_points.hpp"

namespace amc {

enum class Regime { I, II, III, IV, boundary, unclassified };

std::string_view to_string(Regime regime);

struct RegimeLabel {
  Regime label = Regime::unclassified;
  int n_interior = 0;
  bool has_boundary_fp = false;
  std::vector<StabilityKind> kinds;  // of the interior fixed points, ascending in S
};

/// Census-to-label map, kept separate from the scanner so it can be
/// re-anchored: 3 interior points -> II, 2 -> III, 1 -> I or IV by the sign
/// of cos(theta*) at the unique point. Degenerate censuses map to boundary.
Regime label_from_census(const std::vector<FixedPoint>& interior, const CubicCoefficients& cubic);

RegimeLabel classify_regime(const ReducedParams& q);

struct Window {
  double c_min = 0.0;
  double c_max = 3.0;
  double r_min = -2.0;
  double r_max = 2.0;

  bool operator==(const Window&) const = default;
};

struct RegimeMap {
  std::vector<double> c_axis;
  std::vector<double> r_axis;
  std::vector<RegimeLabel> labels;  // index = ic * r_axis.size() + ir
  double omega = 1.0;
  double gamma = 0.0;

  const RegimeLabel& at(std::size_t ic, std::size_t ir) const { return labels[ic * r_axis.size() + ir]; }
  std::size_t count(Regime regime) const;
  double area_fraction(Regime regime) const;
};

/// Classifies every node of a resolution_c x resolution_r grid (endpoints
/// included). Rows are computed in parallel; output order is fixed.
RegimeMap scan_plane(const Window& window, int resolution_c, int resolution_r, double omega, double gamma);

struct Polyline {
  std::string kind;  // e.g. "I|III", or "boundary-fp-existence"
  std::vector<std::array<double, 2>> points;  // (C, R)
};

/// Bisects the label flip between every pair of adjacent differing grid
/// nodes to within refine_tol and chains the flip points into polylines.
std::vector<Polyline> trace_boundaries(const RegimeMap& map, double refine_tol);

/// The lines |sqrt2 (C + R)| = Omega clipped to the window, along which the
/// S = -1 fixed point appears or disappears.
std::vector<Polyline> boundary_existence_curves(const Window& window, double omega);

/// Locates a label flip on the straight segment from `from` to `to` in the
/// (C, R) plane (omega and gamma taken from `from`). Returns the flip point,
/// or nothing when the end labels agree.
std::optional<std::array<double, 2>> locate_transition(const ReducedParams& from, const ReducedParams& to,
                                                       double tol);

enum class SweepAxis { r, c };

struct LocusBranch {
  std::vector<double> parameter;
  std::vector<double> s;
  std::vector<double> theta;
};

struct FixedPointLocus {
  SweepAxis axis = SweepAxis::r;
  std::vector<double> parameter;
  std::vector<std::vector<FixedPoint>> points;  // interior fixed points per parameter value
  std::vector<LocusBranch> branches;            // continuation-connected curves S*(parameter)
};

/// Interior fixed points along a line in parameter space; `fixed_other` is C
/// for an R sweep and R for a C sweep.
FixedPointLocus fixed_point_locus(SweepAxis axis, const std::vector<double>& values, double fixed_other,
                                  double omega, double gamma);

/// Parameter value in [lo, hi] at which the interior fixed-point count
/// changes, located by bisection; nothing if the counts at lo and hi agree.
std::optional<double> locate_count_change(SweepAxis axis, double lo, double hi, double fixed_other, double omega,
                                          double gamma, double tol);

}  // namespace amc
