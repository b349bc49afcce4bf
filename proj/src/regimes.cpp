#include "amc/regimes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <thread>

namespace amc {

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::I: return "I";
    case Regime::II: return "II";
    case Regime::III: return "III";
    case Regime::IV: return "IV";
    case Regime::boundary: return "boundary";
    case Regime::unclassified: return "unclassified";
  }
  return "unclassified";
}

namespace {

constexpr double kDegenerateDiscriminant = 1e-12;

// A vanishing discriminant is a genuine bifurcation unless the repeated root
// is S = 1/3, where one root of the cubic carries two phase branches.
bool on_bifurcation(const CubicCoefficients& cubic) {
  if (std::abs(cubic.normalized_discriminant()) >= kDegenerateDiscriminant) return false;
  const auto roots = real_roots(cubic);
  const bool branch_double = std::any_of(roots.begin(), roots.end(), [](const PolynomialRoot& root) {
    return root.multiplicity >= 2 && std::abs(3.0 * root.value - 1.0) < 1e-6;
  });
  return !branch_double;
}

}  // namespace

Regime label_from_census(const std::vector<FixedPoint>& interior, const CubicCoefficients& cubic) {
  if (on_bifurcation(cubic)) return Regime::boundary;
  if (std::any_of(interior.begin(), interior.end(),
                  [](const FixedPoint& fp) { return fp.kind == StabilityKind::indeterminate; })) {
    return Regime::boundary;
  }
  switch (interior.size()) {
    case 3: return Regime::II;
    case 2: return Regime::III;
    case 1: {
      const double cos_t = std::cos(interior.front().theta);
      if (cos_t > 0.0) return Regime::I;
      if (cos_t < 0.0) return Regime::IV;
      return Regime::boundary;
    }
    default: return Regime::unclassified;
  }
}

RegimeLabel classify_regime(const ReducedParams& q) {
  const auto interior = interior_fixed_points(q);
  RegimeLabel out;
  out.label = label_from_census(interior, cubic_coefficients(q));
  out.n_interior = static_cast<int>(interior.size());
  out.has_boundary_fp = boundary_fixed_point(q).has_value();
  for (const FixedPoint& fp : interior) out.kinds.push_back(fp.kind);
  return out;
}

std::size_t RegimeMap::count(Regime regime) const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [&](const RegimeLabel& l) { return l.label == regime; }));
}

double RegimeMap::area_fraction(Regime regime) const {
  return labels.empty() ? 0.0 : static_cast<double>(count(regime)) / static_cast<double>(labels.size());
}

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

}  // namespace

RegimeMap scan_plane(const Window& window, int resolution_c, int resolution_r, double omega, double gamma) {
  if (resolution_c < 2 || resolution_r < 2) throw ConfigError("scan resolution must be >= 2 per axis");
  if (!(window.c_max > window.c_min) || !(window.r_max > window.r_min)) throw ConfigError("empty scan window");
  RegimeMap map;
  map.c_axis = linspace(window.c_min, window.c_max, resolution_c);
  map.r_axis = linspace(window.r_min, window.r_max, resolution_r);
  map.omega = omega;
  map.gamma = gamma;
  map.labels.resize(map.c_axis.size() * map.r_axis.size());

  std::atomic<std::size_t> next_row{0};
  auto worker = [&] {
    for (std::size_t ic = next_row++; ic < map.c_axis.size(); ic = next_row++) {
      for (std::size_t ir = 0; ir < map.r_axis.size(); ++ir) {
        map.labels[ic * map.r_axis.size() + ir] =
            classify_regime(ReducedParams{map.c_axis[ic], omega, map.r_axis[ir], gamma});
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min(std::thread::hardware_concurrency(), 16u));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return map;
}

namespace {

std::string pair_key(Regime a, Regime b) {
  if (static_cast<int>(a) > static_cast<int>(b)) std::swap(a, b);
  return std::string(to_string(a)) + "|" + std::string(to_string(b));
}

std::array<double, 2> bisect_flip(std::array<double, 2> a, std::array<double, 2> b, Regime label_a, double omega,
                                  double gamma, double tol) {
  while (std::hypot(b[0] - a[0], b[1] - a[1]) > tol) {
    const std::array<double, 2> mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    const Regime lm = classify_regime(ReducedParams{mid[0], omega, mid[1], gamma}).label;
    (lm == label_a ? a : b) = mid;
  }
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
}

std::vector<std::vector<std::array<double, 2>>> chain(std::vector<std::array<double, 2>> pts, double link) {
  std::vector<std::vector<std::array<double, 2>>> lines;
  std::vector<bool> used(pts.size(), false);
  auto nearest = [&](const std::array<double, 2>& p) {
    std::size_t best = pts.size();
    double best_d = link;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (used[i]) continue;
      const double d = std::hypot(pts[i][0] - p[0], pts[i][1] - p[1]);
      if (d <= best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  };
  for (std::size_t start = 0; start < pts.size(); ++start) {
    if (used[start]) continue;
    used[start] = true;
    std::vector<std::array<double, 2>> line{pts[start]};
    for (std::size_t k = nearest(line.back()); k < pts.size(); k = nearest(line.back())) {
      used[k] = true;
      line.push_back(pts[k]);
    }
    std::vector<std::array<double, 2>> front;
    for (std::size_t k = nearest(line.front()); k < pts.size(); k = nearest(front.back())) {
      used[k] = true;
      front.push_back(pts[k]);
    }
    std::reverse(front.begin(), front.end());
    front.insert(front.end(), line.begin(), line.end());
    lines.push_back(std::move(front));
  }
  return lines;
}

}  // namespace

std::vector<Polyline> trace_boundaries(const RegimeMap& map, double refine_tol) {
  if (!(refine_tol > 0.0)) throw ConfigError("refine_tol must be positive");
  const std::size_t nc = map.c_axis.size();
  const std::size_t nr = map.r_axis.size();
  std::map<std::string, std::vector<std::array<double, 2>>> flips;

  auto visit = [&](std::size_t ic0, std::size_t ir0, std::size_t ic1, std::size_t ir1) {
    const Regime la = map.at(ic0, ir0).label;
    const Regime lb = map.at(ic1, ir1).label;
    if (la == lb) return;
    flips[pair_key(la, lb)].push_back(bisect_flip({map.c_axis[ic0], map.r_axis[ir0]},
                                                  {map.c_axis[ic1], map.r_axis[ir1]}, la, map.omega, map.gamma,
                                                  refine_tol));
  };
  for (std::size_t ic = 0; ic < nc; ++ic) {
    for (std::size_t ir = 0; ir < nr; ++ir) {
      if (ir + 1 < nr) visit(ic, ir, ic, ir + 1);
      if (ic + 1 < nc) visit(ic, ir, ic + 1, ir);
    }
  }

  const double dc = (map.c_axis.back() - map.c_axis.front()) / static_cast<double>(nc - 1);
  const double dr = (map.r_axis.back() - map.r_axis.front()) / static_cast<double>(nr - 1);
  const double link = 1.5 * std::hypot(dc, dr);
  std::vector<Polyline> out;
  for (auto& [key, pts] : flips) {
    for (auto& line : chain(std::move(pts), link)) out.push_back(Polyline{key, std::move(line)});
  }
  return out;
}

std::vector<Polyline> boundary_existence_curves(const Window& window, double omega) {
  // C + R = +-Omega / sqrt2, sampled along C and clipped to the R range.
  std::vector<Polyline> out;
  for (double sign : {-1.0, 1.0}) {
    Polyline line{"boundary-fp-existence", {}};
    const double offset = sign * omega / std::numbers::sqrt2;
    const double c_lo = std::max(window.c_min, offset - window.r_max);
    const double c_hi = std::min(window.c_max, offset - window.r_min);
    if (c_lo > c_hi) continue;
    line.points.push_back({c_lo, offset - c_lo});
    line.points.push_back({c_hi, offset - c_hi});
    out.push_back(std::move(line));
  }
  return out;
}

std::optional<std::array<double, 2>> locate_transition(const ReducedParams& from, const ReducedParams& to,
                                                       double tol) {
  const Regime la = classify_regime(from).label;
  const Regime lb = classify_regime(ReducedParams{to.c, from.omega, to.r, from.gamma}).label;
  if (la == lb) return std::nullopt;
  return bisect_flip({from.c, from.r}, {to.c, to.r}, la, from.omega, from.gamma, tol);
}

namespace {

ReducedParams on_axis(SweepAxis axis, double value, double fixed_other, double omega, double gamma) {
  return axis == SweepAxis::r ? ReducedParams{fixed_other, omega, value, gamma}
                              : ReducedParams{value, omega, fixed_other, gamma};
}

}  // namespace

FixedPointLocus fixed_point_locus(SweepAxis axis, const std::vector<double>& values, double fixed_other,
                                  double omega, double gamma) {
  FixedPointLocus locus;
  locus.axis = axis;
  locus.parameter = values;
  for (double v : values) locus.points.push_back(interior_fixed_points(on_axis(axis, v, fixed_other, omega, gamma)));

  // Greedy continuation: each point extends the open branch whose last point
  // (from the previous parameter value) is closest in (S, theta).
  std::vector<std::size_t> open;  // indices into branches, extended at the previous step
  for (std::size_t k = 0; k < values.size(); ++k) {
    std::vector<std::size_t> next_open;
    std::vector<bool> taken(open.size(), false);
    for (const FixedPoint& fp : locus.points[k]) {
      std::size_t best = open.size();
      double best_d = 0.1;
      for (std::size_t j = 0; j < open.size(); ++j) {
        if (taken[j]) continue;
        const LocusBranch& b = locus.branches[open[j]];
        const double d = std::abs(b.s.back() - fp.s) + angle_distance(b.theta.back(), fp.theta) / kTwoPi;
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      std::size_t idx;
      if (best < open.size()) {
        taken[best] = true;
        idx = open[best];
      } else {
        locus.branches.emplace_back();
        idx = locus.branches.size() - 1;
      }
      LocusBranch& b = locus.branches[idx];
      b.parameter.push_back(values[k]);
      b.s.push_back(fp.s);
      b.theta.push_back(fp.theta);
      next_open.push_back(idx);
    }
    open = std::move(next_open);
  }
  return locus;
}

std::optional<double> locate_count_change(SweepAxis axis, double lo, double hi, double fixed_other, double omega,
                                          double gamma, double tol) {
  auto count = [&](double v) { return interior_fixed_points(on_axis(axis, v, fixed_other, omega, gamma)).size(); };
  const std::size_t n_lo = count(lo);
  if (n_lo == count(hi)) return std::nullopt;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (count(mid) == n_lo ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace amc
