#include "amc/fixed_points.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace amc {

std::string_view to_string(StabilityKind kind) {
  switch (kind) {
    case StabilityKind::center: return "center";
    case StabilityKind::spiral_attractor: return "spiral-attractor";
    case StabilityKind::spiral_repeller: return "spiral-repeller";
    case StabilityKind::node_attractor: return "node-attractor";
    case StabilityKind::node_repeller: return "node-repeller";
    case StabilityKind::saddle: return "saddle";
    case StabilityKind::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

bool is_attractor(StabilityKind kind) {
  return kind == StabilityKind::spiral_attractor || kind == StabilityKind::node_attractor;
}

bool is_repeller(StabilityKind kind) {
  return kind == StabilityKind::spiral_repeller || kind == StabilityKind::node_repeller;
}

std::array<complex, 2> eigenvalues(const Matrix2& m) {
  const double half_trace = 0.5 * m.trace();
  const double det = m.det();
  const double disc = half_trace * half_trace - det;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    // Avoid cancellation in the smaller-magnitude eigenvalue.
    const double big = half_trace >= 0.0 ? half_trace + root : half_trace - root;
    const double small = big != 0.0 ? det / big : 0.0;
    std::array<complex, 2> out{complex{std::min(big, small)}, complex{std::max(big, small)}};
    return out;
  }
  const double im = std::sqrt(-disc);
  return {complex{half_trace, -im}, complex{half_trace, im}};
}

double CubicCoefficients::normalized_discriminant() const {
  const double scale = std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
  if (scale == 0.0) return 0.0;
  const double a = c3 / scale, b = c2 / scale, c = c1 / scale, d = c0 / scale;
  return 18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * a * c * c * c - 27.0 * a * a * d * d;
}

CubicCoefficients cubic_coefficients(const ReducedParams& q) {
  const double g2 = q.gamma * q.gamma;
  const double w2 = q.omega * q.omega;
  const double cc = q.c * q.c;
  const double rr = q.r * q.r;
  const double cr = q.c * q.r;
  return CubicCoefficients{
      9.0 * g2 + 64.0 * cc,
      -(15.0 * g2 - 36.0 * w2 + 64.0 * cc + 128.0 * cr),
      -(24.0 * w2 - 7.0 * g2 - 64.0 * rr - 128.0 * cr),
      -(g2 - 4.0 * w2 + 64.0 * rr),
  };
}

namespace {

// Ascending-order polynomial with just enough arithmetic for the elimination.
struct Poly {
  std::vector<double> c;

  Poly operator*(const Poly& o) const {
    Poly out{std::vector<double>(c.size() + o.c.size() - 1, 0.0)};
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < o.c.size(); ++j) out.c[i + j] += c[i] * o.c[j];
    return out;
  }
  Poly operator+(const Poly& o) const {
    Poly out{std::vector<double>(std::max(c.size(), o.c.size()), 0.0)};
    for (std::size_t i = 0; i < c.size(); ++i) out.c[i] += c[i];
    for (std::size_t i = 0; i < o.c.size(); ++i) out.c[i] += o.c[i];
    return out;
  }
  Poly operator*(double k) const {
    Poly out = *this;
    for (double& v : out.c) v *= k;
    return out;
  }
};

}  // namespace

CubicCoefficients eliminate_phase(const ReducedParams& q) {
  // On a fixed point with S != -1 and 1 - 3S != 0:
  //   sin(theta) = -Gamma sqrt(1-S) / (2 Omega)
  //   cos(theta) = 4 (C S - R) sqrt(1-S) / (Omega (1 - 3S))
  // Multiplying sin^2 + cos^2 - 1 = 0 by 4 Omega^2 (1-3S)^2 gives
  //   Gamma^2 (1-S)(1-3S)^2 + 64 (C S - R)^2 (1-S) - 4 Omega^2 (1-3S)^2 = 0.
  const Poly one_minus_s{{1.0, -1.0}};
  const Poly one_minus_3s{{1.0, -3.0}};
  const Poly cs_minus_r{{-q.r, q.c}};
  const Poly sq3 = one_minus_3s * one_minus_3s;
  const Poly lhs = one_minus_s * sq3 * (q.gamma * q.gamma) + cs_minus_r * cs_minus_r * one_minus_s * 64.0 +
                   sq3 * (-4.0 * q.omega * q.omega);
  const Poly p = lhs * -1.0;
  return CubicCoefficients{p.c[3], p.c[2], p.c[1], p.c[0]};
}

namespace {

constexpr double kLeadingCutoff = 1e-13;   // relative size below which a leading coefficient is dropped
constexpr double kClusterWidth = 1e-5;     // eigenvalues this close are treated as one multiple root
constexpr double kSplitCutoff = 1e-7;      // half-separation below which a root pair counts as double
constexpr double kImagCutoff = 1e-9;

template <class F, class DF>
double newton_polish(double x, F&& f, DF&& df, int iterations = 12) {
  double best = x;
  double best_value = std::abs(f(x));
  for (int i = 0; i < iterations && best_value > 0.0; ++i) {
    const double d = df(x);
    if (d == 0.0) break;
    const double step = f(x) / d;
    x -= step;
    const double value = std::abs(f(x));
    if (value < best_value) {
      best = x;
      best_value = value;
    }
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(x))) break;
  }
  return best;
}

// Resolves a cluster of `k` nearly coincident roots centred near x.
void resolve_cluster(const CubicCoefficients& p, double x, int k, std::vector<PolynomialRoot>& out) {
  if (k >= 3) {
    const double centre = newton_polish(x, [&](double s) { return p.second_derivative(s); },
                                        [&](double) { return 6.0 * p.c3; });
    out.push_back({centre, 3});
    return;
  }
  // Critical point of p near the pair; p(x*) and p''(x*) decide whether the
  // pair is real (split by +-delta) or a complex conjugate pair.
  const double centre = newton_polish(x, [&](double s) { return p.derivative(s); },
                                      [&](double s) { return p.second_derivative(s); });
  const double curvature = p.second_derivative(centre);
  if (curvature == 0.0) {
    out.push_back({centre, 2});
    return;
  }
  const double delta_sq = -2.0 * p(centre) / curvature;
  if (std::abs(delta_sq) < kSplitCutoff * kSplitCutoff) {
    out.push_back({centre, 2});
  } else if (delta_sq > 0.0) {
    const double delta = std::sqrt(delta_sq);
    auto f = [&](double s) { return p(s); };
    auto df = [&](double s) { return p.derivative(s); };
    out.push_back({newton_polish(centre - delta, f, df), 1});
    out.push_back({newton_polish(centre + delta, f, df), 1});
  }
}

}  // namespace

std::vector<PolynomialRoot> real_roots(const CubicCoefficients& p) {
  const double scale = std::max({std::abs(p.c3), std::abs(p.c2), std::abs(p.c1), std::abs(p.c0)});
  std::vector<PolynomialRoot> out;
  if (scale == 0.0) return out;

  const CubicCoefficients n{p.c3 / scale, p.c2 / scale, p.c1 / scale, p.c0 / scale};
  auto f = [&](double s) { return n(s); };
  auto df = [&](double s) { return n.derivative(s); };

  if (std::abs(n.c3) > kLeadingCutoff) {
    Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
    companion(0, 0) = -n.c2 / n.c3;
    companion(0, 1) = -n.c1 / n.c3;
    companion(0, 2) = -n.c0 / n.c3;
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    const Eigen::Vector3cd ev = companion.eigenvalues();
    std::vector<complex> lambdas(ev.data(), ev.data() + 3);
    std::sort(lambdas.begin(), lambdas.end(), [](const complex& x, const complex& y) { return x.real() < y.real(); });

    std::size_t i = 0;
    while (i < lambdas.size()) {
      std::size_t j = i + 1;
      while (j < lambdas.size() &&
             std::abs(lambdas[j] - lambdas[j - 1]) <= kClusterWidth * std::max(1.0, std::abs(lambdas[j]))) {
        ++j;
      }
      const int k = static_cast<int>(j - i);
      double centre = 0.0;
      for (std::size_t m = i; m < j; ++m) centre += lambdas[m].real();
      centre /= k;
      if (k == 1) {
        if (std::abs(lambdas[i].imag()) <= kImagCutoff * std::max(1.0, std::abs(lambdas[i]))) {
          out.push_back({newton_polish(centre, f, df), 1});
        }
      } else {
        resolve_cluster(n, centre, k, out);
      }
      i = j;
    }
  } else if (std::abs(n.c2) > kLeadingCutoff) {
    // Quadratic: centre and half-separation straight from the coefficients.
    const double centre = -n.c1 / (2.0 * n.c2);
    const double delta_sq = (n.c1 * n.c1 - 4.0 * n.c2 * n.c0) / (4.0 * n.c2 * n.c2);
    if (std::abs(delta_sq) < kSplitCutoff * kSplitCutoff) {
      out.push_back({centre, 2});
    } else if (delta_sq > 0.0) {
      const double disc = n.c1 * n.c1 - 4.0 * n.c2 * n.c0;
      const double qv = -0.5 * (n.c1 + std::copysign(std::sqrt(disc), n.c1));
      const double x1 = qv / n.c2;
      const double x2 = qv != 0.0 ? n.c0 / qv : -x1;
      out.push_back({newton_polish(std::min(x1, x2), f, df), 1});
      out.push_back({newton_polish(std::max(x1, x2), f, df), 1});
    }
  } else if (std::abs(n.c1) > kLeadingCutoff) {
    out.push_back({-n.c0 / n.c1, 1});
  }
  std::sort(out.begin(), out.end(), [](const PolynomialRoot& x, const PolynomialRoot& y) { return x.value < y.value; });
  return out;
}

Matrix2 jacobian(double s, double theta, const ReducedParams& q, double pole_epsilon) {
  if (!(s < 1.0 - pole_epsilon)) throw DomainError("jacobian evaluated at the S = 1 pole");
  const double one_minus = 1.0 - s;
  const double root = std::sqrt(one_minus);
  const double sin_t = std::sin(theta);
  const double cos_t = std::cos(theta);
  return Matrix2{
      -q.omega * sin_t * (1.0 - 3.0 * s) / root + 2.0 * q.gamma * s,
      -2.0 * q.omega * (1.0 + s) * root * cos_t,
      4.0 * q.c - q.omega * cos_t * (3.0 * s - 5.0) / (2.0 * one_minus * root),
      q.omega * (1.0 - 3.0 * s) / root * sin_t,
  };
}

StabilityKind classify(const Matrix2& j, double tol) {
  const auto ev = eigenvalues(j);
  if (std::abs(ev[0]) <= tol && std::abs(ev[1]) <= tol) return StabilityKind::indeterminate;
  if (ev[0].imag() != 0.0) {
    const double re = ev[0].real();
    if (std::abs(re) <= tol) return StabilityKind::center;
    return re < 0.0 ? StabilityKind::spiral_attractor : StabilityKind::spiral_repeller;
  }
  const double lo = ev[0].real();
  const double hi = ev[1].real();
  if (lo < -tol && hi > tol) return StabilityKind::saddle;
  if (hi < -tol) return StabilityKind::node_attractor;
  if (lo > tol) return StabilityKind::node_repeller;
  return StabilityKind::indeterminate;
}

StabilityKind classify(const Matrix2& j) {
  const auto ev = eigenvalues(j);
  const double magnitude = std::max(std::abs(ev[0]), std::abs(ev[1]));
  return classify(j, 1e-9 * std::max(1.0, magnitude));
}

double field_residual(double s, double theta, const ReducedParams& q) {
  const ReducedDerivative d = reduced_rhs(s, theta, q);
  return std::max(std::abs(d.ds), std::abs(d.dtheta));
}

namespace {

constexpr double kResidualTol = 1e-9;
constexpr double kDuplicateTol = 1e-8;

FixedPoint make_fixed_point(double s, double theta, const ReducedParams& q, bool on_boundary, int multiplicity) {
  FixedPoint fp;
  fp.s = s;
  fp.theta = wrap_angle(theta);
  const Matrix2 j = jacobian(s, fp.theta, q);
  fp.eigenvalues = eigenvalues(j);
  fp.kind = classify(j);
  fp.residual = field_residual(s, fp.theta, q);
  fp.on_boundary = on_boundary;
  fp.multiplicity = multiplicity;
  return fp;
}

// Newton iteration on the raw vector field; returns the best iterate.
std::pair<double, double> polish_fixed_point(double s, double theta, const ReducedParams& q) {
  double best_s = s, best_t = theta;
  double best = field_residual(s, theta, q);
  for (int it = 0; it < 20 && best > 1e-15; ++it) {
    const ReducedDerivative f = reduced_rhs(s, theta, q);
    const Matrix2 j = jacobian(s, theta, q);
    const double det = j.det();
    if (det == 0.0 || !std::isfinite(det)) break;
    const double ds = -(j.a22 * f.ds - j.a12 * f.dtheta) / det;
    const double dt = -(-j.a21 * f.ds + j.a11 * f.dtheta) / det;
    s += ds;
    theta += dt;
    if (!(s > -1.0 && s < 1.0 - 1e-9)) break;
    const double r = field_residual(s, theta, q);
    if (r < best) {
      best = r;
      best_s = s;
      best_t = theta;
    }
    if (std::abs(ds) + std::abs(dt) < 1e-16) break;
  }
  return {best_s, best_t};
}

}  // namespace

std::vector<FixedPoint> interior_fixed_points(const ReducedParams& q) {
  q.validate();
  if (!(q.omega > 0.0)) throw ConfigError("interior_fixed_points requires omega > 0");

  std::vector<FixedPoint> out;
  for (const PolynomialRoot& root : real_roots(cubic_coefficients(q))) {
    const double s = root.value;
    if (!(s > -1.0 && s < 1.0 - 1e-9)) continue;
    const double root_1ms = std::sqrt(1.0 - s);
    double sin_t = -q.gamma * root_1ms / (2.0 * q.omega);
    if (std::abs(sin_t) > 1.0 + 1e-9) continue;
    sin_t = std::clamp(sin_t, -1.0, 1.0);

    std::vector<double> candidates;
    if (std::abs(1.0 - 3.0 * s) > 1e-6) {
      const double cos_t = 4.0 * (q.c * s - q.r) * root_1ms / (q.omega * (1.0 - 3.0 * s));
      candidates.push_back(std::atan2(sin_t, cos_t));
    } else {
      // The phase equation no longer fixes cos(theta); both branches of sin.
      candidates.push_back(std::asin(sin_t));
      candidates.push_back(std::numbers::pi - std::asin(sin_t));
    }

    for (double theta0 : candidates) {
      const auto [ps, pt] = polish_fixed_point(s, theta0, q);
      if (std::abs(ps - s) > 1e-4 || angle_distance(pt, theta0) > 1e-3) continue;
      if (!(ps > -1.0 && ps < 1.0 - 1e-9)) continue;
      if (field_residual(ps, pt, q) >= kResidualTol) continue;
      const FixedPoint fp = make_fixed_point(ps, pt, q, false, root.multiplicity);
      const bool duplicate = std::any_of(out.begin(), out.end(), [&](const FixedPoint& other) {
        return std::abs(other.s - fp.s) < kDuplicateTol && angle_distance(other.theta, fp.theta) < kDuplicateTol;
      });
      if (!duplicate) out.push_back(fp);
    }
  }
  std::sort(out.begin(), out.end(), [](const FixedPoint& x, const FixedPoint& y) {
    return x.s != y.s ? x.s < y.s : x.theta < y.theta;
  });
  return out;
}

std::optional<FixedPoint> boundary_fixed_point(const ReducedParams& q) {
  q.validate();
  if (!(q.omega > 0.0)) throw ConfigError("boundary_fixed_point requires omega > 0");
  const double arg = -std::numbers::sqrt2 * (q.c + q.r) / q.omega;
  if (std::abs(arg) > 1.0) return std::nullopt;
  // At S = -1 the population equation vanishes identically; the Jacobian in
  // p = 1 + S is lower triangular and only p >= 0 is physical.
  return make_fixed_point(-1.0, std::acos(arg), q, true, 1);
}

std::optional<double> threshold_gamma_closed_form(double c, double r, double omega) {
  const double radicand = 2.0 * omega * omega - 4.0 * (c + r) * (c + r);
  if (radicand < 0.0) return std::nullopt;
  return std::sqrt(radicand);
}

std::optional<double> threshold_gamma_bisection(double c, double r, double omega) {
  auto value_at_bottom = [&](double gamma) { return cubic_coefficients(ReducedParams{c, omega, r, gamma})(-1.0); };
  const double at_zero = value_at_bottom(0.0);
  if (at_zero < 0.0) return std::nullopt;
  if (at_zero == 0.0) return 0.0;
  double lo = 0.0;
  double hi = std::max(1.0, omega);
  while (value_at_bottom(hi) > 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (value_at_bottom(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::optional<double> threshold_gamma(double c, double r, double omega) {
  if (!(omega > 0.0)) throw ConfigError("threshold_gamma requires omega > 0");
  const auto closed = threshold_gamma_closed_form(c, r, omega);
  const auto bisected = threshold_gamma_bisection(c, r, omega);
  if (closed.has_value() != bisected.has_value() ||
      (closed && std::abs(*closed - *bisected) > 1e-6)) {
    throw NumericalError("threshold_gamma: closed form and bisection disagree", 0.0);
  }
  return closed;
}

}  // namespace amc
