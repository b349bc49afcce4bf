#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "amc/fixed_points.hpp"
#include "oracles.hpp"

using namespace amc;
using doctest::Approx;

namespace {

oracle::Flow flow(const ReducedParams& q) { return {q.c, q.omega, q.r, q.gamma}; }

ReducedParams random_params() {
  return ReducedParams{oracle::uniform(-3, 3), oracle::uniform(0.2, 2), oracle::uniform(-2, 2), oracle::uniform(-2, 2)};
}

std::vector<StabilityKind> kinds_of(const std::vector<FixedPoint>& fps) {
  std::vector<StabilityKind> out;
  for (const FixedPoint& fp : fps) out.push_back(fp.kind);
  return out;
}

}  // namespace

TEST_CASE("cubic coefficients") {
  const CubicCoefficients p = cubic_coefficients(ReducedParams{0, 1, 0, 0});
  CHECK(p.c3 == 0.0);
  CHECK(p.c2 == 36.0);
  CHECK(p.c1 == -24.0);
  CHECK(p.c0 == 4.0);

  CHECK(std::abs(cubic_coefficients(ReducedParams{0, 1, 0, std::sqrt(2.0)})(-1.0)) < 1e-12);

  for (int i = 0; i < 500; ++i) {
    const ReducedParams q = random_params();
    const CubicCoefficients c = cubic_coefficients(q);
    const double at_bottom = -32 * q.gamma * q.gamma + 64 * q.omega * q.omega - 128 * (q.c + q.r) * (q.c + q.r);
    CHECK(c(-1.0) == Approx(at_bottom).epsilon(1e-12).scale(1.0));
    CHECK(c(1.0) == Approx(16 * q.omega * q.omega).epsilon(1e-12).scale(1.0));
    CHECK(c.c3 >= 0.0);

    // Independent elimination of the phase, evaluated pointwise.
    const CubicCoefficients e = eliminate_phase(q);
    for (double s : {-0.9, -0.3, 0.2, 0.7}) {
      const double ref = oracle::fixed_point_polynomial(s, flow(q));
      CHECK(c(s) == Approx(ref).epsilon(1e-12).scale(1.0));
      CHECK(e(s) == Approx(ref).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("real roots match sign-change bisection") {
  for (int i = 0; i < 1000; ++i) {
    const ReducedParams q = random_params();
    const CubicCoefficients c = cubic_coefficients(q);
    const auto ref = oracle::bisection_roots([&](double s) { return c(s); }, -1.0, 1.0);
    std::vector<double> found;
    for (const PolynomialRoot& r : real_roots(c)) {
      if (r.value > -1.0 && r.value < 1.0 && r.multiplicity % 2 == 1) found.push_back(r.value);
    }
    REQUIRE(found.size() == ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) CHECK(std::abs(found[k] - ref[k]) < 1e-8);
  }
}

TEST_CASE("degenerate cubics reduce in degree") {
  // Gamma = C = 0: quadratic 4 (3S - 1)^2 with a double root.
  auto roots = real_roots(cubic_coefficients(ReducedParams{0, 1, 0, 0}));
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].value == Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(roots[0].multiplicity == 2);
  // Only a constant term left.
  CHECK(real_roots(CubicCoefficients{0, 0, 0, 3}).empty());
  roots = real_roots(CubicCoefficients{0, 0, 2, -1});
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].value == Approx(0.5));
}

TEST_CASE("loss family fixed points at S = 1/3") {
  auto fps = interior_fixed_points(ReducedParams{0, 1, 0, 0});
  REQUIRE(fps.size() == 2);
  CHECK(fps[0].s == Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(fps[1].s == Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(fps[0].theta) < 1e-12);
  CHECK(fps[1].theta == Approx(oracle::kPi).epsilon(1e-12));
  CHECK(fps[0].kind == StabilityKind::center);
  CHECK(fps[1].kind == StabilityKind::center);
  CHECK(fps[0].multiplicity == 2);

  for (double g : {0.3, 0.9, 1.0, 1.5}) {
    fps = interior_fixed_points(ReducedParams{0, 1, 0, g});
    std::vector<double> thetas;
    for (const FixedPoint& fp : fps) {
      if (std::abs(fp.s - 1.0 / 3.0) < 1e-9) thetas.push_back(fp.theta);
    }
    REQUIRE(thetas.size() == 2);
    std::sort(thetas.begin(), thetas.end());
    CHECK(std::abs(thetas[0] - (oracle::kPi + std::asin(g / std::sqrt(6.0)))) < 1e-9);
    CHECK(std::abs(thetas[1] - (2 * oracle::kPi - std::asin(g / std::sqrt(6.0)))) < 1e-9);
  }
  // Past Gamma = sqrt2 a saddle has entered through S = -1.
  fps = interior_fixed_points(ReducedParams{0, 1, 0, 1.5});
  REQUIRE(fps.size() == 3);
  CHECK(fps[0].s == Approx(1.0 - 4.0 / 2.25).epsilon(1e-12));
  CHECK(fps[0].theta == Approx(1.5 * oracle::kPi).epsilon(1e-12));
  CHECK(fps[0].kind == StabilityKind::saddle);
}

TEST_CASE("three-point and one-point censuses") {
  auto fps = interior_fixed_points(ReducedParams{2, 1, 0, 0});
  const auto ref = oracle::bisection_roots([](double s) { return 64 * s * s * s - 55 * s * s - 6 * s + 1; }, -1, 1);
  REQUIRE(ref.size() == 3);
  REQUIRE(fps.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(fps[k].s - ref[k]) < 1e-10);
  CHECK(fps[0].s == Approx(-0.177).epsilon(2e-3));
  CHECK(fps[1].s == Approx(0.094).epsilon(2e-3));
  CHECK(fps[2].s == Approx(0.941).epsilon(2e-3));
  for (const FixedPoint& fp : fps) CHECK(std::abs(std::sin(fp.theta)) < 1e-12);
  // Kinds from the finite-difference Jacobian: det < 0 is a saddle.
  for (const FixedPoint& fp : fps) {
    const auto j = oracle::fd_jacobian(fp.s, fp.theta, {2, 1, 0, 0});
    const bool saddle = j[0] * j[3] - j[1] * j[2] < 0;
    CHECK((fp.kind == StabilityKind::saddle) == saddle);
    if (!saddle) CHECK(fp.kind == StabilityKind::center);
  }
  auto kinds = kinds_of(fps);
  CHECK(std::count(kinds.begin(), kinds.end(), StabilityKind::center) == 2);
  CHECK(std::count(kinds.begin(), kinds.end(), StabilityKind::saddle) == 1);

  fps = interior_fixed_points(ReducedParams{0, 1, 1, 0});
  REQUIRE(fps.size() == 1);
  CHECK(fps[0].s == Approx((-10 + std::sqrt(100.0 + 540.0)) / 18).epsilon(1e-12));
  CHECK(std::abs(fps[0].theta) < 1e-12);
  CHECK_FALSE(boundary_fixed_point(ReducedParams{0, 1, 1, 0}).has_value());

  fps = interior_fixed_points(ReducedParams{0, 1, -1, 0});
  REQUIRE(fps.size() == 1);
  CHECK(fps[0].theta == Approx(oracle::kPi).epsilon(1e-12));
}

TEST_CASE("every reported point solves the raw equations") {
  for (int i = 0; i < 1000; ++i) {
    const ReducedParams q = random_params();
    for (const FixedPoint& fp : interior_fixed_points(q)) {
      const auto f = oracle::field(fp.s, fp.theta, flow(q));
      CHECK(std::max(std::abs(f[0]), std::abs(f[1])) < 1e-9);
      CHECK(fp.residual < 1e-9);
      CHECK(fp.s > -1.0);
      CHECK(fp.s < 1.0);
      CHECK(fp.theta >= 0.0);
      CHECK(fp.theta < 2 * oracle::kPi);
      CHECK(fp.eigenvalues[0].real() + fp.eigenvalues[1].real() == Approx(2 * q.gamma * fp.s).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("grid winding-number scan finds no unreported fixed point") {
  const double margin = 1e-3;
  for (int i = 0; i < 6; ++i) {
    const ReducedParams q = i == 0 ? ReducedParams{2, 1, 0, 0} : random_params();
    const auto fps = interior_fixed_points(q);
    const auto cells = oracle::winding_cells(flow(q), 400, 400, -0.999, 0.999);
    for (const auto& cell : cells) {
      const bool covered = std::any_of(fps.begin(), fps.end(), [&](const FixedPoint& fp) {
        return fp.s >= cell[0] - margin && fp.s <= cell[1] + margin && fp.theta >= cell[2] - margin &&
               fp.theta <= cell[3] + margin;
      });
      CHECK_MESSAGE(covered, "unreported fixed point near s = " << cell[0] << ", theta = " << cell[2]);
    }
    // Conversely every non-degenerate point shows up as a winding cell.
    for (const FixedPoint& fp : fps) {
      if (fp.s <= -0.998 || fp.s >= 0.998) continue;
      const bool seen = std::any_of(cells.begin(), cells.end(), [&](const auto& cell) {
        return fp.s >= cell[0] - margin && fp.s <= cell[1] + margin && fp.theta >= cell[2] - margin &&
               fp.theta <= cell[3] + margin;
      });
      CHECK(seen);
    }
  }
}

TEST_CASE("Jacobian trace identity and finite differences") {
  for (int i = 0; i < 1000; ++i) {
    const ReducedParams q = random_params();
    const double s = oracle::uniform(-0.99, 0.99);
    const double t = oracle::uniform(0, 2 * oracle::kPi);
    const Matrix2 j = jacobian(s, t, q);
    CHECK(std::abs(j.trace() - 2 * q.gamma * s) < 1e-12);
    CHECK(std::abs(j.a11 + j.a22 - 2 * q.gamma * s) < 1e-12);
  }
  for (int i = 0; i < 100; ++i) {
    const ReducedParams q = random_params();
    const double s = oracle::uniform(-0.95, 0.95);
    const double t = oracle::uniform(0, 2 * oracle::kPi);
    const Matrix2 j = jacobian(s, t, q);
    const auto fd = oracle::fd_jacobian(s, t, flow(q));
    const double an[4] = {j.a11, j.a12, j.a21, j.a22};
    double num = 0.0, den = 0.0;
    for (int k = 0; k < 4; ++k) {
      num += (an[k] - fd[k]) * (an[k] - fd[k]);
      den += an[k] * an[k];
    }
    CHECK(std::sqrt(num / den) < 1e-5);
  }
  CHECK_THROWS_AS(jacobian(1.0, 0.0, ReducedParams{}), DomainError);
}

TEST_CASE("classification of constructed matrices") {
  auto make = [](double a11, double a12, double a21, double a22) {
    return Matrix2{a11, a12, a21, a22};
  };
  CHECK(classify(make(0, 1, -1, 0)) == StabilityKind::center);
  CHECK(classify(make(-0.1, 1, -1, -0.1)) == StabilityKind::spiral_attractor);
  CHECK(classify(make(0.1, 1, -1, 0.1)) == StabilityKind::spiral_repeller);
  CHECK(classify(make(-1, 0, 0, -2)) == StabilityKind::node_attractor);
  CHECK(classify(make(1, 0, 0, 2)) == StabilityKind::node_repeller);
  CHECK(classify(make(1, 0, 0, -2)) == StabilityKind::saddle);
  CHECK(classify(make(0, 0, 0, 0)) == StabilityKind::indeterminate);
  CHECK(classify(make(0, 1, 0, 0)) == StabilityKind::indeterminate);
  CHECK(to_string(StabilityKind::spiral_attractor) == "spiral-attractor");
}

TEST_CASE("trace identity decides attractors and repellers") {
  for (int i = 0; i < 1000; ++i) {
    ReducedParams q = random_params();
    if (i % 4 == 0) q.gamma = 0.0;
    for (const FixedPoint& fp : interior_fixed_points(q)) {
      if (fp.kind == StabilityKind::saddle || fp.kind == StabilityKind::indeterminate) continue;
      const double gs = q.gamma * fp.s;
      if (q.gamma == 0.0) {
        CHECK_FALSE(is_attractor(fp.kind));
        CHECK_FALSE(is_repeller(fp.kind));
      } else if (gs > 1e-6) {
        CHECK(is_repeller(fp.kind));
      } else if (gs < -1e-6) {
        CHECK(is_attractor(fp.kind));
      }
    }
  }
  auto fps = interior_fixed_points(ReducedParams{0, 1, 0, 0.5});
  for (const FixedPoint& fp : fps) CHECK(is_repeller(fp.kind));
  fps = interior_fixed_points(ReducedParams{0, 1, 0, -0.5});
  for (const FixedPoint& fp : fps) CHECK(is_attractor(fp.kind));
}

TEST_CASE("no critical decoherence strength") {
  for (double mag : {1e-3, 1e-2, 0.1}) {
    for (double sign : {-1.0, 1.0}) {
      const double g = sign * mag;
      for (const FixedPoint& fp : interior_fixed_points(ReducedParams{0, 1, 0, g})) {
        const double re = fp.max_real_part();
        CHECK(re * g > 0.0);
        CHECK(re == Approx(g / 3).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("boundary fixed point") {
  auto b = boundary_fixed_point(ReducedParams{0, 1, 0, 0});
  REQUIRE(b.has_value());
  CHECK(b->s == -1.0);
  CHECK(b->theta == Approx(oracle::kPi / 2));
  CHECK(b->on_boundary);
  b = boundary_fixed_point(ReducedParams{-1 / std::sqrt(8.0), 1, -1 / std::sqrt(8.0), 0});
  REQUIRE(b.has_value());
  CHECK(std::abs(b->theta) < 1e-7);
  CHECK_FALSE(boundary_fixed_point(ReducedParams{0, 1, 1, 0}).has_value());
  for (int i = 0; i < 200; ++i) {
    const ReducedParams q = random_params();
    const auto bp = boundary_fixed_point(q);
    CHECK(bp.has_value() == (std::abs(std::sqrt(2.0) * (q.c + q.r)) <= q.omega));
    if (!bp) continue;
    const auto f = oracle::field(-1.0, bp->theta, flow(q));
    CHECK(std::abs(f[0]) < 1e-12);
    CHECK(std::abs(f[1]) < 1e-9);
    CHECK(bp->eigenvalues[0].real() + bp->eigenvalues[1].real() == Approx(-2 * q.gamma).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("decoherence threshold") {
  auto g = threshold_gamma(0, 0, 1);
  REQUIRE(g.has_value());
  CHECK(std::abs(*g - std::sqrt(2.0)) < 1e-6);
  g = threshold_gamma(1 / std::sqrt(8.0), 1 / std::sqrt(8.0), 1);
  REQUIRE(g.has_value());
  CHECK(std::abs(*g) < 1e-6);
  g = threshold_gamma(0.2, 0.1, 1);
  REQUIRE(g.has_value());
  CHECK(*g == Approx(std::sqrt(1.64)).epsilon(1e-9));
  CHECK_FALSE(threshold_gamma(1, 1, 1).has_value());

  int tested = 0;
  while (tested < 50) {
    const double c = oracle::uniform(-1, 1), r = oracle::uniform(-1, 1), om = oracle::uniform(0.2, 2);
    if (2 * om * om - 4 * (c + r) * (c + r) < 0) continue;
    ++tested;
    const auto closed = threshold_gamma_closed_form(c, r, om);
    const auto bisect = threshold_gamma_bisection(c, r, om);
    REQUIRE(closed.has_value());
    REQUIRE(bisect.has_value());
    CHECK(std::abs(*closed - *bisect) < 1e-6);
    // At the threshold the cubic vanishes at the bottom of the phase space.
    CHECK(std::abs(cubic_coefficients(ReducedParams{c, om, r, *closed})(-1.0)) < 1e-9);
  }
}
