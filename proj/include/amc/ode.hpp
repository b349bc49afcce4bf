// Explicit Runge-Kutta propagation of small fixed-size systems.
//
// Two methods share one driver: classical fixed-step RK4 and the adaptive
// Dormand-Prince 5(4) pair with standard PI-free step control. Steps are
// shortened (never lengthened) so that every output time is hit exactly.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include "amc/errors.hpp"

namespace amc {

enum class Method { rk4, dopri45 };

/// What the adaptive tolerance bounds: the local error per unit of time
/// (global error ~ tolerance x t_final) or per step (cheaper for stiff,
/// fast-oscillating runs whose frequency grows with the state).
enum class ErrorControl { per_unit_step, per_step };

struct IntegratorConfig {
  Method method = Method::dopri45;
  double dt = 1e-3;  // rk4 step
  double rtol = 1e-10;
  double atol = 1e-10;
  double t_final = 10.0;
  double record_every = 0.05;  // 0 records every internal step
  ErrorControl error_control = ErrorControl::per_unit_step;

  void validate() const;
  bool operator==(const IntegratorConfig&) const = default;
};

template <std::size_t N>
using OdeState = std::array<double, N>;

/// How an integration ended.
struct IntegrationStatus {
  double t_end = 0.0;
  bool halted = false;  // stopped early: DomainError in f, or the stop predicate fired
};

namespace detail {

template <std::size_t N>
OdeState<N> axpy(const OdeState<N>& y, double h, std::initializer_list<std::pair<double, const OdeState<N>*>> terms) {
  OdeState<N> out = y;
  for (const auto& [coef, k] : terms) {
    if (coef == 0.0) continue;
    for (std::size_t i = 0; i < N; ++i) out[i] += h * coef * (*k)[i];
  }
  return out;
}

template <std::size_t N>
bool all_finite(const OdeState<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

class OutputClock {
 public:
  OutputClock(double t_final, double every) : t_final_(t_final), every_(every) {}

  // Next time at which the solution must be sampled.
  double next() const {
    if (every_ <= 0.0) return t_final_;
    const double t = static_cast<double>(k_ + 1) * every_;
    return std::min(t, t_final_);
  }
  bool due(double t) const { return every_ <= 0.0 || t == next(); }
  void advance() { ++k_; }

 private:
  double t_final_;
  double every_;
  long long k_ = 0;
};

}  // namespace detail

/// Propagates y' = f(t, y) from t = 0 to cfg.t_final and reports samples to
/// `observer(t, y)`, starting with the initial state. A DomainError thrown by
/// `f` inside a trial step rejects the step; if the step cannot be shrunk
/// further the integration halts at the last accepted time. `stop(t, y)` is
/// checked after every accepted step; when it fires the state is reported
/// and the integration halts.
///
/// By default the adaptive method controls the error per unit step (per step
/// when h > 1), so the global error stays near the tolerance times t_final.
template <std::size_t N, class Rhs, class Observer, class Stop>
IntegrationStatus integrate(Rhs&& f, OdeState<N> y, const IntegratorConfig& cfg, Observer&& observer, Stop&& stop) {
  cfg.validate();
  double t = 0.0;
  observer(t, y);
  if (stop(t, y)) return IntegrationStatus{t, true};
  detail::OutputClock clock(cfg.t_final, cfg.record_every);

  auto min_step = [](double time) { return 1e-14 * std::max(1.0, std::abs(time)); };

  // Reports the state if due at `time`; returns true when stop fired.
  auto emit = [&](double time, const OdeState<N>& state) {
    const bool due = clock.due(time);
    const bool halt = stop(time, state);
    if (due || halt) observer(time, state);
    if (due) clock.advance();
    return halt;
  };

  if (cfg.method == Method::rk4) {
    while (t < cfg.t_final) {
      const double h = std::min(cfg.dt, clock.next() - t);
      OdeState<N> y_new;
      try {
        const OdeState<N> k1 = f(t, y);
        const OdeState<N> k2 = f(t + 0.5 * h, detail::axpy<N>(y, h, {{0.5, &k1}}));
        const OdeState<N> k3 = f(t + 0.5 * h, detail::axpy<N>(y, h, {{0.5, &k2}}));
        const OdeState<N> k4 = f(t + h, detail::axpy<N>(y, h, {{1.0, &k3}}));
        y_new = detail::axpy<N>(y, h, {{1.0 / 6, &k1}, {1.0 / 3, &k2}, {1.0 / 3, &k3}, {1.0 / 6, &k4}});
        f(t + h, y_new);  // domain check of the accepted state
      } catch (const DomainError&) {
        return IntegrationStatus{t, true};
      }
      if (!detail::all_finite(y_new)) throw NumericalError("non-finite state", t);
      const double next = clock.next();
      t = (h == next - t) ? next : t + h;
      y = y_new;
      if (emit(t, y)) return IntegrationStatus{t, true};
    }
    return IntegrationStatus{t, false};
  }

  // Dormand-Prince 5(4) tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  OdeState<N> k1;
  try {
    k1 = f(t, y);
  } catch (const DomainError&) {
    return IntegrationStatus{t, true};
  }

  double h = std::min({1e-3, cfg.t_final, cfg.record_every > 0.0 ? cfg.record_every : cfg.t_final});
  bool last_rejected = false;

  while (t < cfg.t_final) {
    const double next = clock.next();
    const bool clamped = h >= next - t;
    const double h_step = clamped ? next - t : h;

    OdeState<N> y_new, k7;
    double err = std::numeric_limits<double>::infinity();
    bool domain_failure = false;
    try {
      const OdeState<N> k2 = f(t + c2 * h_step, detail::axpy<N>(y, h_step, {{a21, &k1}}));
      const OdeState<N> k3 = f(t + c3 * h_step, detail::axpy<N>(y, h_step, {{a31, &k1}, {a32, &k2}}));
      const OdeState<N> k4 =
          f(t + c4 * h_step, detail::axpy<N>(y, h_step, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const OdeState<N> k5 =
          f(t + c5 * h_step, detail::axpy<N>(y, h_step, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const OdeState<N> k6 = f(t + h_step, detail::axpy<N>(y, h_step, {{a61, &k1}, {a62, &k2}, {a63, &k3},
                                                                       {a64, &k4}, {a65, &k5}}));
      y_new = detail::axpy<N>(y, h_step, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      k7 = f(t + h_step, y_new);

      // One scale for all components: a component crossing zero while the
      // others are large would otherwise fall to the atol floor and stall
      // the controller on rounding noise.
      double size = 0.0;
      for (std::size_t i = 0; i < N; ++i) size = std::max({size, std::abs(y[i]), std::abs(y_new[i])});
      const double scale = cfg.atol + cfg.rtol * size;
      double sum = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double e = h_step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        sum += (e / scale) * (e / scale);
      }
      err = std::sqrt(sum / static_cast<double>(N));
      if (cfg.error_control == ErrorControl::per_unit_step) err /= std::min(h_step, 1.0);
      if (!std::isfinite(err) || !detail::all_finite(y_new)) err = std::numeric_limits<double>::infinity();
    } catch (const DomainError&) {
      domain_failure = true;
    }

    if (err <= 1.0) {
      t = clamped ? next : t + h_step;
      y = y_new;
      k1 = k7;
      if (emit(t, y)) return IntegrationStatus{t, true};
      double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.25), 0.2, 5.0);
      if (last_rejected) factor = std::min(factor, 1.0);
      const double proposal = h_step * factor;
      h = clamped ? std::max(h, proposal) : proposal;
      last_rejected = false;
    } else {
      const double factor = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.25), 0.2, 0.9) : 0.2;
      h = h_step * factor;
      last_rejected = true;
      if (h < min_step(t)) {
        if (domain_failure) return IntegrationStatus{t, true};
        throw NumericalError("step size underflow: tolerance cannot be met", t);
      }
    }
  }
  return IntegrationStatus{t, false};
}

template <std::size_t N, class Rhs, class Observer>
IntegrationStatus integrate(Rhs&& f, const OdeState<N>& y, const IntegratorConfig& cfg, Observer&& observer) {
  return integrate<N>(std::forward<Rhs>(f), y, cfg, std::forward<Observer>(observer),
                      [](double, const OdeState<N>&) { return false; });
}

}  // namespace amc
