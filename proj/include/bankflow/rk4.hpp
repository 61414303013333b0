#pragma once

// Classical fixed-step fourth-order Runge-Kutta, shared by the Kolmogorov
// engine and the interaction integrator.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace bankflow::rk4 {

/// One step of size h from (t, y). `rhs(t, y, dydt)` fills dydt; `k1` is the
/// derivative already evaluated at (t, y).
template <class Rhs>
void step(Rhs&& rhs, double t, std::span<const double> y, std::span<const double> k1, double h,
          std::span<double> y_next) {
  const std::size_t n = y.size();
  std::vector<double> k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  rhs(t + 0.5 * h, std::span<const double>(tmp), std::span<double>(k2));
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  rhs(t + 0.5 * h, std::span<const double>(tmp), std::span<double>(k3));
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
  rhs(t + h, std::span<const double>(tmp), std::span<double>(k4));
  for (std::size_t i = 0; i < n; ++i) {
    y_next[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

/// Number of steps of at most `dt` covering [a, b]. The final step is the
/// shortened one; a remainder below 1e-9 of a step is absorbed by the last
/// full step instead of producing a sliver.
inline std::size_t steps_to_cover(double a, double b, double dt) {
  const double ratio = (b - a) / dt;
  auto steps = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
  return steps == 0 ? 1 : steps;
}

/// Walks [a, b] in steps of dt, landing exactly on b. Calls
/// `advance(t, t_next)` per step; times are computed from a to avoid drift.
template <class Advance>
void cover_interval(double a, double b, double dt, Advance&& advance) {
  const std::size_t steps = steps_to_cover(a, b, dt);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = a + static_cast<double>(s) * dt;
    const double t_next = (s + 1 == steps) ? b : a + static_cast<double>(s + 1) * dt;
    advance(t, t_next);
  }
}

}  // namespace bankflow::rk4
