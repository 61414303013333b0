#include "bankflow/kolmogorov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bankflow/errors.hpp"
#include "bankflow/number.hpp"
#include "bankflow/rk4.hpp"

namespace bankflow {

void kolmogorov_rhs(const StateGraph& graph, std::span<const double> m, std::span<double> out) {
  const std::size_t n = graph.size();
  if (m.size() != n || out.size() != n) {
    throw DimensionError("level vector has " + std::to_string(m.size()) + " entries, graph has " +
                         std::to_string(n) + " states");
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& t : graph.transitions) {
    const double flow = m[t.from] * t.rate;
    out[t.from] -= flow;
    out[t.to] += flow;
  }
  if (n > 0) out[0] += graph.source_delta;
}

LevelVector kolmogorov_rhs(const StateGraph& graph, std::span<const double> m) {
  LevelVector out(graph.size());
  kolmogorov_rhs(graph, m, out);
  return out;
}

namespace {

void check_levels(const StateGraph& graph, std::span<const double> m, double t) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m[i])) {
      throw NumericError("non-finite level in state '" + graph.states[i] + "' at t = " +
                         format_number(t));
    }
    if (m[i] < -kNegativeTolerance) {
      throw NumericError("level of state '" + graph.states[i] + "' fell to " +
                         format_number(m[i]) + " at t = " + format_number(t) +
                         " (step too large?)");
    }
  }
}

}  // namespace

Trajectory integrate(const StateGraph& graph, double t_end, double dt,
                     std::span<const double> output_grid) {
  require_valid(graph);
  if (!(std::isfinite(t_end) && t_end > 0.0)) throw DomainError("t_end must be > 0");
  if (!(std::isfinite(dt) && dt > 0.0 && dt <= t_end)) {
    throw DomainError("dt must satisfy 0 < dt <= t_end");
  }
  require_valid_grid(output_grid, t_end);

  auto rhs = [&graph](double, std::span<const double> y, std::span<double> dydt) {
    kolmogorov_rhs(graph, y, dydt);
  };

  Trajectory traj;
  traj.times.assign(output_grid.begin(), output_grid.end());
  traj.levels.reserve(output_grid.size());

  LevelVector y = graph.initial_levels;
  LevelVector k1(y.size()), next(y.size());
  traj.levels.push_back(y);

  for (std::size_t g = 1; g < output_grid.size(); ++g) {
    rk4::cover_interval(output_grid[g - 1], output_grid[g], dt, [&](double t, double t_next) {
      rhs(t, y, k1);
      rk4::step(rhs, t, y, k1, t_next - t, next);
      check_levels(graph, next, t_next);
      y.swap(next);
    });
    traj.levels.push_back(y);
  }
  return traj;
}

LevelVector steady_state(const StateGraph& graph, double population) {
  require_valid(graph);
  if (graph.source_delta > 0.0) {
    throw UnsupportedModelError(
        "steady state is undefined with a positive source: the equations have no sink");
  }
  if (!(std::isfinite(population) && population >= 0.0)) {
    throw DomainError("population must be finite and >= 0");
  }

  const std::size_t n = graph.size();
  // Row i of a holds the balance equation of state i; the last row is
  // replaced by the normalization sum m = N.
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n, 0.0);
  for (const auto& t : graph.transitions) {
    a[t.from][t.from] -= t.rate;
    a[t.to][t.from] += t.rate;
  }
  double scale = 1.0;
  for (const auto& row : a) {
    for (double v : row) scale = std::max(scale, std::abs(v));
  }
  std::fill(a[n - 1].begin(), a[n - 1].end(), 1.0);
  b[n - 1] = population;

  const double pivot_tol =
      64.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) <= pivot_tol) {
      throw NonUniqueSteadyStateError(
          "balance system is singular: the graph has more than one closed class");
    }
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }

  LevelVector m(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * m[c];
    m[i] = s / a[i][i];
  }
  // Transient states solve to zero up to rounding.
  const double zero_tol = 1e-12 * std::max(1.0, population);
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i] < 0.0) {
      if (m[i] < -zero_tol) {
        throw NumericError("steady state of '" + graph.states[i] + "' is negative (" +
                           format_number(m[i]) + ")");
      }
      m[i] = 0.0;
    }
  }
  return m;
}

double check_conservation(const Trajectory& trajectory, const StateGraph& graph) {
  const double n0 = total_population(graph);
  double worst = 0.0;
  for (std::size_t s = 0; s < trajectory.times.size(); ++s) {
    double total = 0.0;
    for (double m : trajectory.levels[s]) total += m;
    worst = std::max(worst,
                     std::abs(total - (n0 + graph.source_delta * trajectory.times[s])));
  }
  return worst;
}

}  // namespace bankflow
