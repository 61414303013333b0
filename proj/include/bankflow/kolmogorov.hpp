#pragma once

// Kolmogorov forward equations for the expected level of every state:
//
//   dm_i/dt = -m_i * sum_{k in out(i)} lambda_ik + sum_{l in in(i)} m_l * lambda_li  (+ delta if i = 0)

#include <span>
#include <vector>

#include "bankflow/model.hpp"

namespace bankflow {

/// Expected levels sampled on an output grid. levels[s][i] is m_i(times[s]).
struct Trajectory {
  std::vector<double> times;
  std::vector<LevelVector> levels;
};

/// Levels below -kNegativeTolerance abort integration.
inline constexpr double kNegativeTolerance = 1e-9;

/// Writes dm/dt into `out`. Each transition flow is subtracted from its source
/// and added to its target, so the components sum to delta up to rounding.
/// Throws DimensionError unless m and out both have one entry per state.
void kolmogorov_rhs(const StateGraph& graph, std::span<const double> m, std::span<double> out);
LevelVector kolmogorov_rhs(const StateGraph& graph, std::span<const double> m);

/// Fixed-step RK4 from the graph's initial levels, landing exactly on every
/// grid time. Throws DomainError on bad controls and NumericError when a
/// level drops below -kNegativeTolerance or stops being finite.
Trajectory integrate(const StateGraph& graph, double t_end, double dt,
                     std::span<const double> output_grid);

/// Limiting levels with sum N: the balance equations with one row replaced by
/// the normalization, solved by Gaussian elimination with partial pivoting.
/// Throws UnsupportedModelError when delta > 0 and NonUniqueSteadyStateError
/// when the graph has more than one closed class.
LevelVector steady_state(const StateGraph& graph, double population);

/// max over samples of |sum_i m_i(t) - (N + delta t)|.
double check_conservation(const Trajectory& trajectory, const StateGraph& graph);

}  // namespace bankflow
