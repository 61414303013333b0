#pragma once

// Delayed interaction between banks and clients:
//
//   dm_B/dt = -p_C * lambda_C * m_C(t - tau_C) * m_B(t) / m_B(t - delta_B)
//   dm_C/dt = -p_B * lambda_B * m_B(t - tau_B) * m_C(t) / m_C(t - delta_C)
//
// with constant pre-history m_B = N_B, m_C = N_C for t <= 0.

#include <deque>
#include <functional>
#include <vector>

#include "bankflow/model.hpp"

namespace bankflow {

struct InteractionLevels {
  double m_B = 0.0;
  double m_C = 0.0;
};

/// Delayed denominators at or below this value raise SingularityError.
inline constexpr double kSingularityGuard = 1e-12;

/// Append-only log of (t, m, dm/dt) samples with piecewise cubic Hermite
/// reconstruction between them. Times before 0 read the pre-history.
class InteractionHistory {
 public:
  struct Sample {
    double t;
    InteractionLevels m;
    InteractionLevels dm;
  };

  explicit InteractionHistory(InteractionLevels pre_history) : pre_(pre_history) {}

  /// Throws std::logic_error unless t is later than every stored sample.
  void append(double t, InteractionLevels m, InteractionLevels dm);

  /// Levels at time s. s <= 0 gives the pre-history; s may exceed the last
  /// sample by at most 1e-9 relative (the last piece is extended).
  InteractionLevels at(double s) const;

  /// Drops samples no longer needed to evaluate times >= `earliest`.
  void prune_before(double earliest);

  std::size_t size() const noexcept { return samples_.size(); }
  const std::deque<Sample>& samples() const noexcept { return samples_; }

 private:
  InteractionLevels pre_;
  std::deque<Sample> samples_;
};

/// Current pool levels plus the history needed for the largest lag.
struct InteractionState {
  double t = 0.0;
  InteractionLevels m;
  InteractionHistory history;
};

/// Returns (m_B(s), m_C(s)) for 0 <= s <= t.
using HistoryLookup = std::function<InteractionLevels(double)>;

/// Derivatives at time t. Delayed arguments at or before time 0 take the
/// constant pre-history (N_B, N_C); lambda_B and lambda_C are the constant
/// productivities of the config.
InteractionLevels interaction_rhs(const InteractionConfig& config, double t,
                                  const HistoryLookup& lookup);

struct InteractionTrajectory {
  std::vector<double> times;
  std::vector<double> m_B;
  std::vector<double> m_C;
};

/// Times in [0, t_end] where derivative discontinuities can sit: every sum
/// k1*tau_B + k2*tau_C + k3*delta_B + k4*delta_C with k1+...+k4 <= 3 over the
/// positive lags. Sorted, deduplicated, starts at 0.
std::vector<double> interaction_breakpoints(const InteractionConfig& config, double t_end);

/// Method of steps: RK4 between breakpoints and grid times, delayed values
/// read from the Hermite history. Requires dt <= smallest positive lag.
/// Throws SingularityError when a delayed denominator reaches the guard or a
/// level collapses faster than one step can resolve (dt * |dm/dt| > m).
InteractionTrajectory integrate_interaction(const InteractionConfig& config, double t_end,
                                            double dt, std::span<const double> output_grid);

}  // namespace bankflow
