#pragma once

// Exact event-by-event simulation of the population Markov process whose
// expectations obey the Kolmogorov equations, plus ensemble statistics.
//
// Reproducibility contract
// ------------------------
// Replication r of an ensemble seeded with s uses a std::mt19937_64 engine
// seeded with mix_seed(s, r), where
//
//   z = s ^ r
//   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//   z =  z ^ (z >> 31)
//
// (the SplitMix64 finalizer, all arithmetic modulo 2^64). sample_path seeds
// its engine with the seed as given. Each event consumes two engine outputs,
// converted to doubles in [0, 1) as (x >> 11) * 2^-53: the first gives the
// waiting time -log1p(-u) / R, the second selects the event.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bankflow/kolmogorov.hpp"
#include "bankflow/model.hpp"

namespace bankflow {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t replication) noexcept;

/// Integer levels on the output grid; counts[s][i] is the level of state i
/// at times[s].
struct SamplePath {
  std::vector<double> times;
  std::vector<std::vector<std::int64_t>> counts;
};

/// One path. An event landing exactly on a grid time is applied before that
/// time is sampled. Stops early when the total event rate is zero.
/// Throws DomainError if an initial level is not a nonnegative integer.
SamplePath sample_path(const StateGraph& graph, std::uint64_t seed, double t_end,
                       std::span<const double> output_grid);

struct EnsembleSummary {
  std::vector<double> times;
  std::vector<LevelVector> mean;
  /// Standard error of the mean; empty when replications < 2.
  std::vector<LevelVector> std_error;
  std::size_t replications = 0;
};

/// `workers` = 0 picks the hardware concurrency. Sums are accumulated as
/// exact integers, so the result does not depend on the worker count.
EnsembleSummary ensemble_mean(const StateGraph& graph, std::size_t replications,
                              std::uint64_t seed, double t_end,
                              std::span<const double> output_grid, std::size_t workers = 0);

struct ComparisonCell {
  double time;
  std::size_t state;
  double mean;
  double expected;
  double abs_diff;
  double std_error;
  bool pass;
};

struct ComparisonReport {
  std::vector<ComparisonCell> cells;
  std::size_t passed = 0;
  bool overall_pass = false;

  double pass_fraction() const noexcept {
    return cells.empty() ? 1.0 : static_cast<double>(passed) / static_cast<double>(cells.size());
  }
};

inline constexpr double kSigmaBand = 3.5;
inline constexpr double kAbsFloor = 1e-9;
inline constexpr double kRequiredPassFraction = 0.95;

/// A cell passes when |mean - expected| <= max(3.5 * stderr, 1e-9); the
/// report passes when at least 95% of cells do. Throws DimensionError if the
/// grids or state counts differ.
ComparisonReport compare_to_ode(const StateGraph& graph, const EnsembleSummary& summary,
                                const Trajectory& trajectory);

}  // namespace bankflow
