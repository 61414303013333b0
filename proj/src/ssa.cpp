#include "bankflow/ssa.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "bankflow/errors.hpp"
#include "bankflow/number.hpp"

namespace bankflow {

__extension__ using int128 = __int128;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t replication) noexcept {
  std::uint64_t z = seed ^ replication;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

double unit_interval(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<std::int64_t> integer_levels(const StateGraph& graph) {
  std::vector<std::int64_t> out(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const double m = graph.initial_levels[i];
    if (!(m >= 0.0 && m <= 9.0e15 && std::floor(m) == m)) {
      throw DomainError("stochastic simulation needs integer initial levels; state '" +
                        graph.states[i] + "' has " + format_number(m));
    }
    out[i] = static_cast<std::int64_t>(m);
  }
  return out;
}

// Calls `record(grid_index, levels)` for every grid time in order.
template <class Record>
void simulate(const StateGraph& graph, std::vector<std::int64_t> levels, std::uint64_t seed,
              double t_end, std::span<const double> grid, Record&& record) {
  std::mt19937_64 rng(seed);
  const auto& transitions = graph.transitions;
  const double delta = graph.source_delta;
  std::size_t g = 0;
  double t = 0.0;

  while (g < grid.size()) {
    double total = delta;
    for (const auto& tr : transitions) total += static_cast<double>(levels[tr.from]) * tr.rate;
    if (total <= 0.0) break;

    const double wait = -std::log1p(-unit_interval(rng)) / total;
    const double t_event = t + wait;
    while (g < grid.size() && grid[g] < t_event) record(g++, levels);
    if (g == grid.size() || t_event > t_end) break;

    // Pick the event proportionally to its rate: source first, then
    // transitions in declaration order.
    double target = unit_interval(rng) * total;
    t = t_event;
    if (target < delta) {
      ++levels[0];
      continue;
    }
    target -= delta;
    const Transition* chosen = nullptr;
    for (const auto& tr : transitions) {
      const double rate = static_cast<double>(levels[tr.from]) * tr.rate;
      if (rate <= 0.0) continue;
      chosen = &tr;
      if (target < rate) break;
      target -= rate;
    }
    // Rounding can leave target just past the last bucket; the last active
    // transition takes it.
    if (chosen == nullptr) {
      ++levels[0];
      continue;
    }
    --levels[chosen->from];
    ++levels[chosen->to];
  }
  while (g < grid.size()) record(g++, levels);
}

void check_controls(const StateGraph& graph, double t_end, std::span<const double> grid) {
  require_valid(graph);
  if (!(std::isfinite(t_end) && t_end > 0.0)) throw DomainError("t_end must be > 0");
  require_valid_grid(grid, t_end);
}

}  // namespace

SamplePath sample_path(const StateGraph& graph, std::uint64_t seed, double t_end,
                       std::span<const double> output_grid) {
  check_controls(graph, t_end, output_grid);
  auto levels = integer_levels(graph);
  SamplePath path;
  path.times.assign(output_grid.begin(), output_grid.end());
  path.counts.resize(output_grid.size());
  simulate(graph, std::move(levels), seed, t_end, output_grid,
           [&](std::size_t g, const std::vector<std::int64_t>& m) { path.counts[g] = m; });
  return path;
}

EnsembleSummary ensemble_mean(const StateGraph& graph, std::size_t replications,
                              std::uint64_t seed, double t_end,
                              std::span<const double> output_grid, std::size_t workers) {
  check_controls(graph, t_end, output_grid);
  if (replications == 0) throw DomainError("replications must be >= 1");
  const auto initial = integer_levels(graph);
  const std::size_t n = graph.size();
  const std::size_t cells = output_grid.size() * n;

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, replications);

  // Exact integer sums: the reduction is order independent.
  struct Accumulator {
    std::vector<int128> sum;
    std::vector<int128> sum_sq;
  };
  std::vector<Accumulator> acc(workers, Accumulator{std::vector<int128>(cells, 0),
                                                    std::vector<int128>(cells, 0)});
  auto run_worker = [&](std::size_t w) {
    auto& a = acc[w];
    for (std::size_t r = w; r < replications; r += workers) {
      simulate(graph, initial, mix_seed(seed, r), t_end, output_grid,
               [&](std::size_t g, const std::vector<std::int64_t>& m) {
                 for (std::size_t i = 0; i < n; ++i) {
                   const int128 v = m[i];
                   a.sum[g * n + i] += v;
                   a.sum_sq[g * n + i] += v * v;
                 }
               });
    }
  };
  if (workers == 1) {
    run_worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run_worker, w);
  }

  std::vector<int128> sum(cells, 0), sum_sq(cells, 0);
  for (const auto& a : acc) {
    for (std::size_t c = 0; c < cells; ++c) {
      sum[c] += a.sum[c];
      sum_sq[c] += a.sum_sq[c];
    }
  }

  EnsembleSummary out;
  out.times.assign(output_grid.begin(), output_grid.end());
  out.replications = replications;
  out.mean.assign(output_grid.size(), LevelVector(n));
  if (replications >= 2) out.std_error.assign(output_grid.size(), LevelVector(n));
  const auto reps = static_cast<int128>(replications);
  for (std::size_t g = 0; g < output_grid.size(); ++g) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = g * n + i;
      out.mean[g][i] = static_cast<double>(sum[c]) / static_cast<double>(replications);
      if (replications >= 2) {
        // R * sum(x^2) - (sum x)^2 = R (R - 1) * sample variance, exactly.
        const int128 spread = reps * sum_sq[c] - sum[c] * sum[c];
        const long double var = static_cast<long double>(spread) /
                                (static_cast<long double>(replications) *
                                 static_cast<long double>(replications - 1));
        out.std_error[g][i] =
            static_cast<double>(std::sqrt(var / static_cast<long double>(replications)));
      }
    }
  }
  return out;
}

ComparisonReport compare_to_ode(const StateGraph& graph, const EnsembleSummary& summary,
                                const Trajectory& trajectory) {
  const std::size_t n = graph.size();
  if (summary.times.size() != trajectory.times.size()) {
    throw DimensionError("ensemble has " + std::to_string(summary.times.size()) +
                         " grid times, trajectory has " +
                         std::to_string(trajectory.times.size()));
  }
  for (std::size_t g = 0; g < summary.times.size(); ++g) {
    const double a = summary.times[g];
    const double b = trajectory.times[g];
    if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) {
      throw DimensionError("grid mismatch at index " + std::to_string(g));
    }
    if (summary.mean[g].size() != n || trajectory.levels[g].size() != n) {
      throw DimensionError("state count mismatch at grid index " + std::to_string(g));
    }
  }

  ComparisonReport report;
  report.cells.reserve(summary.times.size() * n);
  for (std::size_t g = 0; g < summary.times.size(); ++g) {
    for (std::size_t i = 0; i < n; ++i) {
      ComparisonCell cell{};
      cell.time = summary.times[g];
      cell.state = i;
      cell.mean = summary.mean[g][i];
      cell.expected = trajectory.levels[g][i];
      cell.abs_diff = std::abs(cell.mean - cell.expected);
      cell.std_error = summary.std_error.empty() ? 0.0 : summary.std_error[g][i];
      cell.pass = cell.abs_diff <= std::max(kSigmaBand * cell.std_error, kAbsFloor);
      report.passed += cell.pass ? 1 : 0;
      report.cells.push_back(cell);
    }
  }
  report.overall_pass = report.pass_fraction() >= kRequiredPassFraction;
  return report;
}

}  // namespace bankflow
