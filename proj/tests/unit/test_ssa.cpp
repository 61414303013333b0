#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "bankflow/errors.hpp"
#include "bankflow/ssa.hpp"
#include "test_support.hpp"

namespace bankflow::test {
namespace {

TEST(MixSeed, FrozenValues) {
  EXPECT_EQ(mix_seed(0, 0), 0x0ULL);
  EXPECT_EQ(mix_seed(0, 1), 0x5692161d100b05e5ULL);
  EXPECT_EQ(mix_seed(42, 0), 0xa759ea27d4727622ULL);
  EXPECT_EQ(mix_seed(42, 7), 0xbdbfb556329aee83ULL);
  EXPECT_EQ(mix_seed(0xdeadbeefULL, 12345), 0xf7a9fd95a2ad01e0ULL);
}

TEST(SamplePath, ZeroRatesHoldInitialLevels) {
  const auto g = two_state(0.0, 0.0, 7.0, 3.0);
  const auto path = sample_path(g, 1, 2.0, uniform_grid(2.0, 5));
  for (const auto& c : path.counts) EXPECT_EQ(c, (std::vector<std::int64_t>{7, 3}));
}

TEST(SamplePath, DeterministicForSeed) {
  const auto g = two_state(1.0, 2.0, 50.0);
  const auto grid = uniform_grid(3.0, 31);
  EXPECT_EQ(sample_path(g, 9, 3.0, grid).counts, sample_path(g, 9, 3.0, grid).counts);
  EXPECT_NE(sample_path(g, 9, 3.0, grid).counts, sample_path(g, 10, 3.0, grid).counts);
}

TEST(SamplePath, ConservesAndStaysNonnegative) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_closed_graph(rng, 6);
    for (auto& m : g.initial_levels) m = std::floor(m);
    std::int64_t n = 0;
    for (double m : g.initial_levels) n += static_cast<std::int64_t>(m);
    const auto path = sample_path(g, rng(), 4.0, uniform_grid(4.0, 9));
    for (const auto& c : path.counts) {
      EXPECT_EQ(std::accumulate(c.begin(), c.end(), std::int64_t{0}), n);
      for (auto x : c) EXPECT_GE(x, 0);
    }
  }
}

TEST(SamplePath, SourceOnlyAddsToFirstState) {
  StateGraph g;
  g.states = {"new", "old"};
  g.initial_levels = {0, 0};
  g.source_delta = 5.0;
  const auto path = sample_path(g, 3, 10.0, uniform_grid(10.0, 11));
  for (std::size_t s = 1; s < path.counts.size(); ++s) {
    EXPECT_GE(path.counts[s][0], path.counts[s - 1][0]);
    EXPECT_EQ(path.counts[s][1], 0);
  }
  EXPECT_GT(path.counts.back()[0], 0);
}

TEST(SamplePath, NonIntegerLevelsRejected) {
  EXPECT_THROW(sample_path(two_state(1.0, 0.0, 2.5), 1, 1.0, uniform_grid(1.0, 2)), DomainError);
}

TEST(Ensemble, DecayMeanWithinBand) {
  const auto g = two_state(1.0, 0.0, 100.0);
  const auto s = ensemble_mean(g, 10000, 2024, 1.0, uniform_grid(1.0, 2));
  const double expect = 100.0 * std::exp(-1.0);
  EXPECT_LE(std::abs(s.mean.back()[0] - expect), 3.5 * s.std_error.back()[0]);
  EXPECT_NEAR(s.mean.back()[0], 36.78794, 0.5);
}

TEST(Ensemble, ApproachesSteadyState) {
  // lambda = 1, mu = 2, N = 90: stationary split (60, 30).
  const auto g = two_state(1.0, 2.0, 90.0);
  const auto s = ensemble_mean(g, 4000, 5, 10.0, uniform_grid(10.0, 2));
  EXPECT_LE(std::abs(s.mean.back()[0] - 60.0), 3.5 * s.std_error.back()[0]);
  EXPECT_LE(std::abs(s.mean.back()[1] - 30.0), 3.5 * s.std_error.back()[1]);
}

TEST(Ensemble, WorkerCountDoesNotMatter) {
  const auto g = two_state(1.0, 2.0, 40.0, 5.0);
  const auto grid = uniform_grid(2.0, 9);
  const auto one = ensemble_mean(g, 301, 77, 2.0, grid, 1);
  for (std::size_t w : {2u, 3u, 8u}) {
    const auto many = ensemble_mean(g, 301, 77, 2.0, grid, w);
    EXPECT_EQ(one.mean, many.mean);
    EXPECT_EQ(one.std_error, many.std_error);
  }
}

TEST(Ensemble, StdErrorHalvesWhenReplicationsQuadruple) {
  const auto g = two_state(1.0, 0.0, 100.0);
  const auto grid = uniform_grid(1.0, 2);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto small = ensemble_mean(g, 1000, seed, 1.0, grid);
    const auto large = ensemble_mean(g, 4000, seed + 100, 1.0, grid);
    const double ratio = small.std_error.back()[0] / large.std_error.back()[0];
    EXPECT_GT(ratio, 2.0 / 2.0);
    EXPECT_LT(ratio, 2.0 * 2.0);
  }
}

TEST(Ensemble, SingleReplicationHasNoStdError) {
  const auto s = ensemble_mean(two_state(1.0, 0.0, 3.0), 1, 0, 1.0, uniform_grid(1.0, 2));
  EXPECT_TRUE(s.std_error.empty());
  EXPECT_THROW(ensemble_mean(two_state(1.0, 0.0, 3.0), 0, 0, 1.0, uniform_grid(1.0, 2)),
               DomainError);
}

TEST(CompareToOde, ZeroRatesPassEverywhere) {
  const auto g = two_state(0.0, 0.0, 4.0, 6.0);
  const auto grid = uniform_grid(1.0, 5);
  const auto report =
      compare_to_ode(g, ensemble_mean(g, 10, 1, 1.0, grid), integrate(g, 1.0, 1e-3, grid));
  EXPECT_TRUE(report.overall_pass);
  EXPECT_EQ(report.passed, report.cells.size());
}

TEST(CompareToOde, DecayPassesAndScaledFails) {
  const auto g = two_state(1.0, 0.0, 100.0);
  const auto grid = uniform_grid(2.0, 11);
  const auto summary = ensemble_mean(g, 10000, 11, 2.0, grid);
  auto traj = integrate(g, 2.0, 1e-3, grid);
  EXPECT_TRUE(compare_to_ode(g, summary, traj).overall_pass);
  for (auto& row : traj.levels) {
    for (auto& x : row) x *= 1.5;
  }
  EXPECT_FALSE(compare_to_ode(g, summary, traj).overall_pass);
}

TEST(CompareToOde, GridMismatch) {
  const auto g = two_state(1.0, 0.0, 10.0);
  const auto summary = ensemble_mean(g, 10, 1, 1.0, uniform_grid(1.0, 3));
  EXPECT_THROW(compare_to_ode(g, summary, integrate(g, 1.0, 1e-3, uniform_grid(1.0, 4))),
               DimensionError);
}

}  // namespace
}  // namespace bankflow::test
