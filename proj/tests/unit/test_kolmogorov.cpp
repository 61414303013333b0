#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "bankflow/errors.hpp"
#include "bankflow/kolmogorov.hpp"
#include "test_support.hpp"

namespace bankflow::test {
namespace {

StateGraph chain3() {
  StateGraph g;
  g.states = {"a", "b", "c"};
  g.initial_levels = {1, 1, 1};
  g.transitions = {{0, 1, 1.0}, {1, 2, 1.0}};
  return g;
}

StateGraph source_only(double delta, double m0) {
  StateGraph g;
  g.states = {"new"};
  g.initial_levels = {m0};
  g.source_delta = delta;
  return g;
}

TEST(KolmogorovRhs, Examples) {
  const auto g = two_state(2.0, 3.0, 1.0);
  EXPECT_EQ(kolmogorov_rhs(g, std::vector<double>{1, 0}), (LevelVector{-2, 2}));
  EXPECT_EQ(kolmogorov_rhs(source_only(5.0, 7.0), std::vector<double>{7}), (LevelVector{5}));
  EXPECT_EQ(kolmogorov_rhs(chain3(), std::vector<double>{1, 1, 1}), (LevelVector{-1, 0, 1}));
}

TEST(KolmogorovRhs, DimensionMismatch) {
  EXPECT_THROW(kolmogorov_rhs(chain3(), std::vector<double>{1, 1}), DimensionError);
}

// Components sum to delta for arbitrary levels.
TEST(KolmogorovRhs, MassBalance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> level(0.0, 1000.0);
  std::uniform_real_distribution<double> source(0.0, 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    auto g = random_closed_graph(rng, 10);
    if (trial % 2) g.source_delta = source(rng);
    LevelVector m(g.size());
    for (auto& x : m) x = level(rng);
    const auto d = kolmogorov_rhs(g, m);
    double sum = 0.0, scale = g.source_delta;
    for (std::size_t i = 0; i < d.size(); ++i) sum += d[i];
    for (const auto& t : g.transitions) scale += m[t.from] * t.rate;
    const double n = static_cast<double>(g.size());
    EXPECT_LE(std::abs(sum - g.source_delta),
              n * n * std::numeric_limits<double>::epsilon() * std::max(1.0, scale));
  }
}

TEST(Integrate, DecayClosedForm) {
  const auto g = two_state(1.0, 0.0, 100.0);
  const auto traj = integrate(g, 1.0, 1e-3, uniform_grid(1.0, 11));
  EXPECT_EQ(traj.times.back(), 1.0);
  EXPECT_NEAR(traj.levels.back()[0], 100.0 * std::exp(-1.0), 1e-6);
  EXPECT_NEAR(traj.levels.back()[0], 36.78794, 1e-5);
}

TEST(Integrate, SourceGrowsLinearly) {
  const auto traj = integrate(source_only(2.0, 0.0), 3.0, 1e-3, uniform_grid(3.0, 4));
  EXPECT_NEAR(traj.levels.back()[0], 6.0, 1e-9);
}

TEST(Integrate, TwoStateRelaxation) {
  const auto traj = integrate(two_state(1.0, 1.0, 1.0), 5.0, 1e-3, uniform_grid(5.0, 51));
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    EXPECT_NEAR(traj.levels[s][0], 0.5 * (1.0 + std::exp(-2.0 * traj.times[s])), 1e-10);
  }
  EXPECT_NEAR(traj.levels.back()[0], 0.5000227, 1e-7);
}

TEST(Integrate, InitialSampleIsInitialLevels) {
  const auto g = chain3();
  const auto traj = integrate(g, 1.0, 0.01, uniform_grid(1.0, 3));
  EXPECT_EQ(traj.levels.front(), g.initial_levels);
}

TEST(Integrate, LandsOnIrregularGrid) {
  const auto g = two_state(1.0, 0.0, 100.0);
  const std::vector<double> grid{0.0, 0.0004, 0.3337, 1.0};
  const auto traj = integrate(g, 1.0, 1e-3, grid);
  ASSERT_EQ(traj.times, grid);
  for (std::size_t s = 0; s < grid.size(); ++s) {
    EXPECT_NEAR(traj.levels[s][0], 100.0 * std::exp(-grid[s]), 1e-9);
  }
}

TEST(Integrate, BitIdenticalAcrossRuns) {
  std::mt19937_64 rng(5);
  const auto g = random_closed_graph(rng, 8);
  const auto a = integrate(g, 2.0, 1e-3, uniform_grid(2.0, 17));
  const auto b = integrate(g, 2.0, 1e-3, uniform_grid(2.0, 17));
  EXPECT_EQ(a.levels, b.levels);
}

TEST(Integrate, StepTooLargeAborts) {
  const auto g = two_state(100.0, 0.0, 1.0);
  try {
    integrate(g, 1.0, 0.1, uniform_grid(1.0, 11));
    FAIL() << "expected a numeric failure";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("'B'"), std::string::npos) << e.what();
  }
}

TEST(Integrate, BadControls) {
  const auto g = two_state(1.0, 0.0, 1.0);
  EXPECT_THROW(integrate(g, 0.0, 1e-3, std::vector<double>{0.0}), DomainError);
  EXPECT_THROW(integrate(g, 1.0, 2.0, uniform_grid(1.0, 3)), DomainError);
  EXPECT_THROW(integrate(g, 1.0, 1e-3, std::vector<double>{0.5, 1.0}), DomainError);
  auto bad = g;
  bad.transitions[0].rate = -1.0;
  EXPECT_THROW(integrate(bad, 1.0, 1e-3, uniform_grid(1.0, 3)), DomainError);
}

TEST(Integrate, HomogeneousOfDegreeOne) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = random_closed_graph(rng, 6);
    const auto grid = uniform_grid(3.0, 7);
    const auto base = integrate(g, 3.0, 1e-3, grid);
    const double c = 0.25 + trial;
    for (auto& m : g.initial_levels) m *= c;
    const auto scaled = integrate(g, 3.0, 1e-3, grid);
    for (std::size_t s = 0; s < grid.size(); ++s) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double expect = c * base.levels[s][i];
        EXPECT_LE(std::abs(scaled.levels[s][i] - expect), 1e-9 * std::max(1.0, std::abs(expect)));
      }
    }
  }
}

TEST(SteadyState, Examples) {
  const auto m = steady_state(two_state(1.0, 3.0, 1.0), 1.0);
  EXPECT_NEAR(m[0], 0.75, 1e-12);
  EXPECT_NEAR(m[1], 0.25, 1e-12);

  StateGraph ring;
  ring.states = {"x", "y", "z"};
  ring.initial_levels = {3, 0, 0};
  ring.transitions = {{0, 1, 2.0}, {1, 2, 2.0}, {2, 0, 2.0}};
  for (double v : steady_state(ring, 3.0)) EXPECT_NEAR(v, 1.0, 1e-12);

  StateGraph bd;
  bd.states = {"0", "1", "2"};
  bd.initial_levels = {7, 0, 0};
  bd.transitions = {{0, 1, 1.0}, {1, 2, 1.0}, {1, 0, 2.0}, {2, 1, 2.0}};
  const auto p = steady_state(bd, 7.0);
  EXPECT_NEAR(p[0], 4.0, 1e-12);
  EXPECT_NEAR(p[1], 2.0, 1e-12);
  EXPECT_NEAR(p[2], 1.0, 1e-12);
}

TEST(SteadyState, TransientStatesDrainToZero) {
  StateGraph g;
  g.states = {"entry", "x", "y"};
  g.initial_levels = {5, 0, 0};
  g.transitions = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 1, 1.0}};
  const auto m = steady_state(g, 5.0);
  EXPECT_EQ(m[0], 0.0);
  EXPECT_NEAR(m[1], 2.5, 1e-12);
  EXPECT_NEAR(m[2], 2.5, 1e-12);
}

TEST(SteadyState, Errors) {
  EXPECT_THROW(steady_state(source_only(1.0, 0.0), 0.0), UnsupportedModelError);
  // Two absorbing states: two closed classes.
  StateGraph g;
  g.states = {"a", "b", "c"};
  g.initial_levels = {1, 0, 0};
  g.transitions = {{0, 1, 1.0}, {0, 2, 1.0}};
  EXPECT_THROW(steady_state(g, 1.0), NonUniqueSteadyStateError);
  // Isolated pair.
  EXPECT_THROW(steady_state(two_state(0.0, 0.0, 1.0), 1.0), NonUniqueSteadyStateError);
}

TEST(SteadyState, ResidualAndNormalization) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_irreducible_graph(rng, 2 + trial % 30);
    const double n = 1.0 + trial;
    const auto m = steady_state(g, n);
    const auto r = kolmogorov_rhs(g, m);
    double worst = 0.0, sum = 0.0;
    for (double x : r) worst = std::max(worst, std::abs(x));
    for (double x : m) {
      EXPECT_GE(x, 0.0);
      sum += x;
    }
    EXPECT_LE(worst, 1e-10 * std::max(1.0, n * g.max_rate()));
    EXPECT_LE(std::abs(sum - n), 1e-12 * n);
  }
}

TEST(SteadyState, LongHorizonIntegrationConverges) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    // Rings of at most 5 states with every rate >= 2 have a spectral gap
    // above 1.3, so T = 20 is far past the 1e-6 band.
    auto g = random_irreducible_graph(rng, 2 + trial % 4);
    for (auto& t : g.transitions) t.rate = 2.0 + t.rate;
    const double n = total_population(g);
    const auto target = steady_state(g, n);
    const auto traj = integrate(g, 20.0, default_step(g), uniform_grid(20.0, 3));
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_NEAR(traj.levels.back()[i], target[i], 1e-6) << "trial " << trial;
    }
  }
}

TEST(CheckConservation, Examples) {
  const auto closed = two_state(1.5, 0.5, 10.0, 3.0);
  EXPECT_LE(check_conservation(integrate(closed, 4.0, 1e-3, uniform_grid(4.0, 41)), closed), 1e-9);

  const auto src = source_only(2.0, 0.0);
  EXPECT_LE(check_conservation(integrate(src, 3.0, 1e-3, uniform_grid(3.0, 31)), src), 1e-9);

  const auto absorbing = two_state(0.7, 0.0, 42.0);
  EXPECT_LE(check_conservation(integrate(absorbing, 10.0, 1e-3, uniform_grid(10.0, 11)), absorbing),
            1e-9);
}

TEST(CheckConservation, DetectsLeak) {
  const auto g = two_state(1.0, 0.0, 10.0);
  auto traj = integrate(g, 1.0, 1e-3, uniform_grid(1.0, 3));
  traj.levels[1][0] += 0.5;
  EXPECT_NEAR(check_conservation(traj, g), 0.5, 1e-12);
}

}  // namespace
}  // namespace bankflow::test
