#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "bankflow/errors.hpp"
#include "bankflow/model.hpp"
#include "test_support.hpp"

namespace bankflow::test {
namespace {

TEST(ValidateGraph, MinimalGraphIsOk) {
  const auto g = two_state(1.0, 0.0, 1.0);
  EXPECT_TRUE(validate_graph(g).ok());
  EXPECT_NO_THROW(require_valid(g));
}

TEST(ValidateGraph, NegativeIntensity) {
  auto g = two_state(1.0, 0.0, 1.0);
  g.transitions[0].rate = -0.5;
  const auto report = validate_graph(g);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].kind, ViolationKind::kNegativeIntensity);
  EXPECT_NE(report.violations[0].message.find("negative intensity"), std::string::npos);
  EXPECT_NE(report.violations[0].message.find("'A' -> 'B'"), std::string::npos);
  EXPECT_THROW(require_valid(g), DomainError);
}

TEST(ValidateGraph, SelfTransition) {
  auto g = two_state(1.0, 0.0, 1.0);
  g.transitions.push_back({1, 1, 1.0});
  const auto report = validate_graph(g);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].kind, ViolationKind::kSelfTransition);
  EXPECT_NE(report.violations[0].message.find("'B' -> 'B'"), std::string::npos);
}

TEST(ValidateGraph, EmptyAndMismatched) {
  StateGraph empty;
  EXPECT_TRUE(validate_graph(empty).has(ViolationKind::kNoStates));
  auto g = two_state(1.0, 0.0, 1.0);
  g.initial_levels.pop_back();
  EXPECT_TRUE(validate_graph(g).has(ViolationKind::kLevelCountMismatch));
}

TEST(ValidateGraph, ZeroRateIsInert) {
  auto g = two_state(1.0, 0.0, 1.0);
  g.transitions.push_back({1, 0, 0.0});
  EXPECT_TRUE(validate_graph(g).ok());
}

// A single mutation of a valid graph produces exactly its own violation.
TEST(ValidateGraph, SingleMutationYieldsMatchingViolation) {
  std::mt19937_64 rng(20240611);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    StateGraph g = random_irreducible_graph(rng, 2 + trial % 6);
    ASSERT_TRUE(validate_graph(g).ok());
    const std::size_t n = g.size();
    std::uniform_int_distribution<std::size_t> pick_state(0, n - 1);
    std::uniform_int_distribution<std::size_t> pick_edge(0, g.transitions.size() - 1);

    ViolationKind expected{};
    switch (trial % 11) {
      case 0: g.transitions[pick_edge(rng)].rate = -1.0; expected = ViolationKind::kNegativeIntensity; break;
      case 1: g.transitions[pick_edge(rng)].rate = nan; expected = ViolationKind::kNonFiniteIntensity; break;
      case 2: {
        const auto s = pick_state(rng);
        g.transitions.push_back({s, s, 1.0});
        expected = ViolationKind::kSelfTransition;
        break;
      }
      case 3: g.transitions.push_back(g.transitions[pick_edge(rng)]); expected = ViolationKind::kDuplicateTransition; break;
      case 4: g.initial_levels[pick_state(rng)] = -2.0; expected = ViolationKind::kNegativeInitialLevel; break;
      case 5: g.initial_levels[pick_state(rng)] = inf; expected = ViolationKind::kNonFiniteInitialLevel; break;
      case 6: g.states[pick_state(rng)].clear(); expected = ViolationKind::kEmptyName; break;
      case 7: g.states[1] = g.states[0]; expected = ViolationKind::kDuplicateName; break;
      case 8: g.source_delta = -0.5; expected = ViolationKind::kNegativeSource; break;
      case 9: g.source_delta = nan; expected = ViolationKind::kNonFiniteSource; break;
      case 10: g.transitions.push_back({0, n, 1.0}); expected = ViolationKind::kStateIndexOutOfRange; break;
    }
    const auto report = validate_graph(g);
    ASSERT_EQ(report.violations.size(), 1u) << "trial " << trial << ": " << report.summary();
    EXPECT_EQ(report.violations[0].kind, expected) << report.summary();
    ++checked;
  }
  EXPECT_EQ(checked, 400);
}

TEST(TotalPopulation, Examples) {
  EXPECT_EQ(total_population(two_state(1.0, 0.0, 100.0)), 100.0);
  StateGraph g;
  g.states = {"a", "b", "c"};
  g.initial_levels = {1, 2, 3};
  EXPECT_EQ(total_population(g), 6.0);
}

TEST(TotalPopulation, PermutationInvariantUpToRounding) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = random_closed_graph(rng, 12, 1.0, 1e6);
    const double base = total_population(g);
    std::shuffle(g.initial_levels.begin(), g.initial_levels.end(), rng);
    const double bound = static_cast<double>(g.size()) * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, base);
    EXPECT_LE(std::abs(total_population(g) - base), bound);
  }
}

TEST(InteractionConfig, Violations) {
  InteractionConfig c;
  c.p_B = 0.5;
  c.N_B = 10;
  c.N_C = 20;
  EXPECT_TRUE(interaction_violations(c).empty());
  c.p_B = 1.5;
  c.tau_C = -1.0;
  c.N_C = 0.0;
  const auto v = interaction_violations(c);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0].rfind("p_B ", 0), 0u);
  EXPECT_EQ(v[1].rfind("tau_C ", 0), 0u);
  EXPECT_EQ(v[2].rfind("N_C ", 0), 0u);
  EXPECT_THROW(require_valid(c), DomainError);
}

TEST(DelayCostModel, ShapeAndSignChecks) {
  const auto d = Matrix::from_rows({{3, -1}, {2, 0}});
  const auto v = Matrix::from_rows({{1, 1}, {1, 1}});
  DelayCostModel model(d, v, 1);
  EXPECT_EQ(model.q(), 2u);
  EXPECT_EQ(model.k1(), 1u);
  EXPECT_EQ(model.k2(), 1u);
  EXPECT_THROW(DelayCostModel(d, Matrix::from_rows({{1, 1}})), DimensionError);
  EXPECT_THROW(DelayCostModel(d, Matrix::from_rows({{1, -1}, {1, 1}})), DomainError);
  EXPECT_THROW(DelayCostModel(d, v, 3), DomainError);
  EXPECT_THROW(Matrix::from_rows({{1, 2}, {3}}), DimensionError);
}

TEST(AggregateIndexSpec, WeightsMustSumToOne) {
  EXPECT_NO_THROW(AggregateIndexSpec(Matrix::from_rows({{0.5, 0.5}})));
  EXPECT_THROW(AggregateIndexSpec(Matrix::from_rows({{0.0, 0.0}})), DomainError);
  EXPECT_THROW(AggregateIndexSpec(Matrix::from_rows({{1.5, -0.5}})), DomainError);
  EXPECT_THROW(AggregateIndexSpec(Matrix{}), DomainError);
}

TEST(Grid, UniformGridHitsEndsExactly) {
  const auto g = uniform_grid(5.0, 21);
  ASSERT_EQ(g.size(), 21u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 5.0);
  EXPECT_EQ(g[4], 1.0);
  EXPECT_THROW(uniform_grid(1.0, 1), DomainError);
  EXPECT_THROW(require_valid_grid(std::vector<double>{0.0, 0.5, 0.5}, 1.0), DomainError);
  EXPECT_THROW(require_valid_grid(std::vector<double>{0.1, 0.5}, 1.0), DomainError);
  EXPECT_THROW(require_valid_grid(std::vector<double>{0.0, 2.0}, 1.0), DomainError);
}

TEST(Grid, DefaultStep) {
  EXPECT_EQ(default_step(two_state(1.0, 3.0, 1.0)), 1e-3);
  EXPECT_EQ(default_step(two_state(1000.0, 3.0, 1.0)), 1e-4);
  EXPECT_EQ(default_step(two_state(0.0, 0.0, 1.0)), 1e-3);
}

TEST(Scenario, RunControls) {
  Scenario s{two_state(1.0, 0.0, 1.0), 2.0, 1e-3, uniform_grid(2.0, 5), 42};
  EXPECT_NO_THROW(require_valid(s));
  s.step = 3.0;
  EXPECT_THROW(require_valid(s), DomainError);
  s.step = 1e-3;
  s.output_grid = {0.0, 1.0};
  EXPECT_THROW(require_valid(s), DomainError);
}

}  // namespace
}  // namespace bankflow::test
