#pragma once

// Domain types shared by every engine: state graphs, interaction parameters,
// delay/cost matrices, aggregate index weights and run scenarios.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bankflow {

using LevelVector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  /// Builds from nested rows; throws DimensionError if the rows are ragged.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> values() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Directed edge i -> j with intensity lambda_ij (1/time).
struct Transition {
  std::size_t from = 0;
  std::size_t to = 0;
  double rate = 0.0;

  bool operator==(const Transition&) const = default;
};

/// Labeled state graph of a client population. State 0 is the one fed by the
/// source: delta elements per unit time arrive there.
struct StateGraph {
  std::vector<std::string> states;
  LevelVector initial_levels;
  std::vector<Transition> transitions;
  double source_delta = 0.0;

  std::size_t size() const noexcept { return states.size(); }
  double max_rate() const noexcept;

  bool operator==(const StateGraph&) const = default;
};

enum class ViolationKind {
  kNoStates,
  kLevelCountMismatch,
  kEmptyName,
  kDuplicateName,
  kNegativeInitialLevel,
  kNonFiniteInitialLevel,
  kStateIndexOutOfRange,
  kSelfTransition,
  kDuplicateTransition,
  kNegativeIntensity,
  kNonFiniteIntensity,
  kNegativeSource,
  kNonFiniteSource,
  kInfinitePopulation,
};

const char* to_string(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::string message;  // names the offending state or transition
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(ViolationKind kind) const noexcept;
  /// All messages joined by "; ".
  std::string summary() const;
};

ValidationReport validate_graph(const StateGraph& graph);

/// Throws DomainError carrying the report summary unless the graph is valid.
void require_valid(const StateGraph& graph);

/// Sum of the initial levels, accumulated in state order.
double total_population(const StateGraph& graph);

/// Parameters of the delayed {banks; clients} interaction.
struct InteractionConfig {
  double p_B = 0.0;
  double p_C = 0.0;
  double lambda_B = 0.0;
  double lambda_C = 0.0;
  double tau_B = 0.0;
  double tau_C = 0.0;
  double delta_B = 0.0;  // attention-switch delay of the banks
  double delta_C = 0.0;  // attention-switch delay of the clients
  double N_B = 1.0;
  double N_C = 1.0;

  double max_lag() const noexcept;
  bool operator==(const InteractionConfig&) const = default;
};

/// Empty when the config is admissible; otherwise one message per bad field.
std::vector<std::string> interaction_violations(const InteractionConfig& config);
void require_valid(const InteractionConfig& config);

/// Time matrix D and unit-time cost matrix V over q meta-operations and
/// k1 staff-operation columns followed by k2 external-delay columns.
/// Negative time entries are amplifications.
class DelayCostModel {
 public:
  /// Throws DimensionError on shape mismatch, DomainError on negative or
  /// non-finite costs, non-finite delays or k1 > column count.
  DelayCostModel(Matrix delays, Matrix costs, std::size_t k1);
  /// All columns counted as staff operations.
  DelayCostModel(Matrix delays, Matrix costs);

  std::size_t q() const noexcept { return delays_.rows(); }
  std::size_t k1() const noexcept { return k1_; }
  std::size_t k2() const noexcept { return delays_.cols() - k1_; }
  const Matrix& delays() const noexcept { return delays_; }
  const Matrix& costs() const noexcept { return costs_; }

 private:
  Matrix delays_;
  Matrix costs_;
  std::size_t k1_;
};

/// k indicators by n branches, nonnegative weights summing to one.
class AggregateIndexSpec {
 public:
  static constexpr double kWeightSumTolerance = 1e-12;

  explicit AggregateIndexSpec(Matrix weights);

  std::size_t k() const noexcept { return weights_.rows(); }
  std::size_t n() const noexcept { return weights_.cols(); }
  const Matrix& weights() const noexcept { return weights_; }

 private:
  Matrix weights_;
};

/// A model plus run controls.
struct Scenario {
  StateGraph graph;
  double horizon = 1.0;
  double step = 1e-3;
  std::vector<double> output_grid;
  std::uint64_t seed = 0;
};

/// Throws DomainError if the graph or any run control is inadmissible.
void require_valid(const Scenario& scenario);

/// `points` equally spaced times covering [0, t_end], both ends included exactly.
std::vector<double> uniform_grid(double t_end, std::size_t points);

/// min(1e-3, 0.1 / max rate); 1e-3 when every rate is zero.
double default_step(const StateGraph& graph);

/// Throws DomainError unless the grid is nonempty, starts at 0, is strictly
/// increasing and ends no later than t_end.
void require_valid_grid(std::span<const double> grid, double t_end);

}  // namespace bankflow
