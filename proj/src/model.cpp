#include "bankflow/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_set>
#include <utility>

#include "bankflow/errors.hpp"
#include "bankflow/number.hpp"

namespace bankflow {

namespace {

std::string state_label(const StateGraph& g, std::size_t i) {
  if (i < g.states.size() && !g.states[i].empty()) {
    return "'" + g.states[i] + "'";
  }
  return "#" + std::to_string(i);
}

std::string transition_label(const StateGraph& g, const Transition& t) {
  return state_label(g, t.from) + " -> " + state_label(g, t.to);
}

}  // namespace

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) {
      throw DimensionError("ragged matrix: row " + std::to_string(r) + " has " +
                           std::to_string(rows[r].size()) + " entries, expected " +
                           std::to_string(m.cols()));
    }
    std::copy(rows[r].begin(), rows[r].end(), m.data_.begin() + r * m.cols());
  }
  return m;
}

double StateGraph::max_rate() const noexcept {
  double r = 0.0;
  for (const auto& t : transitions) r = std::max(r, t.rate);
  return r;
}

const char* to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::kNoStates: return "no states";
    case ViolationKind::kLevelCountMismatch: return "level count mismatch";
    case ViolationKind::kEmptyName: return "empty state name";
    case ViolationKind::kDuplicateName: return "duplicate state name";
    case ViolationKind::kNegativeInitialLevel: return "negative initial level";
    case ViolationKind::kNonFiniteInitialLevel: return "non-finite initial level";
    case ViolationKind::kStateIndexOutOfRange: return "state index out of range";
    case ViolationKind::kSelfTransition: return "self-transition";
    case ViolationKind::kDuplicateTransition: return "duplicate transition";
    case ViolationKind::kNegativeIntensity: return "negative intensity";
    case ViolationKind::kNonFiniteIntensity: return "non-finite intensity";
    case ViolationKind::kNegativeSource: return "negative source";
    case ViolationKind::kNonFiniteSource: return "non-finite source";
    case ViolationKind::kInfinitePopulation: return "infinite population";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const noexcept {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.message;
  }
  return out;
}

ValidationReport validate_graph(const StateGraph& graph) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, const std::string& what) {
    report.violations.push_back({kind, std::string(to_string(kind)) + ": " + what});
  };

  const std::size_t n = graph.states.size();
  if (n == 0) add(ViolationKind::kNoStates, "graph declares no states");
  if (graph.initial_levels.size() != n) {
    add(ViolationKind::kLevelCountMismatch,
        std::to_string(graph.initial_levels.size()) + " initial levels for " + std::to_string(n) +
            " states");
  }

  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& name = graph.states[i];
    if (name.empty()) {
      add(ViolationKind::kEmptyName, "state #" + std::to_string(i));
    } else if (!seen.insert(name).second) {
      add(ViolationKind::kDuplicateName, state_label(graph, i));
    }
  }

  double population = 0.0;
  bool levels_finite = true;
  for (std::size_t i = 0; i < graph.initial_levels.size(); ++i) {
    const double m = graph.initial_levels[i];
    if (!std::isfinite(m)) {
      levels_finite = false;
      add(ViolationKind::kNonFiniteInitialLevel, state_label(graph, i));
    } else if (m < 0.0) {
      add(ViolationKind::kNegativeInitialLevel, state_label(graph, i) + " = " + format_number(m));
    }
    population += m;
  }
  if (levels_finite && !std::isfinite(population)) {
    add(ViolationKind::kInfinitePopulation, "sum of initial levels overflows");
  }

  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& t : graph.transitions) {
    if (t.from >= n || t.to >= n) {
      add(ViolationKind::kStateIndexOutOfRange, transition_label(graph, t));
      continue;
    }
    if (t.from == t.to) add(ViolationKind::kSelfTransition, transition_label(graph, t));
    if (!pairs.emplace(t.from, t.to).second) {
      add(ViolationKind::kDuplicateTransition, transition_label(graph, t));
    }
    if (!std::isfinite(t.rate)) {
      add(ViolationKind::kNonFiniteIntensity, transition_label(graph, t));
    } else if (t.rate < 0.0) {
      add(ViolationKind::kNegativeIntensity,
          transition_label(graph, t) + " rate " + format_number(t.rate));
    }
  }

  if (!std::isfinite(graph.source_delta)) {
    add(ViolationKind::kNonFiniteSource, "source delta");
  } else if (graph.source_delta < 0.0) {
    add(ViolationKind::kNegativeSource, "source delta " + format_number(graph.source_delta));
  }
  return report;
}

void require_valid(const StateGraph& graph) {
  auto report = validate_graph(graph);
  if (!report.ok()) throw DomainError("invalid state graph: " + report.summary());
}

double total_population(const StateGraph& graph) {
  double n = 0.0;
  for (double m : graph.initial_levels) n += m;
  return n;
}

double InteractionConfig::max_lag() const noexcept {
  return std::max({tau_B, tau_C, delta_B, delta_C});
}

std::vector<std::string> interaction_violations(const InteractionConfig& c) {
  std::vector<std::string> out;
  auto check = [&](const char* name, double v, double lo, double hi, bool open_lo) {
    if (!std::isfinite(v)) {
      out.push_back(std::string(name) + " is not finite");
    } else if (open_lo ? v <= lo : v < lo) {
      out.push_back(std::string(name) + " = " + format_number(v) + " must be " +
                    (open_lo ? "> " : ">= ") + format_number(lo));
    } else if (v > hi) {
      out.push_back(std::string(name) + " = " + format_number(v) + " must be <= " + format_number(hi));
    }
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();
  check("p_B", c.p_B, 0.0, 1.0, false);
  check("p_C", c.p_C, 0.0, 1.0, false);
  check("lambda_B", c.lambda_B, 0.0, kInf, false);
  check("lambda_C", c.lambda_C, 0.0, kInf, false);
  check("tau_B", c.tau_B, 0.0, kInf, false);
  check("tau_C", c.tau_C, 0.0, kInf, false);
  check("delta_B", c.delta_B, 0.0, kInf, false);
  check("delta_C", c.delta_C, 0.0, kInf, false);
  check("N_B", c.N_B, 0.0, kInf, true);
  check("N_C", c.N_C, 0.0, kInf, true);
  return out;
}

void require_valid(const InteractionConfig& config) {
  auto v = interaction_violations(config);
  if (v.empty()) return;
  std::string msg = "invalid interaction config: ";
  for (std::size_t i = 0; i < v.size(); ++i) msg += (i ? "; " : "") + v[i];
  throw DomainError(msg);
}

DelayCostModel::DelayCostModel(Matrix delays, Matrix costs, std::size_t k1)
    : delays_(std::move(delays)), costs_(std::move(costs)), k1_(k1) {
  if (delays_.rows() != costs_.rows() || delays_.cols() != costs_.cols()) {
    throw DimensionError("delay matrix is " + std::to_string(delays_.rows()) + "x" +
                         std::to_string(delays_.cols()) + " but cost matrix is " +
                         std::to_string(costs_.rows()) + "x" + std::to_string(costs_.cols()));
  }
  if (k1_ > delays_.cols()) {
    throw DomainError("k1 = " + std::to_string(k1_) + " exceeds column count " +
                      std::to_string(delays_.cols()));
  }
  for (std::size_t i = 0; i < delays_.rows(); ++i) {
    for (std::size_t j = 0; j < delays_.cols(); ++j) {
      const auto where = "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
      if (!std::isfinite(delays_(i, j))) throw DomainError("non-finite delay at " + where);
      if (!std::isfinite(costs_(i, j))) throw DomainError("non-finite cost at " + where);
      if (costs_(i, j) < 0.0) throw DomainError("negative unit-time cost at " + where);
    }
  }
}

DelayCostModel::DelayCostModel(Matrix delays, Matrix costs)
    : DelayCostModel(delays, std::move(costs), delays.cols()) {}

AggregateIndexSpec::AggregateIndexSpec(Matrix weights) : weights_(std::move(weights)) {
  if (weights_.rows() == 0 || weights_.cols() == 0) {
    throw DomainError("aggregate index needs k >= 1 indicators and n >= 1 branches");
  }
  double sum = 0.0;
  for (double w : weights_.values()) {
    if (!std::isfinite(w) || w < 0.0) throw DomainError("aggregate weights must be finite and >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    throw DomainError("aggregate weights sum to " + format_number(sum) + ", expected 1");
  }
}

void require_valid_grid(std::span<const double> grid, double t_end) {
  if (grid.empty()) throw DomainError("output grid is empty");
  if (grid.front() != 0.0) throw DomainError("output grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("output grid must be strictly increasing");
  }
  if (!(grid.back() <= t_end)) throw DomainError("output grid extends past the horizon");
}

void require_valid(const Scenario& s) {
  require_valid(s.graph);
  if (!(std::isfinite(s.horizon) && s.horizon > 0.0)) throw DomainError("horizon must be > 0");
  if (!(std::isfinite(s.step) && s.step > 0.0 && s.step <= s.horizon)) {
    throw DomainError("step must satisfy 0 < dt <= horizon");
  }
  require_valid_grid(s.output_grid, s.horizon);
  if (s.output_grid.back() != s.horizon) throw DomainError("output grid must end at the horizon");
}

std::vector<double> uniform_grid(double t_end, std::size_t points) {
  if (points < 2) throw DomainError("a grid needs at least 2 points");
  if (!(std::isfinite(t_end) && t_end > 0.0)) throw DomainError("grid end must be > 0");
  std::vector<double> grid(points);
  const double intervals = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = t_end * (static_cast<double>(i) / intervals);
  grid.back() = t_end;
  return grid;
}

double default_step(const StateGraph& graph) {
  const double r = graph.max_rate();
  return r > 0.0 ? std::min(1e-3, 0.1 / r) : 1e-3;
}

}  // namespace bankflow
