#include "bankflow/analysis.hpp"

#include <cmath>
#include <string>

#include "bankflow/errors.hpp"
#include "bankflow/number.hpp"

namespace bankflow {

namespace {

void require_same_shape(const DelayCostModel& model) {
  const auto& d = model.delays();
  const auto& v = model.costs();
  if (d.rows() != v.rows() || d.cols() != v.cols()) {
    throw DimensionError("delay and cost matrices differ in shape");
  }
}

}  // namespace

double total_delay(const DelayCostModel& model) {
  double d = 0.0;
  for (const auto& row : per_meta_operation(model)) d += row.time;
  return d;
}

double unit_cost(const DelayCostModel& model) {
  double v = 0.0;
  for (const auto& row : per_meta_operation(model)) v += row.cost;
  return v;
}

std::vector<MetaOperationCost> per_meta_operation(const DelayCostModel& model) {
  require_same_shape(model);
  const auto& d = model.delays();
  const auto& v = model.costs();
  std::vector<MetaOperationCost> rows(model.q());
  for (std::size_t i = 0; i < model.q(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) {
      rows[i].time += d(i, j);
      rows[i].cost += d(i, j) * v(i, j);
    }
  }
  return rows;
}

const char* to_string(LoadFlag flag) noexcept {
  switch (flag) {
    case LoadFlag::kNone: return "ok";
    case LoadFlag::kWarning: return "warning";
    case LoadFlag::kBottleneck: return "bottleneck";
  }
  return "unknown";
}

std::vector<NodeLoad> utilization(std::span<const double> arrival_rates,
                                  std::span<const double> service_rates, double warn) {
  if (arrival_rates.size() != service_rates.size()) {
    throw DimensionError(std::to_string(arrival_rates.size()) + " arrival rates for " +
                         std::to_string(service_rates.size()) + " service rates");
  }
  if (!(warn > 0.0 && warn <= 1.0)) {
    throw DomainError("warning threshold must lie in (0, 1], got " + format_number(warn));
  }
  std::vector<NodeLoad> out(arrival_rates.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double a = arrival_rates[i];
    const double s = service_rates[i];
    if (!(std::isfinite(s) && s > 0.0)) {
      throw DomainError("service rate of node " + std::to_string(i + 1) + " must be > 0");
    }
    if (!(std::isfinite(a) && a >= 0.0)) {
      throw DomainError("arrival rate of node " + std::to_string(i + 1) + " must be >= 0");
    }
    out[i].rho = a / s;
    if (out[i].rho >= 1.0) {
      out[i].flag = LoadFlag::kBottleneck;
    } else if (out[i].rho >= warn) {
      out[i].flag = LoadFlag::kWarning;
    }
  }
  return out;
}

double aggregate_index(const Matrix& levels, const AggregateIndexSpec& spec) {
  if (levels.rows() != spec.k() || levels.cols() != spec.n()) {
    throw DimensionError("indicator matrix is " + std::to_string(levels.rows()) + "x" +
                         std::to_string(levels.cols()) + ", weights are " +
                         std::to_string(spec.k()) + "x" + std::to_string(spec.n()));
  }
  double total = 0.0;
  const auto w = spec.weights().values();
  const auto x = levels.values();
  for (std::size_t i = 0; i < w.size(); ++i) total += w[i] * x[i];
  return total;
}

}  // namespace bankflow
