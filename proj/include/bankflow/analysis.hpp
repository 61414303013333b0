#pragma once

#include <span>
#include <vector>

#include "bankflow/model.hpp"

namespace bankflow {

/// Sum of all d_ij, row-major. Negative when amplifications dominate.
double total_delay(const DelayCostModel& model);

/// Sum of d_ij * v_ij, row-major.
double unit_cost(const DelayCostModel& model);

struct MetaOperationCost {
  double time = 0.0;
  double cost = 0.0;
};

/// Row sums of D and of D*V. Summing the rows in order reproduces
/// total_delay and unit_cost bit for bit.
std::vector<MetaOperationCost> per_meta_operation(const DelayCostModel& model);

enum class LoadFlag { kNone, kWarning, kBottleneck };

const char* to_string(LoadFlag flag) noexcept;

struct NodeLoad {
  double rho = 0.0;
  LoadFlag flag = LoadFlag::kNone;
};

inline constexpr double kDefaultWarnThreshold = 0.8;

/// rho = arrival / service per node; rho >= 1 is a bottleneck, warn <= rho < 1
/// a warning. Throws DimensionError on length mismatch and DomainError on a
/// service rate <= 0, a negative arrival rate or warn outside (0, 1].
std::vector<NodeLoad> utilization(std::span<const double> arrival_rates,
                                   std::span<const double> service_rates,
                                   double warn = kDefaultWarnThreshold);

/// Weighted sum of a k x n indicator matrix. Throws DimensionError when the
/// shape differs from the weights.
double aggregate_index(const Matrix& levels, const AggregateIndexSpec& spec);

}  // namespace bankflow
