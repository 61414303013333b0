#pragma once

// Text formats.
//
// Model files, one directive per line, '#' comments, blank lines ignored:
//
//   model <ident>
//   state <ident> init <number>
//   transition <ident> <ident> rate <number>
//   source <ident> rate <number>          (the first declared state only)
//
// Interaction configs: "key = value" lines with exactly the keys p_B, p_C,
// lambda_B, lambda_C, tau_B, tau_C, delta_B, delta_C, N_B, N_C.
//
// Matrix CSV: comma separated numbers, equal-length rows, no header.
// Trajectory CSV: header "t,<state names>", one row per grid time.

#include <string>
#include <string_view>
#include <vector>

#include "bankflow/interaction.hpp"
#include "bankflow/kolmogorov.hpp"
#include "bankflow/model.hpp"

namespace bankflow {

struct SourcePosition {
  std::size_t line = 0;
  std::size_t column = 0;
};

struct ModelDocument {
  std::string name;
  StateGraph graph;  // transitions sorted by (from, to)
  SourcePosition model_position;
  std::vector<SourcePosition> state_positions;       // parallel to graph.states
  std::vector<SourcePosition> transition_positions;  // parallel to graph.transitions
  SourcePosition source_position;                    // line 0 when there is no source
};

/// Throws ParseError with the 1-based line and column of the offending token.
ModelDocument parse_model(std::string_view text);

/// Canonical text: model line, states in declaration order, transitions by
/// (from, to), then the source line when delta > 0. Numbers use the shortest
/// decimal that round-trips.
std::string serialize_model(const ModelDocument& doc);

InteractionConfig parse_interaction(std::string_view text);
std::string serialize_interaction(const InteractionConfig& config);

/// Empty input gives a 0x0 matrix. Throws ParseError on ragged rows or bad numbers.
Matrix parse_matrix_csv(std::string_view text);

/// Header "t,<name1>,...,<nameN>" then one row per sample, LF endings.
std::string write_trajectory_csv(const Trajectory& trajectory,
                                 const std::vector<std::string>& state_names);

/// Header "t,m_B,m_C" then one row per sample.
std::string write_interaction_csv(const InteractionTrajectory& trajectory);

struct TrajectoryTable {
  std::vector<std::string> columns;  // without the leading "t"
  Trajectory trajectory;
};

/// Reads write_trajectory_csv output back; lines starting with '#' are skipped.
TrajectoryTable read_trajectory_csv(std::string_view text);

}  // namespace bankflow
