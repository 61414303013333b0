#include "bankflow/model_io.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <optional>
#include <unordered_map>

#include "bankflow/errors.hpp"
#include "bankflow/number.hpp"

namespace bankflow {

namespace {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

struct Line {
  std::size_t number;  // 1-based
  std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 1;
  while (!text.empty() || lines.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back({number++, line});
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

bool is_blank(char c) { return c == ' ' || c == '\t'; }

std::vector<Token> tokenize(std::string_view line) {
  if (const auto hash = line.find('#'); hash != std::string_view::npos) {
    line = line.substr(0, hash);
  }
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_blank(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_blank(line[i])) ++i;
    if (i > start) tokens.push_back({line.substr(start, i - start), start + 1});
  }
  return tokens;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_blank(s.back())) s.remove_suffix(1);
  return s;
}

std::size_t leading_blanks(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && is_blank(s[i])) ++i;
  return i;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s.front())) return false;
  return std::all_of(s.begin() + 1, s.end(), [&](char c) { return alpha(c) || digit(c); });
}

std::string quoted(std::string_view s) { return "'" + std::string(s) + "'"; }

// Walks the tokens of one directive, reporting errors at the right spot.
class DirectiveReader {
 public:
  DirectiveReader(const Line& line, std::vector<Token> tokens)
      : line_(line), tokens_(std::move(tokens)) {}

  [[noreturn]] void fail(const Token& at, const std::string& message) const {
    throw ParseError(line_.number, at.column, message);
  }
  [[noreturn]] void fail_here(const std::string& message) const {
    if (pos_ < tokens_.size()) fail(tokens_[pos_], message);
    // Past the last token: point just after it.
    const std::size_t col =
        tokens_.empty() ? 1 : tokens_.back().column + tokens_.back().text.size();
    throw ParseError(line_.number, col, message);
  }

  const Token& next(const char* expected) {
    if (pos_ >= tokens_.size()) fail_here(std::string("expected ") + expected + ", got end of line");
    return tokens_[pos_++];
  }

  void keyword(std::string_view word) {
    const auto& t = next(quoted(word).c_str());
    if (t.text != word) fail(t, "expected " + quoted(word) + ", got " + quoted(t.text));
  }

  const Token& identifier() {
    const auto& t = next("an identifier");
    if (!is_identifier(t.text)) fail(t, "expected an identifier, got " + quoted(t.text));
    return t;
  }

  std::pair<double, const Token*> number() {
    const auto& t = next("a number");
    const auto v = parse_number(t.text);
    if (!v) fail(t, "expected a number, got " + quoted(t.text));
    return {*v, &t};
  }

  void end() {
    if (pos_ < tokens_.size()) {
      fail(tokens_[pos_], "expected end of line, got " + quoted(tokens_[pos_].text));
    }
  }

  SourcePosition position() const { return {line_.number, tokens_.front().column}; }

 private:
  const Line& line_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 1;  // token 0 is the directive keyword
};

}  // namespace

ModelDocument parse_model(std::string_view text) {
  ModelDocument doc;
  bool have_model = false;
  bool have_source = false;
  std::unordered_map<std::string, std::size_t> index;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> pair_line;

  struct PendingTransition {
    Transition t;
    SourcePosition pos;
  };
  std::vector<PendingTransition> transitions;

  const auto lines = split_lines(text);
  for (const auto& line : lines) {
    auto tokens = tokenize(line.text);
    if (tokens.empty()) continue;
    const Token head = tokens.front();
    DirectiveReader r(line, std::move(tokens));

    auto lookup_state = [&](const Token& t) {
      auto it = index.find(std::string(t.text));
      if (it == index.end()) r.fail(t, "undeclared state " + std::string(t.text));
      return it->second;
    };

    if (head.text == "model") {
      const auto& name = r.identifier();
      r.end();
      if (have_model) r.fail(head, "duplicate model directive");
      have_model = true;
      doc.name = std::string(name.text);
      doc.model_position = r.position();
    } else if (head.text == "state") {
      const auto& name = r.identifier();
      r.keyword("init");
      const auto [level, level_tok] = r.number();
      r.end();
      if (index.count(std::string(name.text))) {
        r.fail(name, "duplicate state " + std::string(name.text));
      }
      if (level < 0.0) r.fail(*level_tok, "negative initial level");
      index.emplace(std::string(name.text), doc.graph.states.size());
      doc.graph.states.emplace_back(name.text);
      doc.graph.initial_levels.push_back(level);
      doc.state_positions.push_back(r.position());
    } else if (head.text == "transition") {
      const auto& from_tok = r.identifier();
      const auto& to_tok = r.identifier();
      r.keyword("rate");
      const auto [rate, rate_tok] = r.number();
      r.end();
      const std::size_t from = lookup_state(from_tok);
      const std::size_t to = lookup_state(to_tok);
      if (from == to) r.fail(to_tok, "self-transition on " + std::string(from_tok.text));
      if (auto it = pair_line.find({from, to}); it != pair_line.end()) {
        r.fail(from_tok, "duplicate transition " + std::string(from_tok.text) + " -> " +
                             std::string(to_tok.text) + " (first declared on line " +
                             std::to_string(it->second) + ")");
      }
      if (rate < 0.0) r.fail(*rate_tok, "negative rate");
      pair_line.emplace(std::pair{from, to}, line.number);
      transitions.push_back({{from, to, rate}, r.position()});
    } else if (head.text == "source") {
      const auto& state_tok = r.identifier();
      r.keyword("rate");
      const auto [rate, rate_tok] = r.number();
      r.end();
      const std::size_t state = lookup_state(state_tok);
      if (state != 0) {
        r.fail(state_tok, "source must feed the first declared state (" +
                              doc.graph.states.front() + ")");
      }
      if (have_source) r.fail(head, "duplicate source directive");
      if (rate < 0.0) r.fail(*rate_tok, "negative rate");
      have_source = true;
      doc.graph.source_delta = rate;
      doc.source_position = r.position();
    } else {
      r.fail(head, "unknown directive " + quoted(head.text) +
                       "; expected one of model, state, transition, source");
    }
  }

  if (!have_model) throw ParseError(1, 1, "missing 'model' directive");
  if (doc.graph.states.empty()) {
    throw ParseError(doc.model_position.line, doc.model_position.column,
                     "model declares no states");
  }

  std::stable_sort(transitions.begin(), transitions.end(), [](const auto& a, const auto& b) {
    return std::pair(a.t.from, a.t.to) < std::pair(b.t.from, b.t.to);
  });
  for (const auto& p : transitions) {
    doc.graph.transitions.push_back(p.t);
    doc.transition_positions.push_back(p.pos);
  }
  return doc;
}

std::string serialize_model(const ModelDocument& doc) {
  const auto& g = doc.graph;
  std::string out = "model " + doc.name + "\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    out += "state " + g.states[i] + " init " + format_number(g.initial_levels[i]) + "\n";
  }
  auto sorted = g.transitions;
  std::sort(sorted.begin(), sorted.end(), [](const Transition& a, const Transition& b) {
    return std::pair(a.from, a.to) < std::pair(b.from, b.to);
  });
  for (const auto& t : sorted) {
    out += "transition " + g.states[t.from] + " " + g.states[t.to] + " rate " +
           format_number(t.rate) + "\n";
  }
  if (g.source_delta > 0.0) {
    out += "source " + g.states.front() + " rate " + format_number(g.source_delta) + "\n";
  }
  return out;
}

namespace {

constexpr std::array<const char*, 10> kInteractionKeys = {
    "p_B", "p_C", "lambda_B", "lambda_C", "tau_B", "tau_C", "delta_B", "delta_C", "N_B", "N_C"};

double& interaction_field(InteractionConfig& c, std::size_t key) {
  std::array<double*, 10> fields = {&c.p_B,   &c.p_C,   &c.lambda_B, &c.lambda_C, &c.tau_B,
                                    &c.tau_C, &c.delta_B, &c.delta_C, &c.N_B,      &c.N_C};
  return *fields[key];
}

}  // namespace

InteractionConfig parse_interaction(std::string_view text) {
  InteractionConfig config;
  std::array<std::optional<SourcePosition>, kInteractionKeys.size()> seen;
  const auto lines = split_lines(text);

  for (const auto& line : lines) {
    auto body = line.text.substr(0, line.text.find('#'));
    if (trim(body).empty()) continue;
    const auto eq = body.find('=');
    const auto first = body.find_first_not_of(" \t");
    if (eq == std::string_view::npos) {
      throw ParseError(line.number, first + 1, "expected 'key = value'");
    }
    const auto key = trim(body.substr(0, eq));
    const auto raw_value = body.substr(eq + 1);
    const auto value = trim(raw_value);
    const std::size_t value_col = eq + 2 + leading_blanks(raw_value);
    if (key.empty()) throw ParseError(line.number, eq + 1, "missing key before '='");

    const auto it = std::find(kInteractionKeys.begin(), kInteractionKeys.end(), key);
    if (it == kInteractionKeys.end()) {
      throw ParseError(line.number, first + 1,
                       "unknown key " + quoted(key) +
                           "; expected one of p_B, p_C, lambda_B, lambda_C, tau_B, tau_C, "
                           "delta_B, delta_C, N_B, N_C");
    }
    const auto k = static_cast<std::size_t>(it - kInteractionKeys.begin());
    if (seen[k]) {
      throw ParseError(line.number, first + 1,
                       "duplicate key " + quoted(key) + " (first set on line " +
                           std::to_string(seen[k]->line) + ")");
    }
    const auto v = parse_number(value);
    if (!v) throw ParseError(line.number, value_col, "expected a number for " + quoted(key));
    interaction_field(config, k) = *v;
    seen[k] = SourcePosition{line.number, value_col};
  }

  for (std::size_t k = 0; k < kInteractionKeys.size(); ++k) {
    if (!seen[k]) {
      throw ParseError(lines.back().number, 1,
                       std::string("missing key '") + kInteractionKeys[k] + "'");
    }
  }

  // Range checks, reported at the offending value.
  const auto problems = interaction_violations(config);
  for (std::size_t k = 0; k < kInteractionKeys.size(); ++k) {
    const std::string prefix = std::string(kInteractionKeys[k]) + " ";
    for (const auto& msg : problems) {
      if (msg.rfind(prefix, 0) == 0) {
        throw ParseError(seen[k]->line, seen[k]->column, "out of range: " + msg);
      }
    }
  }
  return config;
}

std::string serialize_interaction(const InteractionConfig& config) {
  InteractionConfig c = config;
  std::string out;
  for (std::size_t k = 0; k < kInteractionKeys.size(); ++k) {
    out += std::string(kInteractionKeys[k]) + " = " + format_number(interaction_field(c, k)) + "\n";
  }
  return out;
}

Matrix parse_matrix_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t first_line = 0;
  for (const auto& line : split_lines(text)) {
    if (trim(line.text).empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.text.find(',', start);
      const auto cell = line.text.substr(start, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - start);
      const auto value = trim(cell);
      const std::size_t col = start + 1 + (value.empty() ? 0 : leading_blanks(cell));
      const auto v = parse_number(value);
      if (!v) {
        throw ParseError(line.number, col,
                         value.empty() ? "empty cell" : "expected a number, got " + quoted(value));
      }
      row.push_back(*v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows.empty()) {
      first_line = line.number;
    } else if (row.size() != rows.front().size()) {
      throw ParseError(line.number, 1,
                       "ragged row: " + std::to_string(row.size()) + " values, line " +
                           std::to_string(first_line) + " has " +
                           std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  return Matrix::from_rows(rows);
}

std::string write_trajectory_csv(const Trajectory& trajectory,
                                 const std::vector<std::string>& state_names) {
  std::string out = "t";
  for (const auto& name : state_names) out += "," + name;
  out += "\n";
  for (std::size_t s = 0; s < trajectory.times.size(); ++s) {
    if (trajectory.levels[s].size() != state_names.size()) {
      throw DimensionError("trajectory sample " + std::to_string(s) + " has " +
                           std::to_string(trajectory.levels[s].size()) + " levels for " +
                           std::to_string(state_names.size()) + " names");
    }
    out += format_number(trajectory.times[s]);
    for (double m : trajectory.levels[s]) out += "," + format_number(m);
    out += "\n";
  }
  return out;
}

std::string write_interaction_csv(const InteractionTrajectory& trajectory) {
  std::string out = "t,m_B,m_C\n";
  for (std::size_t s = 0; s < trajectory.times.size(); ++s) {
    out += format_number(trajectory.times[s]) + "," + format_number(trajectory.m_B[s]) + "," +
           format_number(trajectory.m_C[s]) + "\n";
  }
  return out;
}

TrajectoryTable read_trajectory_csv(std::string_view text) {
  TrajectoryTable table;
  bool have_header = false;
  for (const auto& line : split_lines(text)) {
    if (trim(line.text).empty() || line.text.front() == '#') continue;
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.text.find(',', start);
      cells.push_back(line.text.substr(
          start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!have_header) {
      if (cells.front() != "t") throw ParseError(line.number, 1, "header must start with 't'");
      for (std::size_t i = 1; i < cells.size(); ++i) table.columns.emplace_back(cells[i]);
      have_header = true;
      continue;
    }
    if (cells.size() != table.columns.size() + 1) {
      throw ParseError(line.number, 1, "ragged row");
    }
    std::vector<double> values;
    for (const auto& c : cells) {
      const auto v = parse_number(c);
      if (!v) throw ParseError(line.number, 1, "expected a number, got " + quoted(c));
      values.push_back(*v);
    }
    table.trajectory.times.push_back(values.front());
    table.trajectory.levels.emplace_back(values.begin() + 1, values.end());
  }
  if (!have_header) throw ParseError(1, 1, "missing header");
  return table;
}

}  // namespace bankflow
