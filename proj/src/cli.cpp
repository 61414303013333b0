#include "bankflow/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "bankflow/analysis.hpp"
#include "bankflow/errors.hpp"
#include "bankflow/interaction.hpp"
#include "bankflow/kolmogorov.hpp"
#include "bankflow/model_io.hpp"
#include "bankflow/number.hpp"
#include "bankflow/ssa.hpp"

namespace bankflow {

namespace {

// Input error tagged with the file it came from.
class InputError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class Parse>
auto parse_file(const std::string& path, Parse&& parse) {
  const auto text = read_file(path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw InputError(path + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) +
                     ": " + e.detail());
  }
}

std::vector<double> flatten(const Matrix& m) {
  return {m.values().begin(), m.values().end()};
}

struct GridOptions {
  double t_end = 0.0;
  double dt = 0.0;  // 0 = default
  std::size_t points = 0;
};

void add_grid_options(CLI::App* cmd, GridOptions& g, std::size_t default_points) {
  g.points = default_points;
  cmd->add_option("--t-end", g.t_end, "Horizon")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--dt", g.dt, "Integration step")->check(CLI::PositiveNumber);
  cmd->add_option("--grid", g.points, "Number of output points, both ends included")
      ->check(CLI::Range(std::size_t{2}, std::size_t{10000000}));
}

std::string header(const std::string& command,
                   std::initializer_list<std::pair<const char*, std::string>> fields) {
  std::string line = "# " + command;
  for (const auto& [k, v] : fields) line += std::string(" ") + k + "=" + v;
  return line + "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kolmogorov-equation simulation of client and service dynamics", "bankflow"};
  app.require_subcommand(1);

  std::string model_path, config_path, out_path, delays_path, costs_path, arrivals_path,
      services_path;
  GridOptions simulate_grid, interact_grid, validate_grid;
  double population = -1.0;
  double warn = kDefaultWarnThreshold;
  std::size_t replications = 0;
  std::size_t workers = 0;
  std::size_t k1 = 0;
  std::uint64_t seed = 0;

  auto* simulate = app.add_subcommand("simulate", "Integrate the expectation equations");
  simulate->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  add_grid_options(simulate, simulate_grid, 101);
  simulate->add_option("--out", out_path, "Write the CSV here instead of stdout");

  auto* steady = app.add_subcommand("steady", "Solve the limiting steady state");
  steady->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  steady->add_option("--population", population, "Defaults to the total initial level")
      ->check(CLI::NonNegativeNumber);

  auto* interact = app.add_subcommand("interact", "Integrate the delayed bank/client system");
  interact->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  add_grid_options(interact, interact_grid, 101);
  interact->add_option("--out", out_path, "Write the CSV here instead of stdout");

  auto* cost = app.add_subcommand("cost", "Meta-operation time and cost totals");
  cost->add_option("--delays", delays_path)->required()->check(CLI::ExistingFile);
  cost->add_option("--costs", costs_path)->required()->check(CLI::ExistingFile);
  cost->add_option("--k1", k1, "Staff-operation columns; the rest are external delays");

  auto* bottleneck = app.add_subcommand("bottleneck", "Utilization and bottleneck flags");
  bottleneck->add_option("--arrivals", arrivals_path)->required()->check(CLI::ExistingFile);
  bottleneck->add_option("--services", services_path)->required()->check(CLI::ExistingFile);
  bottleneck->add_option("--warn", warn, "Warning threshold")->check(CLI::Range(0.0, 1.0));

  auto* validate = app.add_subcommand("validate", "Compare a stochastic ensemble to the ODE");
  validate->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  validate->add_option("--replications", replications)->required()->check(CLI::PositiveNumber);
  validate->add_option("--seed", seed)->required();
  add_grid_options(validate, validate_grid, 21);
  validate->add_option("--workers", workers, "Worker threads, 0 = all cores");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "bankflow: " << e.what() << "\n";
    return kExitUsage;
  }

  std::string result;
  int code = kExitOk;
  try {
    if (simulate->parsed()) {
      const auto& grid = simulate_grid;
      const auto doc = parse_file(model_path, parse_model);
      const double dt = grid.dt > 0.0 ? grid.dt : std::min(default_step(doc.graph), grid.t_end);
      const auto times = uniform_grid(grid.t_end, grid.points);
      const auto traj = integrate(doc.graph, grid.t_end, dt, times);
      result = header("simulate", {{"model", doc.name},
                                   {"t_end", format_number(grid.t_end)},
                                   {"dt", format_number(dt)},
                                   {"grid", std::to_string(grid.points)}}) +
               write_trajectory_csv(traj, doc.graph.states);
    } else if (steady->parsed()) {
      const auto doc = parse_file(model_path, parse_model);
      const double n = population >= 0.0 ? population : total_population(doc.graph);
      const auto m = steady_state(doc.graph, n);
      result = header("steady", {{"model", doc.name}, {"population", format_number(n)}});
      for (std::size_t i = 0; i < m.size(); ++i) result += (i ? "," : "") + doc.graph.states[i];
      result += "\n";
      for (std::size_t i = 0; i < m.size(); ++i) result += (i ? "," : "") + format_number(m[i]);
      result += "\n";
    } else if (interact->parsed()) {
      const auto& grid = interact_grid;
      const auto config = parse_file(config_path, parse_interaction);
      double dt = grid.dt;
      if (dt <= 0.0) {
        dt = std::min(1e-3, grid.t_end);
        for (double lag : {config.tau_B, config.tau_C, config.delta_B, config.delta_C}) {
          if (lag > 0.0) dt = std::min(dt, lag);
        }
      }
      const auto times = uniform_grid(grid.t_end, grid.points);
      const auto traj = integrate_interaction(config, grid.t_end, dt, times);
      result = header("interact", {{"t_end", format_number(grid.t_end)},
                                   {"dt", format_number(dt)},
                                   {"grid", std::to_string(grid.points)}}) +
               write_interaction_csv(traj);
    } else if (cost->parsed()) {
      auto delays = parse_file(delays_path, parse_matrix_csv);
      auto costs = parse_file(costs_path, parse_matrix_csv);
      if (k1 == 0) k1 = delays.cols();
      const DelayCostModel model(std::move(delays), std::move(costs), k1);
      const double d = total_delay(model);
      const double v = unit_cost(model);
      result = header("cost", {{"q", std::to_string(model.q())},
                               {"k1", std::to_string(model.k1())},
                               {"k2", std::to_string(model.k2())}});
      if (d < 0.0) result += "# net amplification: total delay is negative\n";
      result += "quantity,value\ntotal_delay," + format_number(d) + "\nunit_cost," +
                format_number(v) + "\n\nmeta_operation,time,cost\n";
      const auto rows = per_meta_operation(model);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        result += std::to_string(i + 1) + "," + format_number(rows[i].time) + "," +
                  format_number(rows[i].cost) + "\n";
      }
    } else if (bottleneck->parsed()) {
      const auto arrivals = flatten(parse_file(arrivals_path, parse_matrix_csv));
      const auto services = flatten(parse_file(services_path, parse_matrix_csv));
      const auto loads = utilization(arrivals, services, warn);
      result = header("bottleneck", {{"warn", format_number(warn)}}) +
               "node,arrival,service,rho,flag\n";
      for (std::size_t i = 0; i < loads.size(); ++i) {
        result += std::to_string(i + 1) + "," + format_number(arrivals[i]) + "," +
                  format_number(services[i]) + "," + format_number(loads[i].rho) + "," +
                  to_string(loads[i].flag) + "\n";
      }
    } else if (validate->parsed()) {
      const auto& grid = validate_grid;
      const auto doc = parse_file(model_path, parse_model);
      const double dt = grid.dt > 0.0 ? grid.dt : std::min(default_step(doc.graph), grid.t_end);
      const auto times = uniform_grid(grid.t_end, grid.points);
      const auto traj = integrate(doc.graph, grid.t_end, dt, times);
      const auto summary = ensemble_mean(doc.graph, replications, seed, grid.t_end, times, workers);
      const auto report = compare_to_ode(doc.graph, summary, traj);
      result = header("validate", {{"model", doc.name},
                                   {"replications", std::to_string(replications)},
                                   {"seed", std::to_string(seed)},
                                   {"t_end", format_number(grid.t_end)},
                                   {"dt", format_number(dt)},
                                   {"grid", std::to_string(grid.points)}}) +
               "t,state,mean,ode,abs_diff,stderr,pass\n";
      for (const auto& c : report.cells) {
        result += format_number(c.time) + "," + doc.graph.states[c.state] + "," +
                  format_number(c.mean) + "," + format_number(c.expected) + "," +
                  format_number(c.abs_diff) + "," + format_number(c.std_error) + "," +
                  (c.pass ? "1" : "0") + "\n";
      }
      result += "# passed " + std::to_string(report.passed) + "/" +
                std::to_string(report.cells.size()) + " cells, required fraction " +
                format_number(kRequiredPassFraction) + ": " +
                (report.overall_pass ? "PASS" : "FAIL") + "\n";
      if (!report.overall_pass) code = kExitValidation;
    }
  } catch (const NumericError& e) {
    err << "bankflow: numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    err << "bankflow: " << e.what() << "\n";
    return kExitInput;
  }

  if (!out_path.empty()) {
    std::ofstream file(out_path, std::ios::binary);
    if (!(file << result)) {
      err << "bankflow: " << out_path << ": cannot write\n";
      return kExitUsage;
    }
  } else {
    out << result;
  }
  return code;
}

}  // namespace bankflow
