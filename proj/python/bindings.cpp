#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bankflow/analysis.hpp"
#include "bankflow/errors.hpp"
#include "bankflow/interaction.hpp"
#include "bankflow/kolmogorov.hpp"
#include "bankflow/model.hpp"
#include "bankflow/model_io.hpp"
#include "bankflow/ssa.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace bankflow;

namespace {

StateGraph make_graph(std::vector<std::string> states, LevelVector initial_levels,
                      const std::vector<std::tuple<std::size_t, std::size_t, double>>& transitions,
                      double source_delta) {
  StateGraph g;
  g.states = std::move(states);
  g.initial_levels = std::move(initial_levels);
  for (const auto& [from, to, rate] : transitions) g.transitions.push_back({from, to, rate});
  g.source_delta = source_delta;
  return g;
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows) { return Matrix::from_rows(rows); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Kolmogorov-equation engine, delayed interaction integrator and stochastic oracle";

  auto base = py::register_exception<Error>(m, "BankflowError");
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<UnsupportedModelError>(m, "UnsupportedModelError", base.ptr());
  py::register_exception<NonUniqueSteadyStateError>(m, "NonUniqueSteadyStateError", base.ptr());
  auto numeric = py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<SingularityError>(m, "SingularityError", numeric.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<StateGraph>(m, "StateGraph")
      .def(py::init(&make_graph), py::arg("states"), py::arg("initial_levels"),
           py::arg("transitions") = std::vector<std::tuple<std::size_t, std::size_t, double>>{},
           py::arg("source_delta") = 0.0)
      .def_readonly("states", &StateGraph::states)
      .def_readonly("initial_levels", &StateGraph::initial_levels)
      .def_property_readonly("transitions",
                             [](const StateGraph& g) {
                               std::vector<std::tuple<std::size_t, std::size_t, double>> out;
                               for (const auto& t : g.transitions) out.emplace_back(t.from, t.to, t.rate);
                               return out;
                             })
      .def_readonly("source_delta", &StateGraph::source_delta)
      .def("__eq__", [](const StateGraph& a, const StateGraph& b) { return a == b; })
      .def("__len__", &StateGraph::size);

  m.def("validate_graph", [](const StateGraph& g) {
    std::vector<std::string> out;
    for (const auto& v : validate_graph(g).violations) out.push_back(v.message);
    return out;
  }, "Violation messages; empty when the graph is valid.");
  m.def("total_population", &total_population);
  m.def("default_step", &default_step);
  m.def("uniform_grid", &uniform_grid, py::arg("t_end"), py::arg("points"));

  m.def("kolmogorov_rhs", [](const StateGraph& g, const LevelVector& levels) {
    return kolmogorov_rhs(g, levels);
  });
  m.def("integrate",
        [](const StateGraph& g, double t_end, double dt, const std::vector<double>& grid) {
          auto traj = integrate(g, t_end, dt, grid);
          return py::make_tuple(traj.times, traj.levels);
        },
        py::arg("graph"), py::arg("t_end"), py::arg("dt"), py::arg("grid"),
        "Returns (times, levels) with levels[s][i] the level of state i at times[s].");
  m.def("steady_state", &steady_state, py::arg("graph"), py::arg("population"));

  py::class_<InteractionConfig>(m, "InteractionConfig")
      .def(py::init<>())
      .def_readwrite("p_B", &InteractionConfig::p_B)
      .def_readwrite("p_C", &InteractionConfig::p_C)
      .def_readwrite("lambda_B", &InteractionConfig::lambda_B)
      .def_readwrite("lambda_C", &InteractionConfig::lambda_C)
      .def_readwrite("tau_B", &InteractionConfig::tau_B)
      .def_readwrite("tau_C", &InteractionConfig::tau_C)
      .def_readwrite("delta_B", &InteractionConfig::delta_B)
      .def_readwrite("delta_C", &InteractionConfig::delta_C)
      .def_readwrite("N_B", &InteractionConfig::N_B)
      .def_readwrite("N_C", &InteractionConfig::N_C);

  m.def("integrate_interaction",
        [](const InteractionConfig& c, double t_end, double dt, const std::vector<double>& grid) {
          auto traj = integrate_interaction(c, t_end, dt, grid);
          return py::make_tuple(traj.times, traj.m_B, traj.m_C);
        },
        py::arg("config"), py::arg("t_end"), py::arg("dt"), py::arg("grid"),
        "Returns (times, m_B, m_C).");

  m.def("mix_seed", &mix_seed, py::arg("seed"), py::arg("replication"));
  m.def("sample_path",
        [](const StateGraph& g, std::uint64_t seed, double t_end, const std::vector<double>& grid) {
          return sample_path(g, seed, t_end, grid).counts;
        },
        py::arg("graph"), py::arg("seed"), py::arg("t_end"), py::arg("grid"));
  m.def("ensemble_mean",
        [](const StateGraph& g, std::size_t reps, std::uint64_t seed, double t_end,
           const std::vector<double>& grid, std::size_t workers) {
          auto s = ensemble_mean(g, reps, seed, t_end, grid, workers);
          return py::make_tuple(s.mean, s.std_error);
        },
        py::arg("graph"), py::arg("replications"), py::arg("seed"), py::arg("t_end"),
        py::arg("grid"), py::arg("workers") = 0, "Returns (mean, stderr) per grid time.");
  m.def("validate_against_ode",
        [](const StateGraph& g, std::size_t reps, std::uint64_t seed, double t_end,
           const std::vector<double>& grid, double dt) {
          auto traj = integrate(g, t_end, dt, grid);
          auto summary = ensemble_mean(g, reps, seed, t_end, grid);
          auto report = compare_to_ode(g, summary, traj);
          return py::make_tuple(report.overall_pass, report.pass_fraction());
        },
        py::arg("graph"), py::arg("replications"), py::arg("seed"), py::arg("t_end"),
        py::arg("grid"), py::arg("dt"), "Returns (overall_pass, pass_fraction).");

  m.def("total_delay", [](const std::vector<std::vector<double>>& d,
                          const std::vector<std::vector<double>>& v) {
    return total_delay(DelayCostModel(to_matrix(d), to_matrix(v)));
  });
  m.def("unit_cost", [](const std::vector<std::vector<double>>& d,
                        const std::vector<std::vector<double>>& v) {
    return unit_cost(DelayCostModel(to_matrix(d), to_matrix(v)));
  });
  m.def("per_meta_operation", [](const std::vector<std::vector<double>>& d,
                                 const std::vector<std::vector<double>>& v) {
    std::vector<std::pair<double, double>> out;
    for (const auto& r : per_meta_operation(DelayCostModel(to_matrix(d), to_matrix(v)))) {
      out.emplace_back(r.time, r.cost);
    }
    return out;
  });
  m.def("utilization",
        [](const std::vector<double>& arrivals, const std::vector<double>& services, double warn) {
          std::vector<std::pair<double, std::string>> out;
          for (const auto& n : utilization(arrivals, services, warn)) {
            out.emplace_back(n.rho, to_string(n.flag));
          }
          return out;
        },
        py::arg("arrivals"), py::arg("services"), py::arg("warn") = kDefaultWarnThreshold);
  m.def("aggregate_index", [](const std::vector<std::vector<double>>& levels,
                              const std::vector<std::vector<double>>& weights) {
    return aggregate_index(to_matrix(levels), AggregateIndexSpec(to_matrix(weights)));
  });

  m.def("parse_model", [](const std::string& text) {
    auto doc = parse_model(text);
    return py::make_tuple(doc.name, doc.graph);
  }, "Returns (name, graph).");
  m.def("serialize_model", [](const std::string& name, const StateGraph& g) {
    ModelDocument doc;
    doc.name = name;
    doc.graph = g;
    return serialize_model(doc);
  });
  m.def("parse_interaction", &parse_interaction);
  m.def("parse_matrix_csv", [](const std::string& text) {
    auto mat = parse_matrix_csv(text);
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < mat.rows(); ++r) rows.emplace_back(mat.row(r).begin(), mat.row(r).end());
    return rows;
  });

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
