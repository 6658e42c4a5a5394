#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "contractforge/adjustment.hpp"
#include "contractforge/agent.hpp"
#include "contractforge/commands.hpp"
#include "contractforge/errors.hpp"
#include "contractforge/report_json.hpp"
#include "contractforge/stackelberg.hpp"
#include "contractforge/truthfulness.hpp"

namespace py = pybind11;
using namespace contractforge;

namespace {

// Reports cross the boundary as JSON text; the python side turns them into dicts.
template <class T>
std::string dump(const T& report) {
  return to_json(report).dump();
}

ContractConfig make_config(double u1, const CostModel& cost, double a_min, double a_max, std::size_t grid,
                           std::size_t workers) {
  ContractConfig cfg(u1, cost);
  cfg.a_min = a_min;
  cfg.a_max = a_max;
  cfg.action_grid_size = grid;
  cfg.workers = workers;
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-stage principal-agent contract analysis";
  m.attr("__version__") = CONTRACTFORGE_VERSION;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<CostModel>(m, "CostModel")
      .def_static("quadratic", &CostModel::quadratic)
      .def_static("power", &CostModel::power, py::arg("p"))
      .def_static("tabulated", &CostModel::tabulated, py::arg("a"), py::arg("phi"))
      .def_static("from_csv", &CostModel::from_csv, py::arg("path"))
      .def_property_readonly("name", &CostModel::name)
      .def("cost", &CostModel::eval_cost, py::arg("a"))
      .def("deriv", &CostModel::eval_deriv, py::arg("a"))
      .def("inv_deriv", &CostModel::inv_deriv, py::arg("u"))
      .def("conjugate", &CostModel::conjugate, py::arg("u"))
      .def("bregman", &CostModel::bregman, py::arg("x"), py::arg("y"))
      .def("__repr__", [](const CostModel& c) { return "CostModel(" + c.name() + ")"; });

  py::class_<IncentiveFunction>(m, "Incentive")
      .def_static("constant", &IncentiveFunction::constant, py::arg("u"))
      .def_static("step", &IncentiveFunction::two_type_step, py::arg("t"), py::arg("u_above"),
                  py::arg("u_below"))
      .def_static("piecewise_linear", &IncentiveFunction::piecewise_linear, py::arg("knots"),
                  py::arg("values"))
      .def_static("staircase", &IncentiveFunction::staircase, py::arg("thresholds"), py::arg("levels"))
      .def("__call__", &IncentiveFunction::value, py::arg("a1"))
      .def_property_readonly("kind", &IncentiveFunction::kind);

  py::class_<ContractConfig>(m, "ContractConfig")
      .def(py::init(&make_config), py::arg("u1"), py::arg("cost"), py::arg("a_min") = 1e-3,
           py::arg("a_max") = 10.0, py::arg("grid") = 2048, py::arg("workers") = 0)
      .def_readonly("u1", &ContractConfig::u1)
      .def_readonly("a_min", &ContractConfig::a_min)
      .def_readonly("a_max", &ContractConfig::a_max)
      .def_readonly("grid", &ContractConfig::action_grid_size);

  m.def("validate_cost", [](const CostModel& c, std::size_t n) { return dump(validate(c, n)); },
        py::arg("cost"), py::arg("samples") = 100);
  m.def("best_response",
        [](const ContractConfig& cfg, double u, double theta) { return best_response(cfg, u, AgentType(theta)); },
        py::arg("cfg"), py::arg("u"), py::arg("theta"));
  m.def("best_response_value",
        [](const ContractConfig& cfg, double u, double theta) {
          return best_response_value(cfg, u, AgentType(theta));
        },
        py::arg("cfg"), py::arg("u"), py::arg("theta"));
  m.def("deviation_search",
        [](const ContractConfig& cfg, const IncentiveFunction& u2, double theta) {
          py::gil_scoped_release release;
          return dump(deviation_search_mh(cfg, u2, AgentType(theta)));
        },
        py::arg("cfg"), py::arg("u2"), py::arg("theta"));
  m.def("check_bregman",
        [](const ContractConfig& cfg, const IncentiveFunction& u2, std::size_t n) {
          py::gil_scoped_release release;
          return dump(check_bregman_truthful(cfg, u2, bregman_grid(cfg, n)));
        },
        py::arg("cfg"), py::arg("u2"), py::arg("grid") = kDefaultBregmanGrid);
  m.def("design_step",
        [](const ContractConfig& cfg, double theta_L, double theta_H, double u_L, double u_H) {
          return dump(design_step(cfg, AgentType(theta_L), AgentType(theta_H), u_L, u_H));
        },
        py::arg("cfg"), py::arg("theta_L"), py::arg("theta_H"), py::arg("u_L"), py::arg("u_H"));
  m.def("consistency_curve", &consistency_curve, py::arg("cfg"), py::arg("u2"), py::arg("a1"));
  m.def("build_fee",
        [](const ContractConfig& cfg, const IncentiveFunction& u2, std::optional<double> a_ref,
           std::optional<std::size_t> nodes) {
          const auto adj = build_truthful_adjustment(cfg, u2, {.a_ref = a_ref, .nodes = nodes});
          return std::make_pair(adj.fee.nodes(), adj.fee.values());
        },
        py::arg("cfg"), py::arg("u2"), py::arg("a_ref") = py::none(), py::arg("nodes") = py::none());
  m.def("solve_complete_info",
        [](const ContractConfig& cfg, double k, double theta) {
          return dump(solve_complete_info(cfg, PrincipalBenefit::linear(k), AgentType(theta)));
        },
        py::arg("cfg"), py::arg("k"), py::arg("theta"));
  m.def("run_command",
        [](const std::string& command, const std::filesystem::path& config, const std::filesystem::path& out,
           std::optional<std::size_t> threads) {
          CommandOptions opts;
          opts.config = config;
          opts.out_dir = out;
          opts.threads = threads;
          opts.quiet = true;
          std::ostringstream sink;
          std::ostringstream err;
          int code = 0;
          {
            py::gil_scoped_release release;
            code = run_command(command, opts, sink, err);
          }
          return std::make_pair(code, err.str());
        },
        py::arg("command"), py::arg("config"), py::arg("out"), py::arg("threads") = py::none());
}
