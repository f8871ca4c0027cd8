#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "schoolchoice/assignment.hpp"
#include "schoolchoice/market.hpp"
#include "schoolchoice/mechanisms.hpp"
#include "schoolchoice/metrics.hpp"
#include "schoolchoice/simulation.hpp"
#include "schoolchoice/theory.hpp"

namespace py = pybind11;
namespace sc = schoolchoice;

namespace {

using Assignment = std::vector<sc::SchoolId>;

sc::Allocation to_allocation(const sc::Market& m, Assignment a) {
  sc::Allocation out(std::move(a));
  sc::require_valid_allocation(m, out);
  return out;
}

sc::MechanismKind mechanism_from(const std::string& name) {
  const auto kind = sc::parse_mechanism(name);
  if (!kind) throw py::value_error("unknown mechanism '" + name + "'");
  return *kind;
}

sc::ManipulationKind manipulation_from(const std::string& name) {
  const auto kind = sc::parse_manipulation(name);
  if (!kind) throw py::value_error("unknown manipulation '" + name + "'");
  return *kind;
}

py::dict stats_dict(const sc::RankStats& s) {
  py::dict d;
  d["n_students"] = s.n_students;
  d["mean"] = s.mean;
  d["max"] = s.max;
  d["variance"] = s.variance;
  d["histogram"] = s.histogram;
  d["unassigned"] = s.unassigned_count;
  d["envy_share"] = s.envy_share;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "School choice mechanisms, metrics and simulation";
  m.attr("__version__") = "0.1.0";
  m.attr("UNASSIGNED") = sc::kUnassigned;

  static py::exception<sc::MarketError> market_error(m, "MarketError", PyExc_ValueError);
  static py::exception<sc::ValidationError> validation_error(m, "ValidationError",
                                                             market_error.ptr());
  static py::exception<sc::ParseError> parse_error(m, "ParseError", market_error.ptr());
  static py::exception<sc::ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<sc::InfeasibleAssignmentError> infeasible(
      m, "InfeasibleAssignmentError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sc::ValidationError& e) {
      py::set_error(validation_error, e.what());
    } catch (const sc::ParseError& e) {
      py::set_error(parse_error, e.what());
    } catch (const sc::MarketError& e) {
      py::set_error(market_error, e.what());
    } catch (const sc::ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const sc::InfeasibleAssignmentError& e) {
      py::set_error(infeasible, e.what());
    }
  });

  py::class_<sc::Market>(m, "Market")
      .def(py::init(&sc::Market::from_lists), py::arg("capacities"),
           py::arg("preferences"), py::arg("priorities"),
           "Schools get labels 1..m, students 1..n; ids in the lists are 0-based.")
      .def_static("parse", &sc::parse_market, py::arg("text"))
      .def_static("load", &sc::load_market, py::arg("path"))
      .def("format", &sc::format_market)
      .def("save", &sc::save_market, py::arg("path"))
      .def("validate",
           [](const sc::Market& mk) {
             std::vector<std::pair<std::string, std::string>> out;
             for (const auto& v : sc::validate_market(mk)) out.emplace_back(v.location, v.message);
             return out;
           })
      .def("balanced", &sc::balance_capacities,
           "Copy with capacities trimmed to the number of students.")
      .def_property_readonly("n_students", &sc::Market::n_students)
      .def_property_readonly("n_schools", &sc::Market::n_schools)
      .def_property_readonly("capacities",
                             [](const sc::Market& mk) {
                               std::vector<std::int32_t> c;
                               for (const auto& s : mk.schools()) c.push_back(s.capacity);
                               return c;
                             })
      .def_property_readonly("school_labels",
                             [](const sc::Market& mk) {
                               std::vector<std::int64_t> c;
                               for (const auto& s : mk.schools()) c.push_back(s.label);
                               return c;
                             })
      .def_property_readonly("student_labels", &sc::Market::student_labels)
      .def_property_readonly("preferences", &sc::Market::all_preferences)
      .def_property_readonly("priorities", &sc::Market::all_priorities)
      .def(py::self == py::self)
      .def("__repr__", [](const sc::Market& mk) {
        std::ostringstream os;
        os << "Market(n_students=" << mk.n_students() << ", n_schools=" << mk.n_schools()
           << ")";
        return os.str();
      });

  m.def("rank_of", &sc::rank_of, py::arg("market"), py::arg("student"), py::arg("school"));
  m.def(
      "effective_ranks",
      [](const sc::Market& mk, Assignment a) {
        return sc::effective_ranks(mk, to_allocation(mk, std::move(a)));
      },
      py::arg("market"), py::arg("assignment"));

  m.def("mechanisms", [] {
    std::vector<std::string> names;
    for (const auto k : sc::kAllMechanisms) names.emplace_back(sc::to_string(k));
    return names;
  });
  m.def(
      "run_mechanism",
      [](const std::string& name, const sc::Market& mk, sc::Seed seed) {
        return sc::run_mechanism(mechanism_from(name), mk, seed).assignment;
      },
      py::arg("name"), py::arg("market"), py::arg("seed") = 0,
      "Student -> school index, UNASSIGNED (-1) for unassigned students.");
  m.def("deferred_acceptance",
        [](const sc::Market& mk) { return sc::deferred_acceptance(mk).assignment; });
  m.def("top_trading_cycles",
        [](const sc::Market& mk) { return sc::top_trading_cycles(mk).assignment; });
  m.def(
      "random_serial_dictatorship",
      [](const sc::Market& mk, sc::Seed seed) {
        return sc::random_serial_dictatorship(mk, seed).assignment;
      },
      py::arg("market"), py::arg("seed"));
  m.def(
      "rank_minimizing",
      [](const sc::Market& mk, sc::Seed seed) {
        return sc::rank_minimizing(mk, seed).assignment;
      },
      py::arg("market"), py::arg("seed") = 0);

  m.def(
      "min_cost_assignment",
      [](const std::vector<std::vector<sc::Cost>>& rows) {
        const std::size_t cols = rows.empty() ? 0 : rows.front().size();
        sc::CostMatrix c(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); ++r) {
          if (rows[r].size() != cols) throw py::value_error("ragged cost matrix");
          for (std::size_t k = 0; k < cols; ++k) c(r, k) = rows[r][k];
        }
        const auto res = sc::min_cost_assignment(c);
        return py::make_tuple(res.row_to_col, res.total_cost);
      },
      py::arg("costs"), "Returns (row_to_col, total_cost).");

  m.def(
      "rank_stats",
      [](const sc::Market& mk, Assignment a) {
        return stats_dict(sc::rank_stats(mk, to_allocation(mk, std::move(a))));
      },
      py::arg("market"), py::arg("assignment"));
  m.def(
      "justified_envy",
      [](const sc::Market& mk, Assignment a) {
        return sc::justified_envy(mk, to_allocation(mk, std::move(a)));
      },
      py::arg("market"), py::arg("assignment"));
  m.def(
      "is_pareto_optimal",
      [](const sc::Market& mk, Assignment a) {
        const auto check = sc::is_pareto_optimal(mk, to_allocation(mk, std::move(a)));
        py::object witness = py::none();
        if (check.witness) witness = py::cast(check.witness->assignment);
        return py::make_tuple(check.optimal, witness);
      },
      py::arg("market"), py::arg("assignment"), "Returns (optimal, witness or None).");

  m.def("generate_uniform_market", &sc::generate_uniform_market, py::arg("n"),
        py::arg("seed"));
  m.def(
      "apply_manipulation",
      [](const sc::Market& mk, Assignment baseline, const std::string& kind, double share,
         sc::Seed seed) {
        return sc::apply_manipulation(mk, to_allocation(mk, std::move(baseline)),
                                      manipulation_from(kind), share, seed);
      },
      py::arg("market"), py::arg("baseline"), py::arg("kind"), py::arg("share"),
      py::arg("seed"));

  m.def(
      "simulate",
      [](std::int32_t n, std::int32_t reps, sc::Seed seed,
         const std::vector<std::string>& mechanisms,
         const std::optional<std::vector<std::string>>& thresholds,
         const std::vector<std::pair<std::string, double>>& manipulations,
         std::int32_t threads) {
        sc::ExperimentConfig config;
        config.n = n;
        config.replications = reps;
        config.master_seed = seed;
        config.threads = threads;
        config.mechanisms.clear();
        for (const auto& name : mechanisms) config.mechanisms.push_back(mechanism_from(name));
        if (thresholds) {
          config.thresholds.clear();
          for (const auto& t : *thresholds) config.thresholds.push_back(sc::Threshold::parse(t));
        }
        for (const auto& [kind, share] : manipulations) {
          config.manipulations.push_back({manipulation_from(kind), share});
        }
        py::gil_scoped_release release;
        return sc::report_csv(sc::run_experiment(config));
      },
      py::arg("n") = 100, py::arg("reps") = 1000, py::arg("seed") = 42,
      py::arg("mechanisms") = std::vector<std::string>{"RM", "TTC", "DA"},
      py::arg("thresholds") = py::none(),
      py::arg("manipulations") = std::vector<std::pair<std::string, double>>{},
      py::arg("threads") = 0, "Runs a seeded experiment and returns the report CSV.");

  auto theory = m.def_submodule("theory", "Closed-form reference quantities");
  theory.def("rsd_rank_probability", &sc::theory::rsd_rank_probability, py::arg("k"),
             py::arg("j"), py::arg("n"));
  theory.def(
      "rsd_no_envy_fraction",
      [](std::int64_t n) { return sc::theory::rsd_no_envy_fraction(n).value; }, py::arg("n"));
  theory.def("rm_rank_pmf", &sc::theory::rm_rank_pmf, py::arg("i"));
  theory.def("rm_envy_limit", [] { return sc::theory::rm_envy_limit().value; });
  theory.def(
      "ttc_expected_avg_rank",
      [](std::int64_t n) { return sc::theory::ttc_expected_avg_rank(n).value; },
      py::arg("n"));
}
