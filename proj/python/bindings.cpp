#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "netcrit/bench.hpp"
#include "netcrit/cases.hpp"
#include "netcrit/critical_value.hpp"
#include "netcrit/error.hpp"
#include "netcrit/hamiltonian.hpp"
#include "netcrit/sl_solver.hpp"

namespace py = pybind11;
using namespace netcrit;

namespace {

SpaceTimeGrid make_grid(const BenchmarkCase& bc, double dx, const std::string& dt_policy, double horizon) {
    const double dt =
        delta_t_policy(parse_dt_policy(dt_policy), {dx, min_effective_spacing(bc.network, dx), bc.beta0});
    return SpaceTimeGrid(bc.network, {dx, dt, horizon, bc.beta0, false});
}

SolverConfig solver_config(const BenchmarkCase& bc, std::size_t threads) {
    SolverConfig config = default_solver_config(bc.model, bc.network);
    config.threads = threads;
    return config;
}

py::dict to_dict(const CriticalRunResult& r) {
    py::dict d;
    d["estimate"] = r.estimate;
    d["iterations"] = r.iterations;
    d["stop_reason"] = std::string(to_string(r.stop_reason));
    d["a0"] = r.a0;
    d["upper"] = r.upper_seq;
    d["lower"] = r.lower_seq;
    d["half_gap"] = r.half_gap_seq;
    d["wall_ms"] = r.wall_ms_seq;
    d["final_layer"] = r.final_layer;
    return d;
}

py::dict critical_value(const BenchmarkCase& bc, int algorithm, double dx, std::optional<double> epsilon,
                        const std::string& dt_policy, std::optional<std::size_t> fixed_k,
                        std::optional<std::size_t> max_iterations, std::size_t threads) {
    if (algorithm != 1 && algorithm != 2) throw Error(ErrorCode::InvalidArgument, "algorithm must be 1 or 2");
    const SpaceTimeGrid grid = make_grid(bc, dx, dt_policy, 1.0);
    AlgorithmParams p;
    p.tolerance = epsilon.value_or(dx / 10.0);
    p.max_iterations = max_iterations;
    if (fixed_k) {
        p.mode = StopMode::FixedIterations;
        p.max_iterations = fixed_k;
    }
    CriticalRunResult r;
    {
        py::gil_scoped_release release;
        const SolverConfig config = solver_config(bc, threads);
        r = algorithm == 1 ? algorithm1(bc.model, bc.network, grid, config, p)
                           : algorithm2(bc.model, bc.network, grid, config, p);
    }
    return to_dict(r);
}

py::list rows_to_list(const RunReport& report) {
    py::list out;
    for (const RunRow& r : report.rows) {
        py::dict d;
        d["case"] = r.case_name;
        d["algorithm"] = r.algorithm;
        d["dx"] = r.dx;
        d["dt"] = r.dt;
        d["epsilon"] = r.epsilon;
        d["k"] = r.k;
        d["c_estimate"] = r.c_estimate;
        d["c_reference"] = r.c_reference;
        d["abs_error"] = r.abs_error;
        d["stop_reason"] = std::string(to_string(r.stop_reason));
        d["wall_ms"] = r.wall_ms;
        out.append(d);
    }
    return out;
}

void write_if(const std::string& path, const RunReport& report, void (*writer)(std::ostream&, const RunReport&)) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
    writer(out, report);
}

}  // namespace

PYBIND11_MODULE(_netcrit, m) {
    m.doc() = "Critical values of eikonal Hamilton-Jacobi equations on networks";

    py::register_exception<Error>(m, "NetcritError", PyExc_RuntimeError);

    py::class_<BenchmarkCase>(m, "Case")
        .def_readonly("name", &BenchmarkCase::name)
        .def_readonly("beta0", &BenchmarkCase::beta0)
        .def_readonly("exact_c", &BenchmarkCase::exact_c)
        .def_readonly("reference_c", &BenchmarkCase::reference_c)
        .def_readonly("reference_note", &BenchmarkCase::reference_note)
        .def_property_readonly("target_c", &BenchmarkCase::target_c)
        .def_property_readonly("num_vertices", [](const BenchmarkCase& bc) { return bc.network.num_vertices(); })
        .def_property_readonly("num_arcs", [](const BenchmarkCase& bc) { return bc.network.num_arcs(); })
        .def_property_readonly("arc_lengths",
                               [](const BenchmarkCase& bc) {
                                   std::vector<double> out;
                                   for (const Arc& a : bc.network.arcs()) out.push_back(a.length);
                                   return out;
                               })
        .def(
            "critical_bounds",
            [](const BenchmarkCase& bc) {
                const CriticalBounds b = compute_critical_bounds(bc.model, bc.network);
                py::dict d;
                d["a0"] = b.a0;
                d["a_gamma"] = b.a_gamma;
                d["flux_limiters"] = b.flux_limiters;
                return d;
            },
            "a0, per-arc envelope levels and minimal flux limiters")
        .def(
            "hamiltonian",
            [](const BenchmarkCase& bc, std::size_t arc, double s, double mu, bool reverse) {
                return eval_hamiltonian(bc.model, arc, reverse ? Direction::Reverse : Direction::Forward, s, mu);
            },
            py::arg("arc"), py::arg("s"), py::arg("mu"), py::arg("reverse") = false)
        .def(
            "truncated_lagrangian",
            [](const BenchmarkCase& bc, std::size_t arc, double s, double lambda, bool reverse, bool numerical) {
                const Direction dir = reverse ? Direction::Reverse : Direction::Forward;
                return numerical ? numerical_truncated_lagrangian(bc.model, arc, dir, s, lambda)
                                 : truncated_lagrangian(bc.model, arc, dir, s, lambda);
            },
            py::arg("arc"), py::arg("s"), py::arg("lam"), py::arg("reverse") = false, py::arg("numerical") = false)
        .def("critical_value", &critical_value, py::arg("algorithm") = 2, py::arg("dx") = 0.1,
             py::arg("epsilon") = py::none(), py::arg("dt_policy") = "beta0_ratio", py::arg("fixed_k") = py::none(),
             py::arg("max_iterations") = py::none(), py::arg("threads") = 0,
             "Runs algorithm 1 or 2; epsilon defaults to dx/10")
        .def(
            "evolve",
            [](const BenchmarkCase& bc, double dx, std::size_t periods, const std::string& dt_policy,
               std::optional<std::vector<double>> initial, std::size_t threads) {
                const SpaceTimeGrid grid = make_grid(bc, dx, dt_policy, 1.0);
                const SemiLagrangianSolver solver(bc.model, grid, solver_config(bc, threads));
                const GridFunction phi = initial.value_or(GridFunction(grid.num_nodes(), 0.0));
                py::gil_scoped_release release;
                return solver.evolve(phi, periods).final;
            },
            py::arg("dx"), py::arg("periods") = 1, py::arg("dt_policy") = "beta0_ratio",
            py::arg("initial") = py::none(), py::arg("threads") = 0,
            "Layer v(., periods) from the given datum (zero by default)");

    m.def("case_names", &case_names);
    m.def("make_case", &make_case, py::arg("name"));
    m.def("network_case", &parse_network_case, py::arg("json_text"), py::arg("model") = "quadratic",
          "Case from a JSON network description");
    m.def(
        "run",
        [](const std::string& spec_json) {
            const RunSpec spec = parse_run_spec(spec_json);
            RunReport report;
            {
                py::gil_scoped_release release;
                report = execute(spec);
            }
            write_if(spec.output, report, write_table_csv);
            write_if(spec.trace_output, report, write_trace_csv);
            write_if(spec.snapshot_output, report, write_snapshot_csv);
            return rows_to_list(report);
        },
        py::arg("spec_json"), "Executes a JSON run spec; CSV files are written only for the paths it names");
    m.def(
        "compare",
        [](const std::string& spec_a, const std::string& spec_b) {
            const RunSpec a = parse_run_spec(spec_a);
            const RunSpec b = parse_run_spec(spec_b);
            CompareReport report;
            {
                py::gil_scoped_release release;
                report = compare(a, b);
            }
            py::list rows;
            for (const CompareRow& r : report.rows) {
                py::dict d;
                d["dx"] = r.dx;
                d["k1"] = r.k1;
                d["k2"] = r.k2;
                d["reduction_pct"] = r.reduction_pct;
                rows.append(d);
            }
            py::dict out;
            out["rows"] = rows;
            out["mean_reduction_pct"] = report.mean_reduction_pct;
            return out;
        },
        py::arg("spec_a"), py::arg("spec_b"));
}
