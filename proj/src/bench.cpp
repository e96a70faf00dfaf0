#include "netcrit/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "netcrit/error.hpp"

namespace netcrit {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json parse_json(std::string_view text, std::string_view what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        config_error(std::string(what) + ": " + e.what());
    }
}

template <class T>
T field(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        config_error(std::string("field '") + key + "': " + e.what());
    }
}

template <class T>
std::optional<T> optional_field(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return field<T>(j, key);
}

std::string fmt(const char* format, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, x);
    return buf;
}

std::string num(double x) { return fmt("%.10g", x); }
std::string precise(double x) { return fmt("%.12g", x); }
std::string sci(double x) { return fmt("%.6e", x); }

std::shared_ptr<const ArcHamiltonian> quadratic_from(const json& h) {
    auto coef = [&](const char* key) { return optional_field<double>(h, key).value_or(0.0); };
    if (!h.contains("a")) config_error("hamiltonian needs the quadratic coefficient 'a'");
    try {
        return std::make_shared<QuadraticHamiltonian>(coef("a"), coef("b0"), coef("b1"), coef("c0"), coef("c1"),
                                                      coef("c2"));
    } catch (const Error& e) {
        config_error(e.what());
    }
}

}  // namespace

void validate(const RunSpec& spec) {
    if (!spec.network_file && spec.case_name.empty()) config_error("spec needs a case name or a network file");
    if (spec.algorithm != 1 && spec.algorithm != 2) config_error("algorithm must be 1 or 2");
    if (spec.dx_list.empty()) config_error("dx_list must not be empty");
    for (std::size_t i = 0; i < spec.dx_list.size(); ++i) {
        if (!(spec.dx_list[i] > 0.0)) config_error("dx values must be positive");
        if (i > 0 && !(spec.dx_list[i] < spec.dx_list[i - 1])) config_error("dx_list must be strictly decreasing");
    }
    if (!(spec.epsilon.value > 0.0)) config_error("epsilon must be positive");
    if (spec.mode == StopMode::FixedIterations && (!spec.fixed_k || *spec.fixed_k == 0))
        config_error("fixed-k mode needs fixed_k > 0");
    if (spec.max_iterations && *spec.max_iterations == 0) config_error("max_iterations must be positive");
    for (double t : spec.snapshot_times) {
        if (!(t >= 0.0) || std::abs(t - std::round(t)) > 1e-12) config_error("snapshot times must be whole periods");
    }
}

RunSpec parse_run_spec(std::string_view json_text) {
    const json j = parse_json(json_text, "run spec");
    if (!j.is_object()) config_error("run spec must be a JSON object");
    RunSpec spec;
    spec.case_name = optional_field<std::string>(j, "case").value_or("");
    spec.network_file = optional_field<std::string>(j, "network_file");
    spec.model = optional_field<std::string>(j, "model").value_or("quadratic");
    spec.algorithm = optional_field<int>(j, "algorithm").value_or(2);
    spec.dx_list = field<std::vector<double>>(j, "dx_list");
    spec.dt_policy = parse_dt_policy(optional_field<std::string>(j, "dt_policy").value_or("beta0_ratio"));

    if (j.contains("epsilon")) {
        const json& e = j.at("epsilon");
        if (e.contains("fraction_of_dx")) {
            spec.epsilon = {EpsilonRule::Kind::FractionOfDx, field<double>(e, "fraction_of_dx")};
        } else if (e.contains("absolute")) {
            spec.epsilon = {EpsilonRule::Kind::Absolute, field<double>(e, "absolute")};
        } else {
            config_error("epsilon needs 'fraction_of_dx' or 'absolute'");
        }
    }

    const std::string mode = optional_field<std::string>(j, "mode").value_or("tolerance");
    if (mode == "tolerance")
        spec.mode = StopMode::Tolerance;
    else if (mode == "fixed-k")
        spec.mode = StopMode::FixedIterations;
    else
        config_error("mode must be 'tolerance' or 'fixed-k'");
    spec.fixed_k = optional_field<std::size_t>(j, "fixed_k");
    spec.max_iterations = optional_field<std::size_t>(j, "max_iterations");
    spec.output = optional_field<std::string>(j, "output").value_or("");
    spec.trace_output = optional_field<std::string>(j, "trace_output").value_or("");
    spec.snapshot_output = optional_field<std::string>(j, "snapshot_output").value_or("");
    spec.snapshot_times = optional_field<std::vector<double>>(j, "snapshot_times").value_or(std::vector<double>{});
    spec.record_wall_time = optional_field<bool>(j, "record_wall_time").value_or(true);
    spec.threads = optional_field<std::size_t>(j, "threads").value_or(0);
    validate(spec);
    return spec;
}

RunSpec load_run_spec(const std::string& path) { return parse_run_spec(read_file(path)); }

BenchmarkCase parse_network_case(std::string_view json_text, const std::string& model) {
    const json j = parse_json(json_text, "network file");
    if (!j.is_object()) config_error("network file must be a JSON object");

    std::vector<Point> vertices;
    for (const json& v : field<json>(j, "vertices")) {
        try {
            vertices.push_back(v.get<Point>());
        } catch (const json::exception& e) {
            config_error(std::string("vertex: ") + e.what());
        }
    }
    std::vector<ArcSpec> arcs;
    const json arc_list = field<json>(j, "arcs");
    for (const json& a : arc_list) {
        const auto tail = field<long long>(a, "tail");
        const auto head = field<long long>(a, "head");
        if (tail < 0 || head < 0) config_error("arc endpoints must be non-negative vertex ids");
        arcs.push_back(ArcSpec{static_cast<std::size_t>(tail), static_cast<std::size_t>(head),
                               optional_field<double>(a, "length")});
    }
    Network net(std::move(vertices), arcs);
    const std::string name = optional_field<std::string>(j, "name").value_or("network");

    std::vector<std::shared_ptr<const ArcHamiltonian>> hams;
    std::optional<double> beta0 = optional_field<double>(j, "beta0");
    if (model == "quadratic") {
        for (const json& a : arc_list) {
            if (!a.contains("hamiltonian")) config_error("model 'quadratic' needs a hamiltonian on every arc");
            hams.push_back(quadratic_from(a.at("hamiltonian")));
        }
    } else {
        const BenchmarkCase base = make_case(model);
        if (base.network.num_arcs() != net.num_arcs())
            config_error("model '" + model + "' has " + std::to_string(base.network.num_arcs()) + " arcs, network has " +
                         std::to_string(net.num_arcs()));
        for (std::size_t a = 0; a < net.num_arcs(); ++a) hams.push_back(base.model.arc_ptr(a));
        if (!beta0) beta0 = base.beta0;
    }
    if (!beta0 || !(*beta0 > 0.0)) config_error("network file needs a positive beta0");

    HamiltonianModel ham_model(name, net, std::move(hams), *beta0);
    BenchmarkCase out{name, std::move(net), std::move(ham_model), *beta0, optional_field<double>(j, "exact_c"),
                      optional_field<double>(j, "reference_c"), ""};
    if (out.exact_c)
        out.reference_note = "exact";
    else if (out.reference_c)
        out.reference_note = "supplied by the network file";
    return out;
}

BenchmarkCase load_network_case(const std::string& path, const std::string& model) {
    return parse_network_case(read_file(path), model);
}

BenchmarkCase resolve_case(const RunSpec& spec) {
    if (spec.network_file) return load_network_case(*spec.network_file, spec.model);
    return make_case(spec.case_name);
}

RunReport execute(const RunSpec& spec) {
    validate(spec);
    const BenchmarkCase bc = resolve_case(spec);
    const std::optional<double> target = bc.target_c();

    SolverConfig config = default_solver_config(bc.model, bc.network);
    config.threads = spec.threads;
    const CriticalBounds bounds = compute_critical_bounds(bc.model, bc.network);

    RunReport report;
    for (double dx : spec.dx_list) {
        const double dt =
            delta_t_policy(spec.dt_policy, {dx, min_effective_spacing(bc.network, dx), bc.beta0});
        const SpaceTimeGrid grid(bc.network, GridOptions{dx, dt, 1.0, bc.beta0, false});

        AlgorithmParams params;
        params.tolerance = spec.epsilon.resolve(dx);
        params.mode = spec.mode;
        params.a0 = bounds.a0;
        params.max_iterations = spec.mode == StopMode::FixedIterations ? spec.fixed_k : spec.max_iterations;

        CriticalRunResult result = spec.algorithm == 1 ? algorithm1(bc.model, bc.network, grid, config, params)
                                                       : algorithm2(bc.model, bc.network, grid, config, params);
        if (!spec.record_wall_time) std::fill(result.wall_ms_seq.begin(), result.wall_ms_seq.end(), 0.0);

        RunRow row;
        row.case_name = bc.name;
        row.algorithm = spec.algorithm;
        row.dx = dx;
        row.dt = grid.effective_dt();
        row.epsilon = params.tolerance;
        row.k = result.iterations;
        row.c_estimate = result.estimate;
        row.c_reference = target;
        if (target) row.abs_error = std::abs(result.estimate - *target);
        row.stop_reason = result.stop_reason;
        row.wall_ms = result.wall_ms_seq.empty() ? 0.0 : result.wall_ms_seq.back();

        if (!spec.snapshot_times.empty()) {
            const double last = *std::max_element(spec.snapshot_times.begin(), spec.snapshot_times.end());
            const SemiLagrangianSolver solver(bc.model, grid, config);
            const auto periods = static_cast<std::size_t>(std::llround(last));
            const EvolutionResult evo =
                solver.evolve(GridFunction(grid.num_nodes(), 0.0), periods, spec.snapshot_times);
            for (std::size_t l = 0; l < evo.layers.size(); ++l) {
                for (std::size_t node = 0; node < grid.num_nodes(); ++node) {
                    SnapshotRow snap{dx, evo.snapshot_times[l], node, std::nullopt, std::nullopt, 0.0,
                                     evo.layers[l][node]};
                    const NodeLocation loc = grid.locate(node);
                    if (const auto* v = std::get_if<VertexNode>(&loc)) {
                        snap.vertex = v->vertex;
                    } else {
                        const auto& a = std::get<ArcNode>(loc);
                        snap.arc = a.arc;
                        snap.s = a.s;
                    }
                    report.snapshots.push_back(snap);
                }
            }
        }

        report.rows.push_back(std::move(row));
        report.results.push_back(std::move(result));
    }
    return report;
}

void write_table_csv(std::ostream& out, const RunReport& report) {
    out << "case,algorithm,dx,dt,epsilon,k,c_estimate,c_reference,abs_error,stop_reason,wall_ms\n";
    for (const RunRow& r : report.rows) {
        out << r.case_name << ',' << r.algorithm << ',' << num(r.dx) << ',' << num(r.dt) << ',' << num(r.epsilon)
            << ',' << r.k << ',' << precise(r.c_estimate) << ',' << (r.c_reference ? precise(*r.c_reference) : "")
            << ',' << (r.abs_error ? sci(*r.abs_error) : "") << ',' << to_string(r.stop_reason) << ','
            << fmt("%.3f", r.wall_ms) << '\n';
    }
}

void write_trace_csv(std::ostream& out, const RunReport& report) {
    out << "case,algorithm,dx,k,upper,lower,midpoint,half_gap,abs_error,wall_ms\n";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const RunRow& r = report.rows[i];
        const CriticalRunResult& res = report.results[i];
        for (std::size_t k = 0; k < res.upper_seq.size(); ++k) {
            const double mid = 0.5 * (res.upper_seq[k] + res.lower_seq[k]);
            out << r.case_name << ',' << r.algorithm << ',' << num(r.dx) << ',' << k + 1 << ','
                << precise(res.upper_seq[k]) << ',' << precise(res.lower_seq[k]) << ',' << precise(mid) << ','
                << sci(res.half_gap_seq[k]) << ',' << (r.c_reference ? sci(std::abs(mid - *r.c_reference)) : "")
                << ',' << fmt("%.3f", res.wall_ms_seq[k]) << '\n';
        }
    }
}

void write_snapshot_csv(std::ostream& out, const RunReport& report) {
    out << "dx,time,node,vertex,arc,s,value\n";
    for (const SnapshotRow& s : report.snapshots) {
        out << num(s.dx) << ',' << num(s.time) << ',' << s.node << ','
            << (s.vertex ? std::to_string(*s.vertex) : "") << ',' << (s.arc ? std::to_string(*s.arc) : "") << ','
            << num(s.s) << ',' << precise(s.value) << '\n';
    }
}

namespace {

void write_to(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    if (path.empty() || path == "-") {
        writer(std::cout);
        return;
    }
    std::ofstream file(path);
    if (!file) config_error("cannot write '" + path + "'");
    writer(file);
}

}  // namespace

RunReport run(const RunSpec& spec) {
    RunReport report = execute(spec);
    write_to(spec.output, [&](std::ostream& o) { write_table_csv(o, report); });
    if (!spec.trace_output.empty()) write_to(spec.trace_output, [&](std::ostream& o) { write_trace_csv(o, report); });
    if (!spec.snapshot_output.empty())
        write_to(spec.snapshot_output, [&](std::ostream& o) { write_snapshot_csv(o, report); });
    return report;
}

CompareReport compare(const RunReport& a, const RunReport& b) {
    if (a.rows.size() != b.rows.size()) config_error("compared sweeps have different dx lists");
    CompareReport out;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const RunRow& ra = a.rows[i];
        const RunRow& rb = b.rows[i];
        if (ra.case_name != rb.case_name) config_error("compared sweeps run different cases");
        if (ra.dx != rb.dx) config_error("compared sweeps have different dx lists");
        const double reduction =
            100.0 * (static_cast<double>(ra.k) - static_cast<double>(rb.k)) / static_cast<double>(ra.k);
        out.rows.push_back({ra.dx, ra.k, rb.k, reduction});
        out.mean_reduction_pct += reduction;
    }
    if (!out.rows.empty()) out.mean_reduction_pct /= static_cast<double>(out.rows.size());
    return out;
}

CompareReport compare(const RunSpec& spec_a, const RunSpec& spec_b) {
    validate(spec_a);
    validate(spec_b);
    if (spec_a.dx_list != spec_b.dx_list) config_error("compared specs have different dx lists");
    if (spec_a.network_file != spec_b.network_file || spec_a.case_name != spec_b.case_name)
        config_error("compared specs run different cases");
    return compare(execute(spec_a), execute(spec_b));
}

void write_compare_csv(std::ostream& out, const CompareReport& report) {
    out << "dx,k1,k2,reduction_pct\n";
    for (const CompareRow& r : report.rows)
        out << num(r.dx) << ',' << r.k1 << ',' << r.k2 << ',' << fmt("%.2f", r.reduction_pct) << '\n';
    out << "mean,,," << fmt("%.2f", report.mean_reduction_pct) << '\n';
}

}  // namespace netcrit
