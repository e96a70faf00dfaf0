#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "netcrit/bench.hpp"
#include "netcrit/error.hpp"

using namespace netcrit;

namespace {

enum Exit { Ok = 0, ConfigFailure = 1, NumericalFailure = 2 };

struct SpecFlags {
    std::string config;
    std::string case_name;
    std::string network;
    std::string model;
    std::optional<int> algorithm;
    std::vector<double> dx;
    std::string dt_policy;
    std::optional<double> eps_fraction;
    std::optional<double> eps_absolute;
    std::string mode;
    std::optional<std::size_t> fixed_k;
    std::optional<std::size_t> max_iterations;
    std::string output;
    std::string trace;
    std::string snapshots;
    std::vector<double> snapshot_times;
    bool no_timing = false;
    std::optional<std::size_t> threads;
};

void add_spec_flags(CLI::App* app, SpecFlags& f, bool with_algorithm) {
    app->add_option("--config", f.config, "JSON run spec; flags override its fields");
    app->add_option("--case", f.case_name, "registry case: triangle-dep, triangle-indep, circle-dep, circle-indep");
    app->add_option("--network", f.network, "JSON network description");
    app->add_option("--model", f.model, "'quadratic' (per-arc coefficients in the network file) or a case name");
    if (with_algorithm) app->add_option("--algorithm", f.algorithm, "1 or 2")->check(CLI::IsMember({1, 2}));
    app->add_option("--dx", f.dx, "space steps, strictly decreasing");
    app->add_option("--dt-policy", f.dt_policy, "beta0_ratio, half_dx or dx_56");
    auto* frac = app->add_option("--eps-fraction", f.eps_fraction, "epsilon = fraction * dx");
    app->add_option("--eps-absolute", f.eps_absolute, "fixed epsilon")->excludes(frac);
    app->add_option("--mode", f.mode, "tolerance or fixed-k");
    app->add_option("--fixed-k", f.fixed_k, "iterations in fixed-k mode");
    app->add_option("--max-iterations", f.max_iterations, "iteration cap in tolerance mode");
    app->add_option("--output,-o", f.output, "table CSV (default stdout)");
    if (with_algorithm) {
        app->add_option("--trace", f.trace, "per-iteration CSV");
        app->add_option("--snapshots", f.snapshots, "layer snapshot CSV");
        app->add_option("--snapshot-times", f.snapshot_times, "whole periods at which layers are stored");
    }
    app->add_flag("--no-timing", f.no_timing, "write wall_ms as 0");
    app->add_option("--threads", f.threads, "worker threads (default: NETCRIT_THREADS or 1)");
}

RunSpec build_spec(const SpecFlags& f) {
    RunSpec spec = f.config.empty() ? RunSpec{} : load_run_spec(f.config);
    if (!f.case_name.empty()) spec.case_name = f.case_name;
    if (!f.network.empty()) spec.network_file = f.network;
    if (!f.model.empty()) spec.model = f.model;
    if (f.algorithm) spec.algorithm = *f.algorithm;
    if (!f.dx.empty()) spec.dx_list = f.dx;
    if (!f.dt_policy.empty()) spec.dt_policy = parse_dt_policy(f.dt_policy);
    if (f.eps_fraction) spec.epsilon = {EpsilonRule::Kind::FractionOfDx, *f.eps_fraction};
    if (f.eps_absolute) spec.epsilon = {EpsilonRule::Kind::Absolute, *f.eps_absolute};
    if (f.mode == "tolerance") spec.mode = StopMode::Tolerance;
    else if (f.mode == "fixed-k") spec.mode = StopMode::FixedIterations;
    else if (!f.mode.empty()) throw Error(ErrorCode::ConfigError, "mode must be 'tolerance' or 'fixed-k'");
    if (f.fixed_k) {
        spec.fixed_k = f.fixed_k;
        if (f.mode.empty()) spec.mode = StopMode::FixedIterations;
    }
    if (f.max_iterations) spec.max_iterations = f.max_iterations;
    if (!f.output.empty()) spec.output = f.output;
    if (!f.trace.empty()) spec.trace_output = f.trace;
    if (!f.snapshots.empty()) spec.snapshot_output = f.snapshots;
    if (!f.snapshot_times.empty()) spec.snapshot_times = f.snapshot_times;
    if (f.no_timing) spec.record_wall_time = false;
    if (f.threads) spec.threads = *f.threads;
    validate(spec);
    return spec;
}

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonCoercive:
        case ErrorCode::EmptyFeasibleSet:
        case ErrorCode::NonFiniteLayer:
        case ErrorCode::OutOfDomain: return NumericalFailure;
        default: return ConfigFailure;
    }
}

void list_cases() {
    std::cout << "case,beta0,a0,target_c,note\n";
    for (const std::string& name : case_names()) {
        const BenchmarkCase bc = make_case(name);
        const CriticalBounds b = compute_critical_bounds(bc.model, bc.network);
        char line[256];
        std::snprintf(line, sizeof line, "%s,%g,%.10g,%.10g,", bc.name.c_str(), bc.beta0, b.a0, *bc.target_c());
        std::cout << line << '"' << bc.reference_note << "\"\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Critical values of eikonal Hamilton-Jacobi equations on networks"};
    app.require_subcommand(1);

    SpecFlags run_flags;
    auto* run_cmd = app.add_subcommand("run", "sweep dx for one case and write the result table");
    add_spec_flags(run_cmd, run_flags, true);

    SpecFlags cmp_flags;
    std::string config_a, config_b;
    int alg_a = 1, alg_b = 2;
    auto* cmp_cmd = app.add_subcommand("compare", "iteration counts of two algorithms over the same sweep");
    add_spec_flags(cmp_cmd, cmp_flags, false);
    cmp_cmd->add_option("--config-a", config_a, "JSON spec of the first sweep");
    cmp_cmd->add_option("--config-b", config_b, "JSON spec of the second sweep");
    cmp_cmd->add_option("--algorithm-a", alg_a, "algorithm of the first sweep")->check(CLI::IsMember({1, 2}));
    cmp_cmd->add_option("--algorithm-b", alg_b, "algorithm of the second sweep")->check(CLI::IsMember({1, 2}));

    app.add_subcommand("cases", "list the built-in cases");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? Ok : ConfigFailure;
    }

    try {
        if (run_cmd->parsed()) {
            run(build_spec(run_flags));
        } else if (cmp_cmd->parsed()) {
            auto side = [&](const std::string& config, int alg) {
                SpecFlags f = cmp_flags;
                if (!config.empty()) f.config = config;
                RunSpec spec = build_spec(f);
                if (config.empty()) spec.algorithm = alg;
                spec.output.clear();
                spec.trace_output.clear();
                spec.snapshot_output.clear();
                spec.snapshot_times.clear();
                return spec;
            };
            const CompareReport report = compare(side(config_a, alg_a), side(config_b, alg_b));
            if (cmp_flags.output.empty() || cmp_flags.output == "-") {
                write_compare_csv(std::cout, report);
            } else {
                std::ofstream out(cmp_flags.output);
                if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + cmp_flags.output + "'");
                write_compare_csv(out, report);
            }
        } else {
            list_cases();
        }
    } catch (const Error& e) {
        std::cerr << "netcrit: " << to_string(e.code()) << ": " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "netcrit: " << e.what() << '\n';
        return NumericalFailure;
    }
    return Ok;
}
