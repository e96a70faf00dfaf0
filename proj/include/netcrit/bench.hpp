#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netcrit/cases.hpp"
#include "netcrit/critical_value.hpp"

namespace netcrit {

struct EpsilonRule {
    enum class Kind { FractionOfDx, Absolute };
    Kind kind = Kind::FractionOfDx;
    double value = 0.1;

    double resolve(double dx) const { return kind == Kind::FractionOfDx ? value * dx : value; }
};

/// One sweep over a list of space steps.
struct RunSpec {
    /// Registry name; ignored when `network_file` is set.
    std::string case_name;
    /// JSON network description; `model` then names the Hamiltonian source.
    std::optional<std::string> network_file;
    std::string model = "quadratic";
    int algorithm = 2;
    std::vector<double> dx_list;
    DtPolicy dt_policy = DtPolicy::Beta0Ratio;
    EpsilonRule epsilon;
    StopMode mode = StopMode::Tolerance;
    std::optional<std::size_t> fixed_k;
    std::optional<std::size_t> max_iterations;
    std::string output;        // table CSV; empty means stdout
    std::string trace_output;  // per-iteration CSV; empty means none
    std::string snapshot_output;
    std::vector<double> snapshot_times;
    /// When false the wall_ms columns are written as 0 so reruns diff cleanly.
    bool record_wall_time = true;
    std::size_t threads = 0;
};

/// Throws ConfigError on an inconsistent spec.
void validate(const RunSpec& spec);

RunSpec parse_run_spec(std::string_view json_text);
RunSpec load_run_spec(const std::string& path);

/// Network description file:
///
///   { "name": "...", "beta0": 9.5,
///     "vertices": [[x, y], ...],
///     "arcs": [{"tail": 0, "head": 1, "length": 1.0,
///               "hamiltonian": {"a": 1, "b0": 0, "b1": 0, "c0": 0, "c1": 0, "c2": 0}}, ...],
///     "reference_c": 0.0, "exact_c": 0.0 }
///
/// With model "quadratic" every arc needs a "hamiltonian" entry
/// (H = a mu^2 + (b0 + b1 s) mu + c0 + c1 s + c2 s^2). Any registry case name
/// reuses that case's arc Hamiltonians and beta0, which needs a matching arc count.
BenchmarkCase parse_network_case(std::string_view json_text, const std::string& model);
BenchmarkCase load_network_case(const std::string& path, const std::string& model);

BenchmarkCase resolve_case(const RunSpec& spec);

struct RunRow {
    std::string case_name;
    int algorithm = 2;
    double dx = 0.0;
    double dt = 0.0;
    double epsilon = 0.0;
    std::size_t k = 0;
    double c_estimate = 0.0;
    std::optional<double> c_reference;
    std::optional<double> abs_error;
    StopReason stop_reason = StopReason::IterationCap;
    double wall_ms = 0.0;
};

/// Layer value at one node; vertex nodes carry `vertex`, arc nodes `arc` and `s`.
struct SnapshotRow {
    double dx = 0.0;
    double time = 0.0;
    std::size_t node = 0;
    std::optional<std::size_t> vertex;
    std::optional<std::size_t> arc;
    double s = 0.0;
    double value = 0.0;
};

struct RunReport {
    std::vector<RunRow> rows;
    std::vector<CriticalRunResult> results;  // parallel to rows
    std::vector<SnapshotRow> snapshots;
};

/// Runs the sweep without touching the file system.
RunReport execute(const RunSpec& spec);

void write_table_csv(std::ostream& out, const RunReport& report);
void write_trace_csv(std::ostream& out, const RunReport& report);
void write_snapshot_csv(std::ostream& out, const RunReport& report);

/// Executes the sweep and writes the requested CSV files.
RunReport run(const RunSpec& spec);

struct CompareRow {
    double dx = 0.0;
    std::size_t k1 = 0;
    std::size_t k2 = 0;
    double reduction_pct = 0.0;
};

struct CompareReport {
    std::vector<CompareRow> rows;
    double mean_reduction_pct = 0.0;
};

/// Pairs two sweeps on the same case and dx list; reduction = 100 (k1 - k2) / k1.
CompareReport compare(const RunSpec& spec_a, const RunSpec& spec_b);
CompareReport compare(const RunReport& a, const RunReport& b);
void write_compare_csv(std::ostream& out, const CompareReport& report);

}  // namespace netcrit
