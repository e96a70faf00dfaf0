#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "netcrit/hamiltonian.hpp"
#include "netcrit/network.hpp"
#include "netcrit/sl_solver.hpp"

namespace netcrit {

enum class StopMode { Tolerance, FixedIterations };
enum class StopReason { ToleranceMet, IterationCap };

std::string_view to_string(StopReason reason) noexcept;

struct AlgorithmParams {
    /// Initial datum on the grid nodes; empty means phi = 0.
    GridFunction initial_datum;
    /// Outer period T. Must match the grid horizon when set.
    std::optional<double> outer_period;
    double tolerance = 0.0;
    std::optional<std::size_t> max_iterations;
    StopMode mode = StopMode::Tolerance;
    /// Lower bound a0 used to seed the lower sequence; computed from the model when absent.
    std::optional<double> a0;
};

struct CriticalRunResult {
    double estimate = 0.0;
    std::vector<double> upper_seq;
    std::vector<double> lower_seq;
    std::vector<double> half_gap_seq;
    std::vector<double> wall_ms_seq;  // cumulative wall time after each iteration
    std::size_t iterations = 0;
    StopReason stop_reason = StopReason::IterationCap;
    double a0 = 0.0;
    double period = 1.0;
    /// v(., kT) at the last iteration.
    GridFunction final_layer;
};

/// Bounds from (phi - v(., kT)) / (kT), with the monotone clamping against the
/// previous iterate and a0.
CriticalRunResult algorithm1(const HamiltonianModel& model, const Network& net, const SpaceTimeGrid& grid,
                             const SolverConfig& config, const AlgorithmParams& params);

/// Bounds from (v(., (k-1)T) - v(., kT)) / T, clamped the same way.
CriticalRunResult algorithm2(const HamiltonianModel& model, const Network& net, const SpaceTimeGrid& grid,
                             const SolverConfig& config, const AlgorithmParams& params);

/// v(., kT) + c kT, an approximate solution of the critical eikonal equation.
GridFunction corrector_estimate(const CriticalRunResult& result, const GridFunction& final_layer, std::size_t k,
                                double period);
GridFunction corrector_estimate(const CriticalRunResult& result);

/// Solver configuration with the minimal flux limiters of `model`.
SolverConfig default_solver_config(const HamiltonianModel& model, const Network& net);

}  // namespace netcrit
