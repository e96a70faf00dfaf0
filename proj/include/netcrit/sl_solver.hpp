#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "netcrit/hamiltonian.hpp"
#include "netcrit/network.hpp"

namespace netcrit {

/// How the per-node minimum over the foot slope lambda is located.
enum class LambdaSearch {
    /// Breakpoints and feasible ends, plus the exact stationary point of each
    /// piece (lambda* = dH/dmu at the cell slope).
    Stationary,
    /// Breakpoints, feasible ends and uniform fill-ins, then golden-section
    /// refinement around the best candidate.
    Sampled,
};

struct SolverConfig {
    std::size_t lambda_samples = 16;
    std::size_t refine_iterations = 60;
    std::vector<double> flux_limiters;
    LambdaSearch search = LambdaSearch::Stationary;
    /// Worker threads for the per-node updates; 0 reads NETCRIT_THREADS (default 1).
    std::size_t threads = 0;
};

/// Linear interpolant of node values `f` on a uniform grid of [0, length] at `s`.
double interpolate(std::span<const double> f, double length, double s);

/// Closed interval of admissible foot slopes at `s`:
/// [max((s - |arc|)/dt, -beta0), min(s/dt, beta0)].
struct LambdaRange {
    double lo = 0.0;
    double hi = 0.0;
};
LambdaRange feasible_lambda_range(double s, double arc_length, double dt, double beta0);

/// Arc operator at node `i` (s = i |arc| / (f.size() - 1)): minimum over feasible
/// lambda of I[f](s - dt lambda) + dt L(s, lambda). `f` holds the arc's node values
/// listed in `dir` orientation.
double arc_update(const HamiltonianModel& model, std::size_t arc, Direction dir, std::span<const double> f,
                  std::size_t i, double dt, LambdaSearch search = LambdaSearch::Stationary,
                  std::size_t lambda_samples = 16, std::size_t refine_iterations = 60);

struct EvolutionResult {
    std::vector<double> snapshot_times;
    std::vector<GridFunction> layers;
    GridFunction final;
    double final_time = 0.0;
};

/// Semi-Lagrangian scheme on a fixed grid. Per-node lambda stencils and the
/// Lagrangian values they need are precomputed once at construction.
class SemiLagrangianSolver {
public:
    SemiLagrangianSolver(const HamiltonianModel& model, const SpaceTimeGrid& grid, SolverConfig config);
    ~SemiLagrangianSolver();
    SemiLagrangianSolver(SemiLagrangianSolver&&) noexcept;
    SemiLagrangianSolver& operator=(SemiLagrangianSolver&&) noexcept;

    const SpaceTimeGrid& grid() const noexcept;
    double dt() const noexcept;

    /// One application of the scheme operator with the effective time step.
    void step(std::span<const double> in, std::span<double> out) const;
    GridFunction step(std::span<const double> in) const;

    /// Applies `steps` time steps in place.
    void advance(GridFunction& v, std::size_t steps) const;

    /// Marches from `initial` through `periods` horizons; snapshots are taken at
    /// the requested multiples of the horizon.
    EvolutionResult evolve(const GridFunction& initial, std::size_t periods,
                           std::span<const double> snapshot_times = {}) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

GridFunction full_step(const HamiltonianModel& model, const SpaceTimeGrid& grid, const SolverConfig& config,
                       const GridFunction& f);

/// Evolution over one horizon of the grid.
EvolutionResult evolve(const HamiltonianModel& model, const SpaceTimeGrid& grid, const SolverConfig& config,
                       const GridFunction& initial, std::span<const double> snapshot_times = {});

}  // namespace netcrit
