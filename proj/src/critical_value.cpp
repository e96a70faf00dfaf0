#include "netcrit/critical_value.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "netcrit/error.hpp"

namespace netcrit {

std::string_view to_string(StopReason reason) noexcept {
    return reason == StopReason::ToleranceMet ? "tolerance-met" : "iteration-cap";
}

namespace {

enum class Variant { AprioriBound, SuccessiveLayers };

struct Extrema {
    double lo = kInfinity;
    double hi = -kInfinity;
};

// Node-id order keeps the reduction deterministic.
Extrema scaled_difference(const GridFunction& a, const GridFunction& b, double scale) {
    Extrema e;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double q = (a[i] - b[i]) / scale;
        e.lo = std::min(e.lo, q);
        e.hi = std::max(e.hi, q);
    }
    return e;
}

CriticalRunResult run(Variant variant, const HamiltonianModel& model, const Network& net, const SpaceTimeGrid& grid,
                      const SolverConfig& config, const AlgorithmParams& params) {
    const double period = grid.horizon();
    if (params.outer_period && std::abs(*params.outer_period - period) > 1e-12 * period)
        throw Error(ErrorCode::InvalidArgument, "outer period must equal the grid horizon");
    if (params.mode == StopMode::Tolerance && !(params.tolerance > 0.0))
        throw Error(ErrorCode::InvalidArgument, "tolerance must be positive in stop-on-tolerance mode");
    if (params.mode == StopMode::FixedIterations && (!params.max_iterations || *params.max_iterations == 0))
        throw Error(ErrorCode::InvalidArgument, "fixed-iteration mode needs a positive iteration count");
    if (params.max_iterations && *params.max_iterations == 0)
        throw Error(ErrorCode::InvalidArgument, "max_iterations must be positive");

    const GridFunction phi =
        params.initial_datum.empty() ? GridFunction(grid.num_nodes(), 0.0) : params.initial_datum;
    if (phi.size() != grid.num_nodes()) throw Error(ErrorCode::InvalidArgument, "initial datum size mismatch");
    for (double x : phi)
        if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteLayer, "non-finite initial datum");

    CriticalRunResult result;
    result.period = period;
    result.a0 = params.a0 ? *params.a0 : compute_critical_bounds(model, net).a0;

    const SemiLagrangianSolver solver(model, grid, config);
    const std::size_t steps = grid.num_time_layers();
    const auto start = std::chrono::steady_clock::now();

    GridFunction previous = phi;
    GridFunction current = phi;
    double upper = kInfinity;
    double lower = result.a0;
    for (std::size_t k = 1;; ++k) {
        solver.advance(current, steps);
        for (double x : current)
            if (!std::isfinite(x))
                throw Error(ErrorCode::NonFiniteLayer, "non-finite layer at iteration " + std::to_string(k));

        const Extrema raw = variant == Variant::AprioriBound
                                ? scaled_difference(phi, current, static_cast<double>(k) * period)
                                : scaled_difference(previous, current, period);
        upper = std::min(upper, raw.hi);
        lower = std::max(lower, raw.lo);

        result.upper_seq.push_back(upper);
        result.lower_seq.push_back(lower);
        result.half_gap_seq.push_back(0.5 * (upper - lower));
        result.wall_ms_seq.push_back(
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
        result.iterations = k;

        const bool capped = params.max_iterations && k >= *params.max_iterations;
        if (params.mode == StopMode::FixedIterations) {
            if (capped) {
                result.stop_reason = StopReason::IterationCap;
                break;
            }
        } else if (upper - lower < 2.0 * params.tolerance) {
            result.stop_reason = StopReason::ToleranceMet;
            break;
        } else if (capped) {
            result.stop_reason = StopReason::IterationCap;
            break;
        }
        if (variant == Variant::SuccessiveLayers) previous = current;
    }
    result.estimate = 0.5 * (upper + lower);
    result.final_layer = std::move(current);
    return result;
}

}  // namespace

CriticalRunResult algorithm1(const HamiltonianModel& model, const Network& net, const SpaceTimeGrid& grid,
                             const SolverConfig& config, const AlgorithmParams& params) {
    return run(Variant::AprioriBound, model, net, grid, config, params);
}

CriticalRunResult algorithm2(const HamiltonianModel& model, const Network& net, const SpaceTimeGrid& grid,
                             const SolverConfig& config, const AlgorithmParams& params) {
    return run(Variant::SuccessiveLayers, model, net, grid, config, params);
}

GridFunction corrector_estimate(const CriticalRunResult& result, const GridFunction& final_layer, std::size_t k,
                                double period) {
    const double shift = result.estimate * static_cast<double>(k) * period;
    GridFunction out(final_layer.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = final_layer[i] + shift;
    return out;
}

GridFunction corrector_estimate(const CriticalRunResult& result) {
    return corrector_estimate(result, result.final_layer, result.iterations, result.period);
}

SolverConfig default_solver_config(const HamiltonianModel& model, const Network& net) {
    SolverConfig config;
    config.flux_limiters = compute_critical_bounds(model, net).flux_limiters;
    return config;
}

}  // namespace netcrit
