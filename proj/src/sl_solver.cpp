#include "netcrit/sl_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>

#include "line_search.hpp"
#include "netcrit/error.hpp"
#include "worker_pool.hpp"

namespace netcrit {

namespace {

constexpr double kNodeSnap = 1e-12;

// Hamiltonian of one arc seen in a given orientation.
struct OrientedArc {
    const ArcHamiltonian* h = nullptr;
    double length = 0.0;
    bool reversed = false;

    double value(double s, double mu) const { return reversed ? h->value(length - s, -mu) : h->value(s, mu); }
    double slope(double s, double mu) const { return reversed ? -h->slope(length - s, -mu) : h->slope(s, mu); }
};

// Foot point s - dt*lambda expressed as a cell index and a weight in [0, 1].
struct Candidate {
    double lambda = 0.0;
    std::uint32_t cell = 0;
    double weight = 0.0;
    double lagrangian = 0.0;
    // cell holding the foot for lambda between this candidate and the next one
    std::uint32_t piece_cell = 0;
};

struct NodeStencil {
    double s = 0.0;
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Candidate lists for every node of one arc, stored contiguously.
struct ArcStencils {
    OrientedArc arc;
    std::size_t arc_id = 0;
    Direction dir = Direction::Forward;
    std::size_t cells = 0;
    double spacing = 0.0;
    double dt = 0.0;
    std::vector<NodeStencil> nodes;
    std::vector<Candidate> points;
};

std::uint32_t cell_of(double y, double h, std::size_t cells) {
    const double x = std::floor(y / h);
    if (x <= 0.0) return 0;
    return static_cast<std::uint32_t>(std::min<double>(x, static_cast<double>(cells - 1)));
}

Candidate foot_candidate(double lambda, double y, double h, std::size_t cells) {
    Candidate c;
    c.lambda = lambda;
    c.cell = cell_of(y, h, cells);
    double w = std::clamp((y - c.cell * h) / h, 0.0, 1.0);
    if (w < kNodeSnap) w = 0.0;
    if (w > 1.0 - kNodeSnap) w = 1.0;
    c.weight = w;
    return c;
}

Candidate node_candidate(double lambda, std::size_t node, std::size_t cells) {
    Candidate c;
    c.lambda = lambda;
    if (node == cells) {
        c.cell = static_cast<std::uint32_t>(cells - 1);
        c.weight = 1.0;
    } else {
        c.cell = static_cast<std::uint32_t>(node);
        c.weight = 0.0;
    }
    return c;
}

// Candidates for node i sorted by increasing lambda (decreasing foot).
std::vector<Candidate> node_candidates(const HamiltonianModel& model, const ArcStencils& st, std::size_t i,
                                       std::size_t fill_ins) {
    const double h = st.spacing;
    const double len = st.arc.length;
    const double s = static_cast<double>(i) * h;
    const double dt = st.dt;
    const LambdaRange range = feasible_lambda_range(s, len, dt, model.beta0());
    if (!(range.lo <= range.hi)) throw Error(ErrorCode::EmptyFeasibleSet, "no feasible lambda at s = " + std::to_string(s));

    const bool lo_at_end = range.lo * dt <= s - len + kNodeSnap * h;  // foot at the arc end
    const bool hi_at_start = range.hi * dt >= s - kNodeSnap * h;      // foot at the arc start
    const double y_max = s - dt * range.lo;
    const double y_min = s - dt * range.hi;

    std::vector<Candidate> out;
    out.push_back(lo_at_end ? node_candidate(range.lo, st.cells, st.cells)
                            : foot_candidate(range.lo, y_max, h, st.cells));
    const auto j_hi = static_cast<long>(std::floor(y_max / h));
    const auto j_lo = static_cast<long>(std::ceil(y_min / h));
    for (long j = std::min<long>(j_hi, static_cast<long>(st.cells)); j >= std::max<long>(j_lo, 0); --j) {
        const double y = static_cast<double>(j) * h;
        if (y >= y_max - kNodeSnap * h || y <= y_min + kNodeSnap * h) continue;
        const double lambda = static_cast<double>(static_cast<long>(i) - j) * h / dt;
        out.push_back(node_candidate(lambda, static_cast<std::size_t>(j), st.cells));
    }
    out.push_back(hi_at_start ? node_candidate(range.hi, 0, st.cells) : foot_candidate(range.hi, y_min, h, st.cells));

    if (fill_ins > 0) {
        const double step = (range.hi - range.lo) / static_cast<double>(fill_ins + 1);
        for (std::size_t k = 1; k <= fill_ins; ++k) {
            const double lambda = range.lo + static_cast<double>(k) * step;
            out.push_back(foot_candidate(lambda, s - dt * lambda, h, st.cells));
        }
        std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return a.lambda < b.lambda; });
        out.erase(std::unique(out.begin(), out.end(),
                              [&](const Candidate& a, const Candidate& b) {
                                  return std::abs(a.lambda - b.lambda) <= kNodeSnap * (1.0 + std::abs(a.lambda));
                              }),
                  out.end());
    }

    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].lagrangian = truncated_lagrangian(model, st.arc_id, st.dir, s, out[k].lambda);
        if (k + 1 < out.size()) {
            const double mid = 0.5 * (out[k].lambda + out[k + 1].lambda);
            out[k].piece_cell = cell_of(s - dt * mid, h, st.cells);
        } else {
            out[k].piece_cell = out[k].cell;
        }
    }
    return out;
}

ArcStencils build_stencils(const HamiltonianModel& model, std::size_t arc, Direction dir, std::size_t cells, double dt,
                           std::size_t fill_ins) {
    ArcStencils st;
    st.arc = OrientedArc{&model.arc(arc), model.arc_length(arc), dir == Direction::Reverse};
    st.arc_id = arc;
    st.dir = dir;
    st.cells = cells;
    st.spacing = st.arc.length / static_cast<double>(cells);
    st.dt = dt;
    for (std::size_t i = 0; i <= cells; ++i) {
        auto pts = node_candidates(model, st, i, fill_ins);
        NodeStencil node{static_cast<double>(i) * st.spacing, st.points.size(), st.points.size() + pts.size()};
        st.points.insert(st.points.end(), pts.begin(), pts.end());
        st.nodes.push_back(node);
    }
    return st;
}

// Arc values are read through `at(j)` so the solver can index global layers directly.
template <typename Values>
double foot_value(const Candidate& c, const Values& at) {
    if (c.weight == 0.0) return at(c.cell);
    if (c.weight == 1.0) return at(c.cell + 1);
    const double a = at(c.cell);
    return a + c.weight * (at(c.cell + 1) - a);
}

template <typename Values>
double eval_stationary(const ArcStencils& st, const MomentumInterval& window, std::size_t i, const Values& at) {
    const NodeStencil& node = st.nodes[i];
    const Candidate* pts = st.points.data();
    double best = kInfinity;
    for (std::size_t k = node.begin; k < node.end; ++k)
        best = std::min(best, foot_value(pts[k], at) + st.dt * pts[k].lagrangian);
    for (std::size_t k = node.begin; k + 1 < node.end; ++k) {
        const std::uint32_t j = pts[k].piece_cell;
        const double fj = at(j);
        const double d = (at(j + 1) - fj) / st.spacing;
        if (!(d > window.lo && d < window.hi)) continue;
        const double lambda = st.arc.slope(node.s, d);
        if (!(lambda > pts[k].lambda && lambda < pts[k + 1].lambda)) continue;
        // Fenchel equality at the stationary slope: lambda d - L(lambda) = H(d)
        const double value = fj + (node.s - j * st.spacing) * d - st.dt * st.arc.value(node.s, d);
        best = std::min(best, value);
    }
    return best;
}

template <typename Values>
double eval_sampled(const HamiltonianModel& model, const ArcStencils& st, std::size_t i, const Values& at,
                    std::size_t refine_iterations) {
    const NodeStencil& node = st.nodes[i];
    const Candidate* pts = st.points.data();
    std::size_t best_k = node.begin;
    double best = kInfinity;
    for (std::size_t k = node.begin; k < node.end; ++k) {
        const double v = foot_value(pts[k], at) + st.dt * pts[k].lagrangian;
        if (v < best) {
            best = v;
            best_k = k;
        }
    }
    auto refine = [&](std::size_t k) {
        const std::uint32_t j = pts[k].piece_cell;
        const double fj = at(j);
        const double d = (at(j + 1) - fj) / st.spacing;
        auto objective = [&](double lambda) {
            const double y = node.s - st.dt * lambda;
            return fj + (y - j * st.spacing) * d +
                   st.dt * truncated_lagrangian(model, st.arc_id, st.dir, node.s, lambda);
        };
        const auto m = detail::golden_minimize(objective, pts[k].lambda, pts[k + 1].lambda, 0.0,
                                               static_cast<int>(refine_iterations));
        best = std::min(best, m.fx);
    };
    if (best_k > node.begin) refine(best_k - 1);
    if (best_k + 1 < node.end) refine(best_k);
    return best;
}

std::size_t resolve_threads(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("NETCRIT_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<std::size_t>(n);
    }
    return 1;
}

}  // namespace

double interpolate(std::span<const double> f, double length, double s) {
    if (f.size() < 2) throw Error(ErrorCode::InvalidArgument, "interpolation needs at least two nodes");
    if (!(s >= 0.0 && s <= length)) throw Error(ErrorCode::OutOfDomain, "interpolation point outside the arc");
    const std::size_t cells = f.size() - 1;
    const double h = length / static_cast<double>(cells);
    const auto c = foot_candidate(0.0, s, h, cells);
    return foot_value(c, [&](std::size_t j) { return f[j]; });
}

LambdaRange feasible_lambda_range(double s, double arc_length, double dt, double beta0) {
    return {std::max((s - arc_length) / dt, -beta0), std::min(s / dt, beta0)};
}

double arc_update(const HamiltonianModel& model, std::size_t arc, Direction dir, std::span<const double> f,
                  std::size_t i, double dt, LambdaSearch search, std::size_t lambda_samples,
                  std::size_t refine_iterations) {
    if (f.size() < 2) throw Error(ErrorCode::InvalidArgument, "arc needs at least two nodes");
    if (i >= f.size()) throw Error(ErrorCode::OutOfDomain, "node index beyond arc end");
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
    const std::size_t cells = f.size() - 1;

    ArcStencils st;
    st.arc = OrientedArc{&model.arc(arc), model.arc_length(arc), dir == Direction::Reverse};
    st.arc_id = arc;
    st.dir = dir;
    st.cells = cells;
    st.spacing = st.arc.length / static_cast<double>(cells);
    st.dt = dt;
    auto pts = node_candidates(model, st, i, search == LambdaSearch::Sampled ? lambda_samples : 0);
    st.nodes.push_back({static_cast<double>(i) * st.spacing, 0, pts.size()});
    st.points = std::move(pts);

    auto at = [&](std::size_t j) { return f[j]; };
    return search == LambdaSearch::Stationary ? eval_stationary(st, model.truncation().mu_interval, 0, at)
                                              : eval_sampled(model, st, 0, at, refine_iterations);
}

struct SemiLagrangianSolver::Impl {
    const HamiltonianModel* model = nullptr;
    const SpaceTimeGrid* grid = nullptr;
    SolverConfig config;
    double dt = 0.0;
    std::vector<ArcStencils> stencils;
    std::vector<std::vector<std::size_t>> arc_nodes;  // global id of every arc node
    std::vector<std::vector<std::size_t>> worker_arcs;
    // endpoint values of the arc operator, two per arc
    mutable std::vector<double> endpoint_values;
    std::vector<std::vector<std::size_t>> vertex_endpoints;
    std::unique_ptr<detail::WorkerPool> pool;

    void update_arc(std::size_t a, std::span<const double> in, std::span<double> out) const {
        const ArcStencils& st = stencils[a];
        const std::size_t* ids = arc_nodes[a].data();
        auto at = [&](std::size_t j) { return in[ids[j]]; };
        for (std::size_t i = 0; i <= st.cells; ++i) {
            const double v = config.search == LambdaSearch::Stationary
                                 ? eval_stationary(st, model->truncation().mu_interval, i, at)
                                 : eval_sampled(*model, st, i, at, config.refine_iterations);
            if (i == 0)
                endpoint_values[2 * a] = v;
            else if (i == st.cells)
                endpoint_values[2 * a + 1] = v;
            else
                out[ids[i]] = v;
        }
    }
};

SemiLagrangianSolver::SemiLagrangianSolver(const HamiltonianModel& model, const SpaceTimeGrid& grid,
                                           SolverConfig config)
    : impl_(std::make_unique<Impl>()) {
    if (config.lambda_samples < 3) throw Error(ErrorCode::InvalidArgument, "lambda_samples must be at least 3");
    if (model.num_arcs() != grid.num_arcs()) throw Error(ErrorCode::InvalidArgument, "model and grid arc counts differ");
    if (config.flux_limiters.size() != grid.num_vertices())
        throw Error(ErrorCode::InvalidArgument, "one flux limiter per vertex is required");
    if (std::abs(model.beta0() - grid.beta0()) > 1e-12 * model.beta0())
        throw Error(ErrorCode::InvalidArgument, "model and grid disagree on beta0");

    Impl& m = *impl_;
    m.model = &model;
    m.grid = &grid;
    m.config = std::move(config);
    m.dt = grid.effective_dt();

    const std::size_t fill_ins = m.config.search == LambdaSearch::Sampled ? m.config.lambda_samples : 0;
    for (std::size_t a = 0; a < grid.num_arcs(); ++a) {
        m.stencils.push_back(build_stencils(model, a, Direction::Forward, grid.cells(a), m.dt, fill_ins));
        std::vector<std::size_t> ids;
        for (std::size_t i = 0; i <= grid.cells(a); ++i) ids.push_back(grid.node_id(a, i));
        m.arc_nodes.push_back(std::move(ids));
    }
    m.endpoint_values.assign(2 * grid.num_arcs(), 0.0);
    m.vertex_endpoints.resize(grid.num_vertices());
    for (std::size_t a = 0; a < grid.num_arcs(); ++a) {
        m.vertex_endpoints[m.arc_nodes[a].front()].push_back(2 * a);
        m.vertex_endpoints[m.arc_nodes[a].back()].push_back(2 * a + 1);
    }

    // greedy balance of arcs over workers by node count
    const std::size_t workers = std::min(resolve_threads(m.config.threads), grid.num_arcs());
    m.worker_arcs.resize(workers);
    std::vector<std::size_t> load(workers, 0);
    std::vector<std::size_t> order(grid.num_arcs());
    for (std::size_t a = 0; a < order.size(); ++a) order[a] = a;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return grid.cells(x) > grid.cells(y); });
    for (std::size_t a : order) {
        const auto w = static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
        m.worker_arcs[w].push_back(a);
        load[w] += grid.cells(a) + 1;
    }
    m.pool = std::make_unique<detail::WorkerPool>(workers);
}

SemiLagrangianSolver::~SemiLagrangianSolver() = default;
SemiLagrangianSolver::SemiLagrangianSolver(SemiLagrangianSolver&&) noexcept = default;
SemiLagrangianSolver& SemiLagrangianSolver::operator=(SemiLagrangianSolver&&) noexcept = default;

const SpaceTimeGrid& SemiLagrangianSolver::grid() const noexcept { return *impl_->grid; }
double SemiLagrangianSolver::dt() const noexcept { return impl_->dt; }

void SemiLagrangianSolver::step(std::span<const double> in, std::span<double> out) const {
    const Impl& m = *impl_;
    if (in.size() != m.grid->num_nodes() || out.size() != in.size())
        throw Error(ErrorCode::InvalidArgument, "layer size does not match the grid");
    if (m.pool->size() == 1) {
        for (std::size_t a = 0; a < m.stencils.size(); ++a) m.update_arc(a, in, out);
    } else {
        m.pool->run([&](std::size_t w) {
            for (std::size_t a : m.worker_arcs[w]) m.update_arc(a, in, out);
        });
    }
    for (std::size_t v = 0; v < m.vertex_endpoints.size(); ++v) {
        double through_arcs = kInfinity;
        for (std::size_t e : m.vertex_endpoints[v]) through_arcs = std::min(through_arcs, m.endpoint_values[e]);
        out[v] = std::min(through_arcs, in[v] - m.config.flux_limiters[v] * m.dt);
    }
}

GridFunction SemiLagrangianSolver::step(std::span<const double> in) const {
    GridFunction out(in.size());
    step(in, out);
    return out;
}

void SemiLagrangianSolver::advance(GridFunction& v, std::size_t steps) const {
    GridFunction scratch(v.size());
    for (std::size_t n = 0; n < steps; ++n) {
        step(v, scratch);
        v.swap(scratch);
    }
}

namespace {

void require_finite(const GridFunction& v, double t) {
    for (double x : v)
        if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteLayer, "non-finite value at t = " + std::to_string(t));
}

}  // namespace

EvolutionResult SemiLagrangianSolver::evolve(const GridFunction& initial, std::size_t periods,
                                             std::span<const double> snapshot_times) const {
    const Impl& m = *impl_;
    if (initial.size() != m.grid->num_nodes()) throw Error(ErrorCode::InvalidArgument, "initial datum size mismatch");
    require_finite(initial, 0.0);

    const std::size_t per_period = m.grid->num_time_layers();
    const std::size_t total = per_period * periods;
    const double horizon = m.grid->horizon();

    std::vector<std::pair<std::size_t, double>> wanted;
    for (double t : snapshot_times) {
        const double steps = t / m.dt;
        const double rounded = std::round(steps);
        if (t < 0.0 || std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps) || rounded > static_cast<double>(total))
            throw Error(ErrorCode::InvalidArgument, "snapshot time " + std::to_string(t) + " is not a grid time");
        wanted.emplace_back(static_cast<std::size_t>(rounded), t);
    }
    std::sort(wanted.begin(), wanted.end());

    EvolutionResult result;
    GridFunction v = initial;
    GridFunction scratch(v.size());
    std::size_t done = 0;
    auto take = [&] {
        while (!wanted.empty() && wanted.front().first == done) {
            result.snapshot_times.push_back(static_cast<double>(done) * horizon / static_cast<double>(per_period));
            result.layers.push_back(v);
            wanted.erase(wanted.begin());
        }
    };
    take();
    while (done < total) {
        step(v, scratch);
        v.swap(scratch);
        ++done;
        take();
        if (done % per_period == 0) require_finite(v, static_cast<double>(done) * m.dt);
    }
    result.final = std::move(v);
    result.final_time = static_cast<double>(periods) * horizon;
    return result;
}

GridFunction full_step(const HamiltonianModel& model, const SpaceTimeGrid& grid, const SolverConfig& config,
                       const GridFunction& f) {
    return SemiLagrangianSolver(model, grid, config).step(f);
}

EvolutionResult evolve(const HamiltonianModel& model, const SpaceTimeGrid& grid, const SolverConfig& config,
                       const GridFunction& initial, std::span<const double> snapshot_times) {
    return SemiLagrangianSolver(model, grid, config).evolve(initial, 1, snapshot_times);
}

}  // namespace netcrit
