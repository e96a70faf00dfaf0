#include "netcrit/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "netcrit/error.hpp"

namespace netcrit {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::LoopArc: return "LoopArc";
        case ErrorCode::Disconnected: return "Disconnected";
        case ErrorCode::NonpositiveLength: return "NonpositiveLength";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InadmissiblePair: return "InadmissiblePair";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::NonCoercive: return "NonCoercive";
        case ErrorCode::EmptyFeasibleSet: return "EmptyFeasibleSet";
        case ErrorCode::NonFiniteLayer: return "NonFiniteLayer";
        case ErrorCode::ParameterConstraint: return "ParameterConstraint";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

namespace {

double euclidean(const Point& a, const Point& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace

std::size_t arc_cell_count(double length, double dx) {
    auto n = static_cast<std::size_t>(std::ceil(length / dx));
    // ceil of an exactly representable ratio can overshoot by one ulp-scale rounding
    if (n > 1 && length / static_cast<double>(n - 1) <= dx * (1.0 + 1e-14)) --n;
    return std::max<std::size_t>(n, 1);
}

Network::Network(std::vector<Point> vertex_positions, std::span<const ArcSpec> arcs) {
    if (vertex_positions.empty()) throw Error(ErrorCode::InvalidArgument, "network needs at least one vertex");
    if (arcs.empty()) throw Error(ErrorCode::InvalidArgument, "network needs at least one arc");

    const std::size_t dim = vertex_positions.front().size();
    vertices_.reserve(vertex_positions.size());
    for (std::size_t i = 0; i < vertex_positions.size(); ++i) {
        if (vertex_positions[i].size() != dim)
            throw Error(ErrorCode::InvalidArgument, "vertex " + std::to_string(i) + " has inconsistent dimension");
        vertices_.push_back(Vertex{i, std::move(vertex_positions[i])});
    }

    incidence_.resize(vertices_.size());
    arcs_.reserve(arcs.size());
    for (const ArcSpec& spec : arcs) {
        const std::size_t id = arcs_.size();
        if (spec.tail >= vertices_.size() || spec.head >= vertices_.size())
            throw Error(ErrorCode::InvalidArgument, "arc " + std::to_string(id) + " references an unknown vertex");
        if (spec.tail == spec.head) throw Error(ErrorCode::LoopArc, "arc " + std::to_string(id) + " is a loop");
        const double length =
            spec.length ? *spec.length : euclidean(vertices_[spec.tail].position, vertices_[spec.head].position);
        if (!(length > 0.0) || !std::isfinite(length))
            throw Error(ErrorCode::NonpositiveLength, "arc " + std::to_string(id) + " has length " + std::to_string(length));
        arcs_.push_back(Arc{id, spec.tail, spec.head, length});
        incidence_[spec.tail].push_back({id, Endpoint::Tail});
        incidence_[spec.head].push_back({id, Endpoint::Head});
    }

    // reachability from vertex 0, arcs traversed in both directions
    std::vector<bool> seen(vertices_.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (const Incidence& inc : incidence_[v]) {
            const Arc& a = arcs_[inc.arc];
            const std::size_t other = inc.role == Endpoint::Tail ? a.head : a.tail;
            if (!seen[other]) {
                seen[other] = true;
                stack.push_back(other);
            }
        }
    }
    const auto unreached = std::find(seen.begin(), seen.end(), false);
    if (unreached != seen.end())
        throw Error(ErrorCode::Disconnected,
                    "vertex " + std::to_string(unreached - seen.begin()) + " is not reachable from vertex 0");
}

Point Network::point_on(std::size_t arc_id, double s) const {
    const Arc& a = arc(arc_id);
    if (s < 0.0 || s > a.length) throw Error(ErrorCode::OutOfDomain, "arc parameter outside [0, |arc|]");
    const Point& p = vertices_[a.tail].position;
    const Point& q = vertices_[a.head].position;
    const double t = s / a.length;
    Point out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = (1.0 - t) * p[i] + t * q[i];
    return out;
}

Network build_network(std::vector<Point> vertex_positions, std::span<const ArcSpec> arcs) {
    return Network(std::move(vertex_positions), arcs);
}

SpaceTimeGrid::SpaceTimeGrid(const Network& net, const GridOptions& options)
    : dx_(options.dx), dt_(options.dt), horizon_(options.horizon), beta0_(options.beta0) {
    if (!(dx_ > 0.0) || !(dt_ > 0.0) || !(horizon_ > 0.0) || !(beta0_ > 0.0))
        throw Error(ErrorCode::InvalidArgument, "dx, dt, horizon and beta0 must be positive");

    num_vertices_ = net.num_vertices();
    num_time_layers_ = static_cast<std::size_t>(std::ceil(horizon_ / dt_ * (1.0 - 1e-14)));
    num_time_layers_ = std::max<std::size_t>(num_time_layers_, 1);

    std::size_t next = num_vertices_;
    for (const Arc& a : net.arcs()) {
        const std::size_t n = arc_cell_count(a.length, dx_);
        cells_.push_back(n);
        spacing_.push_back(a.length / static_cast<double>(n));
        length_.push_back(a.length);
        tail_.push_back(a.tail);
        head_.push_back(a.head);
        interior_offset_.push_back(next);
        next += n - 1;
    }
    num_nodes_ = next;

    vertex_aliases_.resize(num_vertices_);
    for (std::size_t v = 0; v < num_vertices_; ++v) {
        for (const Incidence& inc : net.incident(v)) {
            const std::size_t i = inc.role == Endpoint::Tail ? 0 : cells_[inc.arc];
            vertex_aliases_[v].push_back(ArcNode{inc.arc, i, inc.role == Endpoint::Tail ? 0.0 : length_[inc.arc]});
        }
    }

    admissible_ = is_admissible_pair(net, dx_, dt_, horizon_, beta0_);
    if (options.enforce_admissible && !admissible_)
        throw Error(ErrorCode::InadmissiblePair, "(dx, dt) = (" + std::to_string(dx_) + ", " + std::to_string(dt_) +
                                                     ") violates the admissibility conditions");
}

double SpaceTimeGrid::min_spacing() const noexcept {
    return *std::min_element(spacing_.begin(), spacing_.end());
}

std::size_t SpaceTimeGrid::node_id(std::size_t arc, std::size_t i) const {
    const std::size_t n = cells_.at(arc);
    if (i > n) throw Error(ErrorCode::OutOfDomain, "node index beyond arc end");
    if (i == 0) return tail_[arc];
    if (i == n) return head_[arc];
    return interior_offset_[arc] + i - 1;
}

NodeLocation SpaceTimeGrid::locate(std::size_t node) const {
    if (node >= num_nodes_) throw Error(ErrorCode::OutOfDomain, "node id " + std::to_string(node) + " out of range");
    if (node < num_vertices_) return VertexNode{node, vertex_aliases_[node]};
    const auto it = std::upper_bound(interior_offset_.begin(), interior_offset_.end(), node);
    // arcs with a single cell have no interior nodes and share offsets with their successor
    auto arc = static_cast<std::size_t>(std::distance(interior_offset_.begin(), it)) - 1;
    const std::size_t i = node - interior_offset_[arc] + 1;
    return ArcNode{arc, i, static_cast<double>(i) * spacing_[arc]};
}

SpaceTimeGrid build_grid(const Network& net, const GridOptions& options) { return SpaceTimeGrid(net, options); }

bool is_admissible_pair(const Network& net, double dx, double dt, double horizon, double beta0) {
    if (!(dx > 0.0) || !(dt > 0.0) || !(dt < horizon)) return false;
    double min_spacing = std::numeric_limits<double>::infinity();
    for (const Arc& a : net.arcs()) {
        if (!(dx < a.length)) return false;
        min_spacing = std::min(min_spacing, a.length / static_cast<double>(arc_cell_count(a.length, dx)));
    }
    // relative slack absorbs the rounding in dt = min_spacing / beta0
    return dt <= min_spacing / beta0 * (1.0 + 1e-12);
}

}  // namespace netcrit
