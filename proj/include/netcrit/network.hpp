#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace netcrit {

using Point = std::vector<double>;

enum class Endpoint { Tail, Head };

struct Vertex {
    std::size_t id = 0;
    Point position;
};

/// Oriented arc of the fixed orientation class; the reversed arc is implicit.
struct Arc {
    std::size_t id = 0;
    std::size_t tail = 0;
    std::size_t head = 0;
    double length = 0.0;
};

struct ArcSpec {
    std::size_t tail = 0;
    std::size_t head = 0;
    std::optional<double> length;  // defaults to the straight-segment length
};

struct Incidence {
    std::size_t arc = 0;
    Endpoint role = Endpoint::Tail;
};

/// Immutable connected embedded graph without loops.
class Network {
public:
    Network(std::vector<Point> vertex_positions, std::span<const ArcSpec> arcs);

    std::size_t num_vertices() const noexcept { return vertices_.size(); }
    std::size_t num_arcs() const noexcept { return arcs_.size(); }

    const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
    const std::vector<Arc>& arcs() const noexcept { return arcs_; }
    const Arc& arc(std::size_t id) const { return arcs_.at(id); }

    /// Arcs touching vertex `v`, with the endpoint role the vertex plays on each.
    const std::vector<Incidence>& incident(std::size_t v) const { return incidence_.at(v); }

    /// Point on the straight segment of `arc` at arc-length `s` (reporting only).
    Point point_on(std::size_t arc, double s) const;

private:
    std::vector<Vertex> vertices_;
    std::vector<Arc> arcs_;
    std::vector<std::vector<Incidence>> incidence_;
};

Network build_network(std::vector<Point> vertex_positions, std::span<const ArcSpec> arcs);

struct GridOptions {
    double dx = 0.0;
    double dt = 0.0;
    double horizon = 1.0;
    double beta0 = 1.0;
    bool enforce_admissible = false;
};

struct ArcNode {
    std::size_t arc = 0;
    std::size_t index = 0;
    double s = 0.0;
};

struct VertexNode {
    std::size_t vertex = 0;
    std::vector<ArcNode> aliases;
};

using NodeLocation = std::variant<ArcNode, VertexNode>;

/// Space-time grid: per-arc uniform nodes, shared vertex nodes, uniform time layers.
///
/// Global node ids put the vertices first (id == vertex id), then the interior
/// nodes of each arc in arc order.
class SpaceTimeGrid {
public:
    SpaceTimeGrid(const Network& net, const GridOptions& options);

    double dx() const noexcept { return dx_; }
    double dt() const noexcept { return dt_; }
    double horizon() const noexcept { return horizon_; }
    double beta0() const noexcept { return beta0_; }

    /// Time step actually marched: horizon / num_time_layers.
    double effective_dt() const noexcept { return horizon_ / static_cast<double>(num_time_layers_); }
    std::size_t num_time_layers() const noexcept { return num_time_layers_; }

    std::size_t num_nodes() const noexcept { return num_nodes_; }
    std::size_t num_arcs() const noexcept { return cells_.size(); }
    std::size_t num_vertices() const noexcept { return num_vertices_; }

    std::size_t cells(std::size_t arc) const { return cells_.at(arc); }
    double spacing(std::size_t arc) const { return spacing_.at(arc); }
    double arc_length(std::size_t arc) const { return length_.at(arc); }
    double min_spacing() const noexcept;

    /// Global id of node `i` (0..cells) on `arc`.
    std::size_t node_id(std::size_t arc, std::size_t i) const;
    NodeLocation locate(std::size_t node) const;

    bool admissible() const noexcept { return admissible_; }

private:
    double dx_;
    double dt_;
    double horizon_;
    double beta0_;
    std::size_t num_time_layers_ = 0;
    std::size_t num_vertices_ = 0;
    std::size_t num_nodes_ = 0;
    bool admissible_ = false;
    std::vector<std::size_t> cells_;
    std::vector<double> spacing_;
    std::vector<double> length_;
    std::vector<std::size_t> tail_;
    std::vector<std::size_t> head_;
    std::vector<std::size_t> interior_offset_;
    std::vector<std::vector<ArcNode>> vertex_aliases_;
};

/// N = ceil(length / dx), robust to the ratio landing one ulp above an integer.
std::size_t arc_cell_count(double length, double dx);

SpaceTimeGrid build_grid(const Network& net, const GridOptions& options);

/// Pair check: dx < |arc| for all arcs, dt < horizon, dt <= min spacing / beta0.
bool is_admissible_pair(const Network& net, double dx, double dt, double horizon, double beta0);

/// One value per global grid node.
using GridFunction = std::vector<double>;

}  // namespace netcrit
