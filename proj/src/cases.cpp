#include "netcrit/cases.hpp"

#include <cmath>
#include <memory>

#include "netcrit/error.hpp"

namespace netcrit {

namespace {

using ArcList = std::vector<std::shared_ptr<const ArcHamiltonian>>;

std::shared_ptr<const ArcHamiltonian> quad(double a, double b0, double b1, double c0, double c1, double c2) {
    return std::make_shared<QuadraticHamiltonian>(a, b0, b1, c0, c1, c2);
}

bool close(double x, double y) { return std::abs(x - y) <= 1e-12 * (1.0 + std::abs(y)); }

}  // namespace

std::string_view to_string(DtPolicy policy) noexcept {
    switch (policy) {
        case DtPolicy::Beta0Ratio: return "beta0_ratio";
        case DtPolicy::HalfDx: return "half_dx";
        case DtPolicy::Dx56: return "dx_56";
    }
    return "unknown";
}

DtPolicy parse_dt_policy(std::string_view name) {
    if (name == "beta0_ratio") return DtPolicy::Beta0Ratio;
    if (name == "half_dx") return DtPolicy::HalfDx;
    if (name == "dx_56") return DtPolicy::Dx56;
    throw Error(ErrorCode::ConfigError, "unknown dt policy '" + std::string(name) + "'");
}

Network triangle_network() {
    const double h = std::sqrt(3.0) / 2.0;
    const std::vector<ArcSpec> arcs{{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}};
    return Network({{0.0, 0.0}, {0.5, h}, {1.0, 0.0}}, arcs);
}

Network traffic_circle_network() {
    const double outer = 2.0 * std::sqrt(2.0);
    const double inner = std::sqrt(2.0);
    // z1..z8 -> ids 0..7
    const std::vector<ArcSpec> arcs{
        {0, 1, 1.0},   {0, 2, outer}, {0, 6, outer}, {1, 3, inner}, {1, 7, inner}, {2, 3, 1.0},
        {2, 4, outer}, {3, 5, inner}, {4, 5, 1.0},   {4, 6, outer}, {5, 7, inner}, {6, 7, 1.0},
    };
    return Network({{-2.0, 0.0}, {-1.0, 0.0}, {0.0, 2.0}, {0.0, 1.0}, {2.0, 0.0}, {1.0, 0.0}, {0.0, -2.0}, {0.0, -1.0}},
                   arcs);
}

double triangle_dependent_exact_a(double b, double c) {
    return std::sqrt(c) - 1.0 + 2.0 / (6.0 * b) * (std::pow(c, 1.5) - std::pow(c - 2.0 * b, 1.5));
}

double triangle_independent_exact_a(double b, double c) { return std::sqrt(c) - 1.0 + std::sqrt(c - b); }

BenchmarkCase triangle_dependent(double a, double b, double c, double beta0) {
    if (a < 0.0 || c < 0.0 || !(b > 0.0) || c < 2.0 * b)
        throw Error(ErrorCode::ParameterConstraint, "triangle-dep needs A, C >= 0, B > 0 and C >= 2B");
    Network net = triangle_network();
    // (mu + 2s)^2, mu^2 + 2Bs, (mu + A - 1 + 2s)(mu + 2A) + C expanded in mu
    ArcList arcs{quad(1.0, 0.0, 4.0, 0.0, 0.0, 4.0), quad(1.0, 0.0, 0.0, 0.0, 2.0 * b, 0.0),
                 quad(1.0, 3.0 * a - 1.0, 2.0, 2.0 * a * (a - 1.0) + c, 4.0 * a, 0.0)};
    HamiltonianModel model("triangle-dep", net, std::move(arcs), beta0);
    BenchmarkCase out{"triangle-dep", std::move(net), std::move(model), beta0, std::nullopt, std::nullopt, ""};
    if (close(a, triangle_dependent_exact_a(b, c))) {
        out.exact_c = c;
        out.reference_note = "exact";
    }
    return out;
}

BenchmarkCase triangle_independent(double a, double b, double c, double beta0) {
    if (a < 0.0 || b < 0.0 || c < b) throw Error(ErrorCode::ParameterConstraint, "triangle-indep needs A, B >= 0 and C >= B");
    Network net = triangle_network();
    // (mu + 1)^2, mu^2 + B, (mu + A)(mu + 2A) + C
    ArcList arcs{quad(1.0, 2.0, 0.0, 1.0, 0.0, 0.0), quad(1.0, 0.0, 0.0, b, 0.0, 0.0),
                 quad(1.0, 3.0 * a, 0.0, 2.0 * a * a + c, 0.0, 0.0)};
    HamiltonianModel model("triangle-indep", net, std::move(arcs), beta0);
    BenchmarkCase out{"triangle-indep", std::move(net), std::move(model), beta0, std::nullopt, std::nullopt, ""};
    if (close(a, triangle_independent_exact_a(b, c))) {
        out.exact_c = c;
        out.reference_note = "exact";
    }
    return out;
}

namespace {

// Arc groups of the traffic circle (0-based arc ids).
bool in_group(std::size_t arc, std::initializer_list<std::size_t> ids) {
    for (std::size_t i : ids)
        if (i - 1 == arc) return true;
    return false;
}

BenchmarkCase traffic_circle(std::string name, std::shared_ptr<const ArcHamiltonian> inner, double beta0,
                             double reference, std::string note) {
    Network net = traffic_circle_network();
    const auto outer = quad(0.5, -1.0, 0.0, -4.5, 0.0, 0.0);  // (mu - 1)^2 / 2 - 5
    const auto spokes = quad(0.5, 0.0, 0.0, -5.0, 0.0, 0.0);  // mu^2 / 2 - 5
    ArcList arcs;
    for (std::size_t a = 0; a < net.num_arcs(); ++a) {
        if (in_group(a, {2, 3, 7, 10}))
            arcs.push_back(outer);
        else if (in_group(a, {4, 5, 8, 11}))
            arcs.push_back(inner);
        else
            arcs.push_back(spokes);
    }
    HamiltonianModel model(name, net, std::move(arcs), beta0);
    return BenchmarkCase{std::move(name), std::move(net), std::move(model), beta0, std::nullopt, reference,
                         std::move(note)};
}

}  // namespace

BenchmarkCase traffic_circle_dependent() {
    // (mu + 4 s/|arc|)^2 / 4 on the inner arcs of length sqrt(2)
    const double len = std::sqrt(2.0);
    return traffic_circle("circle-dep", quad(0.25, 0.0, 2.0 / len, 0.0, 0.0, 4.0 / (len * len)), 9.5, 0.259,
                          "computed by Algorithm 2 at dx=1.25e-2, dt=min spacing/9.5, eps=dx/10, "
                          "rounded to three significant figures");
}

BenchmarkCase traffic_circle_independent() {
    return traffic_circle("circle-indep", quad(0.5, 2.0, 0.0, 0.0, 0.0, 0.0), 7.5, -1.50,
                          "computed by Algorithm 2 at dx=1.25e-2, dt=min spacing/7.5, eps=dx/10, "
                          "rounded to three significant figures");
}

BenchmarkCase make_case(std::string_view name) {
    if (name == "triangle-dep") return triangle_dependent();
    if (name == "triangle-indep") return triangle_independent();
    if (name == "circle-dep") return traffic_circle_dependent();
    if (name == "circle-indep") return traffic_circle_independent();
    throw Error(ErrorCode::ConfigError, "unknown case '" + std::string(name) + "'");
}

std::vector<std::string> case_names() { return {"triangle-dep", "triangle-indep", "circle-dep", "circle-indep"}; }

double delta_t_policy(DtPolicy policy, const DtPolicyInputs& in) {
    switch (policy) {
        case DtPolicy::Beta0Ratio: return in.min_spacing / in.beta0;
        case DtPolicy::HalfDx: return in.dx / 2.0;
        case DtPolicy::Dx56: return std::pow(in.dx, 5.0 / 6.0);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown dt policy");
}

double min_effective_spacing(const Network& net, double dx) {
    double best = kInfinity;
    for (const Arc& a : net.arcs()) {
        best = std::min(best, a.length / static_cast<double>(arc_cell_count(a.length, dx)));
    }
    return best;
}

}  // namespace netcrit
