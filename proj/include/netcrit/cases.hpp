#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netcrit/hamiltonian.hpp"
#include "netcrit/network.hpp"

namespace netcrit {

enum class DtPolicy { Beta0Ratio, HalfDx, Dx56 };

std::string_view to_string(DtPolicy policy) noexcept;
DtPolicy parse_dt_policy(std::string_view name);

struct BenchmarkCase {
    std::string name;
    Network network;
    HamiltonianModel model;
    double beta0 = 1.0;
    std::optional<double> exact_c;
    std::optional<double> reference_c;
    std::string reference_note;
    std::vector<DtPolicy> default_policies{DtPolicy::Beta0Ratio, DtPolicy::HalfDx, DtPolicy::Dx56};

    /// Exact value when known, otherwise the reference value.
    std::optional<double> target_c() const { return exact_c ? exact_c : reference_c; }
};

/// Equilateral triangle z1 = (0,0), z2 = (1/2, sqrt(3)/2), z3 = (1,0) with arcs
/// z1->z2, z2->z3, z3->z1, all of length 1.
Network triangle_network();

/// Eight-vertex, twelve-arc traffic circle.
Network traffic_circle_network();

/// A making c = C exact for the s-dependent triangle.
double triangle_dependent_exact_a(double b, double c);
/// A making c = C exact for the s-independent triangle.
double triangle_independent_exact_a(double b, double c);

BenchmarkCase triangle_dependent(double a = 2.0 / 3.0, double b = 0.5, double c = 1.0, double beta0 = 12.0);
BenchmarkCase triangle_independent(double a = 1.0, double b = 0.0, double c = 1.0, double beta0 = 9.1);
BenchmarkCase traffic_circle_dependent();
BenchmarkCase traffic_circle_independent();

/// Registry lookup: triangle-dep, triangle-indep, circle-dep, circle-indep.
BenchmarkCase make_case(std::string_view name);
std::vector<std::string> case_names();

struct DtPolicyInputs {
    double dx = 0.0;
    double min_spacing = 0.0;
    double beta0 = 1.0;
};
double delta_t_policy(DtPolicy policy, const DtPolicyInputs& inputs);

/// Effective minimum arc spacing of `net` for a requested dx.
double min_effective_spacing(const Network& net, double dx);

}  // namespace netcrit
