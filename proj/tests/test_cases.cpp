#include <cmath>

#include "doctest.h"
#include "netcrit/cases.hpp"
#include "netcrit/critical_value.hpp"
#include "netcrit/error.hpp"
#include "oracles.hpp"

using namespace netcrit;

namespace {

std::vector<oracle::Quad> triangle_dep_quads(double a, double b, double c) {
    return {{1, 0, 4, 0, 0, 4}, {1, 0, 0, 0, 2 * b, 0}, {1, 3 * a - 1, 2, 2 * a * (a - 1) + c, 4 * a, 0}};
}

std::vector<oracle::Quad> triangle_indep_quads(double a, double b, double c) {
    return {{1, 2, 0, 1, 0, 0}, {1, 0, 0, b, 0, 0}, {1, 3 * a, 0, 2 * a * a + c, 0, 0}};
}

double estimate(const BenchmarkCase& bc, double dx) {
    const double dt = min_effective_spacing(bc.network, dx) / bc.beta0;
    const SpaceTimeGrid grid(bc.network, {dx, dt, 1.0, bc.beta0, false});
    AlgorithmParams p;
    p.tolerance = dx / 10.0;
    p.max_iterations = 5000;
    return algorithm2(bc.model, bc.network, grid, default_solver_config(bc.model, bc.network), p).estimate;
}

}  // namespace

TEST_CASE("registry") {
    const std::vector<std::pair<std::string, double>> expected{
        {"triangle-dep", 12.0}, {"triangle-indep", 9.1}, {"circle-dep", 9.5}, {"circle-indep", 7.5}};
    REQUIRE(case_names().size() == expected.size());
    for (const auto& [name, beta0] : expected) {
        const BenchmarkCase bc = make_case(name);
        CHECK(bc.name == name);
        CHECK(bc.beta0 == beta0);
        CHECK(bc.model.beta0() == beta0);
        REQUIRE(bc.target_c().has_value());
        CHECK(compute_critical_bounds(bc.model, bc.network).a0 <= *bc.target_c() + 1e-12);
    }
    CHECK(*make_case("triangle-dep").exact_c == 1.0);
    CHECK(*make_case("triangle-indep").exact_c == 1.0);
    CHECK(*make_case("circle-dep").reference_c == doctest::Approx(0.259));
    CHECK(*make_case("circle-indep").reference_c == doctest::Approx(-1.50));
    CHECK_FALSE(make_case("circle-dep").exact_c.has_value());
    CHECK_THROWS_AS(make_case("square"), Error);
}

TEST_CASE("networks") {
    const Network tri = triangle_network();
    CHECK(tri.num_vertices() == 3);
    CHECK(tri.num_arcs() == 3);
    for (const Arc& a : tri.arcs()) CHECK(a.length == 1.0);

    const Network circle = traffic_circle_network();
    CHECK(circle.num_vertices() == 8);
    CHECK(circle.num_arcs() == 12);
    int unit = 0, outer = 0, inner = 0;
    for (const Arc& a : circle.arcs()) {
        if (std::abs(a.length - 1.0) < 1e-12) ++unit;
        if (std::abs(a.length - 2.0 * std::sqrt(2.0)) < 1e-12) ++outer;
        if (std::abs(a.length - std::sqrt(2.0)) < 1e-12) ++inner;
    }
    CHECK(unit == 4);
    CHECK(outer == 4);
    CHECK(inner == 4);
    for (std::size_t v = 0; v < 8; ++v) CHECK(circle.incident(v).size() == 3);
}

TEST_CASE("exact A formulas") {
    CHECK(triangle_dependent_exact_a(0.5, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(triangle_independent_exact_a(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(triangle_independent_exact_a(0.75, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(triangle_dependent_exact_a(1.0, 4.0) ==
          doctest::Approx(1.0 + (8.0 - std::pow(2.0, 1.5)) / 3.0).epsilon(1e-14));

    CHECK(triangle_dependent(triangle_dependent_exact_a(1.0, 4.0), 1.0, 4.0).exact_c == 4.0);
    CHECK_FALSE(triangle_dependent(0.7).exact_c.has_value());
    CHECK_FALSE(triangle_independent(1.1).reference_c.has_value());
}

TEST_CASE("parameter constraints") {
    CHECK_THROWS_AS(triangle_dependent(-0.1), Error);
    CHECK_THROWS_AS(triangle_dependent(0.5, 0.0), Error);
    CHECK_THROWS_AS(triangle_dependent(0.5, 0.6, 1.0), Error);
    CHECK_THROWS_AS(triangle_independent(1.0, 0.5, 0.4), Error);
    CHECK_THROWS_AS(triangle_independent(-1.0), Error);
    try {
        triangle_dependent(0.5, 0.6, 1.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParameterConstraint);
    }
}

TEST_CASE("time step policies") {
    CHECK(delta_t_policy(DtPolicy::Beta0Ratio, {0.1, 0.1, 12.0}) == doctest::Approx(0.1 / 12.0));
    CHECK(delta_t_policy(DtPolicy::HalfDx, {0.1, 0.1, 12.0}) == doctest::Approx(0.05));
    CHECK(delta_t_policy(DtPolicy::Dx56, {0.1, 0.1, 12.0}) == doctest::Approx(0.146779926762207).epsilon(1e-12));
    for (DtPolicy p : {DtPolicy::Beta0Ratio, DtPolicy::HalfDx, DtPolicy::Dx56})
        CHECK(parse_dt_policy(to_string(p)) == p);
    CHECK_THROWS_AS(parse_dt_policy("cfl"), Error);

    const Network circle = traffic_circle_network();
    // sqrt(2) splits into 15 cells of about 0.0943 at dx = 0.1
    CHECK(min_effective_spacing(circle, 0.1) == doctest::Approx(std::sqrt(2.0) / 15.0));
    CHECK(min_effective_spacing(triangle_network(), 0.1) == doctest::Approx(0.1));
}

TEST_CASE("exact critical values agree with the cycle oracle") {
    CHECK(oracle::cycle_critical_value(triangle_dep_quads(2.0 / 3.0, 0.5, 1.0), {1, 1, 1}) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(oracle::cycle_critical_value(triangle_indep_quads(1.0, 0.0, 1.0), {1, 1, 1}) ==
          doctest::Approx(1.0).epsilon(1e-6));
    const double a = triangle_dependent_exact_a(1.0, 3.0);
    CHECK(oracle::cycle_critical_value(triangle_dep_quads(a, 1.0, 3.0), {1, 1, 1}) ==
          doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("perturbing A moves the estimate with the oracle") {
    const double dx = 0.025;
    for (double factor : {0.9, 1.1}) {
        const double a_dep = 2.0 / 3.0 * factor;
        const double c_dep = oracle::cycle_critical_value(triangle_dep_quads(a_dep, 0.5, 1.0), {1, 1, 1});
        const double e_dep = estimate(triangle_dependent(a_dep), dx);
        CHECK(std::abs(e_dep - c_dep) <= 0.03);
        // below the exact A the envelope of mu^2 + s pins c at 1
        if (factor < 1.0)
            CHECK(c_dep == doctest::Approx(1.0).epsilon(1e-9));
        else
            CHECK((e_dep - 1.0) * (c_dep - 1.0) > 0.0);

        const double a_ind = factor;
        const double c_ind = oracle::cycle_critical_value(triangle_indep_quads(a_ind, 0.0, 1.0), {1, 1, 1});
        const double e_ind = estimate(triangle_independent(a_ind), dx);
        CHECK(std::abs(e_ind - c_ind) <= 0.03);
        CHECK((e_ind - 1.0) * (c_ind - 1.0) > 0.0);
    }
}
