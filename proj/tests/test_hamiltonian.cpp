#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "doctest.h"
#include "netcrit/cases.hpp"
#include "netcrit/error.hpp"
#include "netcrit/hamiltonian.hpp"
#include "oracles.hpp"

using namespace netcrit;

namespace {

Network segment(double length = 1.0) {
    return Network({{0.0}, {length}}, std::vector<ArcSpec>{{0, 1, length}});
}

HamiltonianModel single(const Network& net, std::shared_ptr<const ArcHamiltonian> h, double beta0,
                        std::optional<MomentumInterval> window = std::nullopt) {
    return HamiltonianModel("single", net, {std::move(h)}, beta0, window);
}

std::shared_ptr<const ArcHamiltonian> fn(std::function<double(double, double)> f) {
    return std::make_shared<FunctionHamiltonian>(std::move(f));
}

// Dense (s, mu) scan of max_s min_mu H.
double envelope_scan(const std::function<double(double, double)>& h, double len, double mu_lo, double mu_hi) {
    double best = -kInfinity;
    for (int i = 0; i <= 400; ++i) {
        const double s = len * i / 400.0;
        double inner = kInfinity;
        for (int j = 0; j <= 4000; ++j) inner = std::min(inner, h(s, mu_lo + (mu_hi - mu_lo) * j / 4000.0));
        best = std::max(best, inner);
    }
    return best;
}

}  // namespace

TEST_CASE("evaluation and the reversal identity") {
    const BenchmarkCase dep = triangle_dependent();
    CHECK(eval_hamiltonian(dep.model, 0, Direction::Forward, 0.5, 0.0) == doctest::Approx(1.0));
    CHECK(eval_hamiltonian(dep.model, 0, Direction::Reverse, 0.5, 0.0) == doctest::Approx(1.0));
    CHECK(eval_hamiltonian(dep.model, 1, Direction::Forward, 1.0, 2.0) == doctest::Approx(5.0));
    CHECK_THROWS_AS(eval_hamiltonian(dep.model, 0, Direction::Forward, 1.5, 0.0), Error);

    std::mt19937 rng(3);
    for (const std::string& name : case_names()) {
        const BenchmarkCase bc = make_case(name);
        for (std::size_t a = 0; a < bc.network.num_arcs(); ++a) {
            const double len = bc.network.arc(a).length;
            std::uniform_real_distribution<double> s(0.0, len), mu(-20.0, 20.0);
            for (int i = 0; i < 200; ++i) {
                const double x = s(rng), m = mu(rng);
                CHECK(eval_hamiltonian(bc.model, a, Direction::Reverse, x, m) ==
                      eval_hamiltonian(bc.model, a, Direction::Forward, len - x, -m));
            }
        }
    }
}

TEST_CASE("truncated Lagrangian examples") {
    const Network net = segment();
    const auto model = single(net, std::make_shared<QuadraticHamiltonian>(1, 0, 0, 0, 0, 0), 4.0,
                              MomentumInterval{-10.0, 10.0});
    CHECK(truncated_lagrangian(model, 0, Direction::Forward, 0.3, 0.0) == 0.0);
    CHECK(truncated_lagrangian(model, 0, Direction::Forward, 0.3, 2.0) == doctest::Approx(1.0));
    CHECK(truncated_lagrangian(model, 0, Direction::Forward, 0.3, 4.0 * 1.01) == kInfinity);
    CHECK(numerical_truncated_lagrangian(model, 0, Direction::Forward, 0.3, -4.04) == kInfinity);
    CHECK(numerical_truncated_lagrangian(model, 0, Direction::Forward, 0.3, 2.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(truncated_lagrangian(model, 0, Direction::Forward, -0.1, 0.0), Error);
}

TEST_CASE("window clamps the conjugate maximizer") {
    // With I = [-1, 1] and lambda = 4 the unconstrained maximizer 2 is cut back to 1.
    const Network net = segment();
    const auto model = single(net, std::make_shared<QuadraticHamiltonian>(1, 0, 0, 0, 0, 0), 5.0,
                              MomentumInterval{-1.0, 1.0});
    CHECK(truncated_lagrangian(model, 0, Direction::Forward, 0.5, 4.0) == doctest::Approx(3.0));
    CHECK(numerical_truncated_lagrangian(model, 0, Direction::Forward, 0.5, 4.0) ==
          doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("numerical conjugate matches closed forms") {
    const Network net = segment();
    const double beta0 = 9.0;
    struct Form {
        std::function<double(double, double)> h;
        std::function<double(double)> conj;
    };
    const double a = 1.7, b = -0.6;
    const std::vector<Form> forms{
        {[](double, double m) { return m * m; }, [](double l) { return l * l / 4.0; }},
        {[a](double, double m) { return (m + a) * (m + a); }, [a](double l) { return l * l / 4.0 - a * l; }},
        {[](double, double m) { return m * m / 2.0; }, [](double l) { return l * l / 2.0; }},
        {[b](double, double m) { return m * m / 2.0 + b; }, [b](double l) { return l * l / 2.0 - b; }},
    };
    for (const Form& f : forms) {
        const auto model = single(net, fn(f.h), beta0);
        const auto& w = model.truncation().mu_interval;
        CHECK(w.lo < -beta0);
        CHECK(w.hi > beta0);
        double worst = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double lambda = -beta0 + 2.0 * beta0 * i / 400.0;
            const double got = numerical_truncated_lagrangian(model, 0, Direction::Forward, 0.5, lambda);
            worst = std::max(worst, std::abs(got - f.conj(lambda)));
        }
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("closed form and numerical conjugates agree on every built-in arc") {
    for (const std::string& name : case_names()) {
        const BenchmarkCase bc = make_case(name);
        double worst = 0.0;
        for (std::size_t arc = 0; arc < bc.network.num_arcs(); ++arc) {
            const double len = bc.network.arc(arc).length;
            for (Direction dir : {Direction::Forward, Direction::Reverse})
                for (int i = 0; i <= 8; ++i)
                    for (int j = 0; j <= 40; ++j) {
                        const double s = len * i / 8.0;
                        const double lambda = -bc.beta0 + 2.0 * bc.beta0 * j / 40.0;
                        worst = std::max(worst, std::abs(truncated_lagrangian(bc.model, arc, dir, s, lambda) -
                                                         numerical_truncated_lagrangian(bc.model, arc, dir, s, lambda)));
                    }
        }
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("truncated Lagrangian against a dense-scan oracle") {
    const Network net = segment(2.0);
    const auto h = [](double s, double m) { return std::cosh(m) + s * m; };
    const auto model = single(net, fn(h), 3.0);
    const auto& w = model.truncation().mu_interval;
    for (double s : {0.0, 0.7, 2.0})
        for (double lambda : {-3.0, -1.2, 0.0, 0.4, 2.9}) {
            const double expected = oracle::dense_max([&](double m) { return lambda * m - h(s, m); }, w.lo, w.hi);
            CHECK(truncated_lagrangian(model, 0, Direction::Forward, s, lambda) ==
                  doctest::Approx(expected).epsilon(1e-9));
        }
}

TEST_CASE("non-convex evaluators fall back to a dense scan") {
    const Network net = segment();
    const auto h = [](double, double m) { return m * m + 3.0 * std::sin(4.0 * m); };
    const auto model = single(net, fn(h), 2.0, MomentumInterval{-6.0, 6.0});
    for (double lambda : {-2.0, -0.5, 0.0, 1.0, 2.0}) {
        const double expected = oracle::dense_max([&](double m) { return lambda * m - h(0.0, m); }, -6.0, 6.0, 200001);
        CHECK(truncated_lagrangian(model, 0, Direction::Forward, 0.0, lambda) ==
              doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("Fenchel-Young inequality") {
    for (const std::string& name : case_names()) {
        const BenchmarkCase bc = make_case(name);
        const auto& w = bc.model.truncation().mu_interval;
        for (std::size_t arc = 0; arc < bc.network.num_arcs(); ++arc) {
            const double len = bc.network.arc(arc).length;
            for (int i = 0; i <= 4; ++i)
                for (int j = 0; j <= 20; ++j)
                    for (int k = 0; k <= 20; ++k) {
                        const double s = len * i / 4.0;
                        const double lambda = -bc.beta0 + 2.0 * bc.beta0 * j / 20.0;
                        const double mu = w.lo + (w.hi - w.lo) * k / 20.0;
                        const double lhs = lambda * mu;
                        const double rhs = truncated_lagrangian(bc.model, arc, Direction::Forward, s, lambda) +
                                           eval_hamiltonian(bc.model, arc, Direction::Forward, s, mu);
                        CHECK(lhs <= rhs + 1e-9 * (1.0 + std::abs(rhs)));
                    }
        }
    }
}

TEST_CASE("Lagrangian reversal identity") {
    const BenchmarkCase bc = traffic_circle_dependent();
    for (std::size_t arc = 0; arc < bc.network.num_arcs(); ++arc) {
        const double len = bc.network.arc(arc).length;
        for (int i = 0; i <= 6; ++i)
            for (int j = 0; j <= 12; ++j) {
                const double s = len * i / 6.0;
                const double lambda = -bc.beta0 + 2.0 * bc.beta0 * j / 12.0;
                CHECK(truncated_lagrangian(bc.model, arc, Direction::Reverse, s, lambda) ==
                      doctest::Approx(truncated_lagrangian(bc.model, arc, Direction::Forward, len - s, -lambda))
                          .epsilon(1e-12));
            }
    }
}

TEST_CASE("arc lower envelopes") {
    const BenchmarkCase dep = triangle_dependent();
    CHECK(arc_lower_envelope(dep.model, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(arc_lower_envelope(dep.model, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(arc_lower_envelope(dep.model, 2) == doctest::Approx(1.0).epsilon(1e-10));

    const BenchmarkCase indep = triangle_independent();
    CHECK(arc_lower_envelope(indep.model, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(arc_lower_envelope(indep.model, 2) == doctest::Approx(0.75).epsilon(1e-12));

    for (const BenchmarkCase* bc : {&dep, &indep}) {
        for (std::size_t arc = 0; arc < 3; ++arc) {
            const auto h = [&](double s, double mu) {
                return eval_hamiltonian(bc->model, arc, Direction::Forward, s, mu);
            };
            const double scan = envelope_scan(h, 1.0, -8.0, 8.0);
            CHECK(arc_lower_envelope(bc->model, arc) == doctest::Approx(scan).epsilon(1e-5));
            CHECK(arc_lower_envelope(bc->model, arc, Direction::Reverse) ==
                  doctest::Approx(arc_lower_envelope(bc->model, arc)).epsilon(1e-12));
        }
    }
}

TEST_CASE("critical bounds of the built-in cases") {
    const BenchmarkCase dep = triangle_dependent();
    const CriticalBounds bd = compute_critical_bounds(dep.model, dep.network);
    CHECK(bd.a0 == doctest::Approx(1.0));
    for (double c : bd.flux_limiters) CHECK(c == doctest::Approx(1.0));

    const BenchmarkCase indep = triangle_independent();
    const CriticalBounds bi = compute_critical_bounds(indep.model, indep.network);
    CHECK(bi.a0 == doctest::Approx(0.75));
    CHECK(bi.flux_limiters[0] == doctest::Approx(0.75));
    CHECK(bi.flux_limiters[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(bi.flux_limiters[2] == doctest::Approx(0.75));

    const BenchmarkCase ci = traffic_circle_independent();
    const CriticalBounds bc = compute_critical_bounds(ci.model, ci.network);
    CHECK(bc.a0 == doctest::Approx(-2.0));
    CHECK(bc.a_gamma[0] == doctest::Approx(-5.0));
    CHECK(bc.a_gamma[3] == doctest::Approx(-2.0));

    for (const std::string& name : case_names()) {
        const BenchmarkCase c = make_case(name);
        const CriticalBounds b = compute_critical_bounds(c.model, c.network);
        CHECK(b.a0 == *std::max_element(b.a_gamma.begin(), b.a_gamma.end()));
        for (std::size_t v = 0; v < c.network.num_vertices(); ++v) {
            double expected = -kInfinity;
            for (const Incidence& inc : c.network.incident(v)) {
                CHECK(b.flux_limiters[v] >= b.a_gamma[inc.arc]);
                expected = std::max(expected, b.a_gamma[inc.arc]);
            }
            CHECK(b.flux_limiters[v] == expected);
        }
    }
}

TEST_CASE("pure quadratic network has zero bounds") {
    const Network tri = triangle_network();
    const auto q = std::make_shared<QuadraticHamiltonian>(1, 0, 0, 0, 0, 0);
    const HamiltonianModel model("mu2", tri, {q, q, q}, 5.0);
    const CriticalBounds b = compute_critical_bounds(model, tri);
    CHECK(b.a0 == doctest::Approx(0.0).epsilon(1e-12));
    for (double c : b.flux_limiters) CHECK(c == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("non-coercive input is rejected") {
    const Network net = segment();
    CHECK_THROWS_AS(single(net, fn([](double, double m) { return m; }), 2.0), Error);
    try {
        single(net, fn([](double, double m) { return m; }), 2.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonCoercive);
    }
    // The minimizer of (mu - 5)^2 lies outside a window of [-2, 2].
    const auto model = single(net, std::make_shared<QuadraticHamiltonian>(1, -10, 0, 25, 0, 0), 1.0,
                              MomentumInterval{-2.0, 2.0});
    CHECK_THROWS_AS(minimize_momentum(model, 0, Direction::Forward, 0.5), Error);
}

TEST_CASE("model validation") {
    const Network tri = triangle_network();
    const auto q = std::make_shared<QuadraticHamiltonian>(1, 0, 0, 0, 0, 0);
    CHECK_THROWS_AS(HamiltonianModel("x", tri, {q, q}, 1.0), Error);
    CHECK_THROWS_AS(HamiltonianModel("x", tri, {q, q, q}, 0.0), Error);
    CHECK_THROWS_AS(HamiltonianModel("x", tri, {q, q, q}, 1.0, MomentumInterval{1.0, -1.0}), Error);
    CHECK_THROWS_AS(QuadraticHamiltonian(0, 0, 0, 0, 0, 0), Error);
    CHECK(HamiltonianModel("x", tri, {q, q, q}, 1.0).analytic_lagrangian());
    CHECK_FALSE(HamiltonianModel("x", tri, {q, q, fn([](double, double m) { return m * m; })}, 1.0)
                    .analytic_lagrangian());
}
