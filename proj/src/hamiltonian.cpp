#include "netcrit/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "line_search.hpp"
#include "netcrit/error.hpp"

namespace netcrit {

namespace {

constexpr double kMomentumTol = 1e-10;
constexpr int kConvexityProbes = 33;
constexpr int kDenseScan = 4096;
constexpr int kEnvelopeSamples = 257;

// Minimizes a function of mu on [lo, hi] assuming convexity, with a dense-scan
// fallback when sampled second differences show it is not convex.
template <typename F>
detail::LineMinimum minimize_convex(F&& f, double lo, double hi) {
    std::array<double, kConvexityProbes> probe{};
    const double h = (hi - lo) / (kConvexityProbes - 1);
    double scale = 0.0;
    for (int i = 0; i < kConvexityProbes; ++i) {
        probe[i] = f(lo + i * h);
        scale = std::max(scale, std::abs(probe[i]));
    }
    bool convex = true;
    for (int i = 1; i + 1 < kConvexityProbes && convex; ++i)
        convex = probe[i - 1] - 2.0 * probe[i] + probe[i + 1] >= -1e-9 * (1.0 + scale);
    if (convex) return detail::golden_minimize(f, lo, hi, kMomentumTol);

    const double g = (hi - lo) / (kDenseScan - 1);
    int best = 0;
    double best_val = f(lo);
    for (int i = 1; i < kDenseScan; ++i) {
        const double v = f(lo + i * g);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const double a = lo + std::max(best - 1, 0) * g;
    const double b = lo + std::min(best + 1, kDenseScan - 1) * g;
    return detail::golden_minimize(f, a, b, kMomentumTol);
}

void check_domain(const HamiltonianModel& model, std::size_t arc, double s) {
    const double len = model.arc_length(arc);
    if (!(s >= 0.0 && s <= len))
        throw Error(ErrorCode::OutOfDomain, "s = " + std::to_string(s) + " outside [0, " + std::to_string(len) + "]");
}

// Maps a (direction, s, mu) query onto the stored orientation.
struct Oriented {
    double s;
    double sign;
};

Oriented orient(const HamiltonianModel& model, std::size_t arc, Direction dir, double s) {
    if (dir == Direction::Forward) return {s, 1.0};
    return {model.arc_length(arc) - s, -1.0};
}

// Truncated conjugate in the stored orientation: argmax of lambda mu - H over the window.
ConjugatePoint stored_conjugate(const ArcHamiltonian& h, const MomentumInterval& window, double s, double lambda,
                                bool allow_closed_form) {
    if (allow_closed_form) {
        if (auto cp = h.conjugate(s, lambda)) {
            // lambda mu - H is concave in mu, so the window maximum sits at the clamped argmax
            if (cp->argmax >= window.lo && cp->argmax <= window.hi) return *cp;
            const double mu = std::clamp(cp->argmax, window.lo, window.hi);
            return {lambda * mu - h.value(s, mu), mu};
        }
    }
    const auto m = minimize_convex([&](double mu) { return h.value(s, mu) - lambda * mu; }, window.lo, window.hi);
    return {-m.fx, m.x};
}

MomentumInterval resolve_window(const Network& net, const std::vector<std::shared_ptr<const ArcHamiltonian>>& arcs,
                                double beta0) {
    double pad = 1.0;
    for (int attempt = 0; attempt < 40; ++attempt, pad *= 2.0) {
        const MomentumInterval window{-beta0 - pad, beta0 + pad};
        const double margin = 1e-6 * (window.hi - window.lo);
        bool interior = true;
        for (std::size_t a = 0; a < arcs.size() && interior; ++a) {
            const double len = net.arc(a).length;
            for (int i = 0; i <= 16 && interior; ++i) {
                const double s = len * i / 16.0;
                for (double lambda : {-beta0, 0.0, beta0}) {
                    const double mu = stored_conjugate(*arcs[a], window, s, lambda, true).argmax;
                    if (mu - window.lo < margin || window.hi - mu < margin) {
                        interior = false;
                        break;
                    }
                }
            }
        }
        if (interior) return window;
    }
    throw Error(ErrorCode::NonCoercive, "no momentum window keeps the conjugate maximizers interior");
}

}  // namespace

double ArcHamiltonian::slope(double s, double mu) const {
    const double h = 1e-6 * std::max(1.0, std::abs(mu));
    return (value(s, mu + h) - value(s, mu - h)) / (2.0 * h);
}

std::optional<ConjugatePoint> ArcHamiltonian::conjugate(double, double) const { return std::nullopt; }

QuadraticHamiltonian::QuadraticHamiltonian(double a, double b0, double b1, double c0, double c1, double c2)
    : a_(a), b0_(b0), b1_(b1), c0_(c0), c1_(c1), c2_(c2) {
    if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "quadratic Hamiltonian needs a positive leading coefficient");
}

double QuadraticHamiltonian::value(double s, double mu) const {
    return a_ * mu * mu + (b0_ + b1_ * s) * mu + c0_ + (c1_ + c2_ * s) * s;
}

double QuadraticHamiltonian::slope(double s, double mu) const { return 2.0 * a_ * mu + b0_ + b1_ * s; }

std::optional<ConjugatePoint> QuadraticHamiltonian::conjugate(double s, double lambda) const {
    const double shifted = lambda - (b0_ + b1_ * s);
    return ConjugatePoint{shifted * shifted / (4.0 * a_) - (c0_ + (c1_ + c2_ * s) * s), shifted / (2.0 * a_)};
}

FunctionHamiltonian::FunctionHamiltonian(Fn value, Fn slope) : value_(std::move(value)), slope_(std::move(slope)) {
    if (!value_) throw Error(ErrorCode::InvalidArgument, "FunctionHamiltonian needs a value callback");
}

double FunctionHamiltonian::value(double s, double mu) const { return value_(s, mu); }

double FunctionHamiltonian::slope(double s, double mu) const {
    return slope_ ? slope_(s, mu) : ArcHamiltonian::slope(s, mu);
}

HamiltonianModel::HamiltonianModel(std::string name, const Network& net,
                                   std::vector<std::shared_ptr<const ArcHamiltonian>> arcs, double beta0,
                                   std::optional<MomentumInterval> mu_interval)
    : name_(std::move(name)), arcs_(std::move(arcs)) {
    if (arcs_.size() != net.num_arcs())
        throw Error(ErrorCode::InvalidArgument, "model has " + std::to_string(arcs_.size()) + " arcs, network has " +
                                                    std::to_string(net.num_arcs()));
    if (!(beta0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta0 must be positive");
    for (const auto& a : arcs_) {
        if (!a) throw Error(ErrorCode::InvalidArgument, "null arc Hamiltonian");
        analytic_ = analytic_ && a->conjugate(0.0, 0.0).has_value();
    }
    for (const Arc& a : net.arcs()) lengths_.push_back(a.length);

    truncation_.beta0 = beta0;
    if (mu_interval) {
        if (!(mu_interval->lo < mu_interval->hi))
            throw Error(ErrorCode::InvalidArgument, "momentum window must satisfy lo < hi");
        truncation_.mu_interval = *mu_interval;
    } else {
        truncation_.mu_interval = resolve_window(net, arcs_, beta0);
    }
}

double eval_hamiltonian(const HamiltonianModel& model, std::size_t arc, Direction dir, double s, double mu) {
    check_domain(model, arc, s);
    const auto o = orient(model, arc, dir, s);
    return model.arc(arc).value(o.s, o.sign * mu);
}

double truncated_lagrangian(const HamiltonianModel& model, std::size_t arc, Direction dir, double s, double lambda) {
    check_domain(model, arc, s);
    if (std::abs(lambda) > model.beta0()) return kInfinity;
    const auto o = orient(model, arc, dir, s);
    return stored_conjugate(model.arc(arc), model.truncation().mu_interval, o.s, o.sign * lambda, true).value;
}

double numerical_truncated_lagrangian(const HamiltonianModel& model, std::size_t arc, Direction dir, double s,
                                      double lambda) {
    check_domain(model, arc, s);
    if (std::abs(lambda) > model.beta0()) return kInfinity;
    const auto o = orient(model, arc, dir, s);
    return stored_conjugate(model.arc(arc), model.truncation().mu_interval, o.s, o.sign * lambda, false).value;
}

MomentumMinimum minimize_momentum(const HamiltonianModel& model, std::size_t arc, Direction dir, double s) {
    check_domain(model, arc, s);
    const auto o = orient(model, arc, dir, s);
    const auto& h = model.arc(arc);
    const auto& w = model.truncation().mu_interval;
    const double margin = 1e-6 * (w.hi - w.lo);
    if (const auto exact = h.conjugate(o.s, 0.0)) {
        if (exact->argmax - w.lo < margin || w.hi - exact->argmax < margin)
            throw Error(ErrorCode::NonCoercive, "momentum minimizer on arc " + std::to_string(arc) +
                                                    " touches the truncation window boundary");
        return {-exact->value, o.sign * exact->argmax};
    }
    const auto m = minimize_convex([&](double mu) { return h.value(o.s, mu); }, w.lo, w.hi);
    if (m.x - w.lo < margin || w.hi - m.x < margin)
        throw Error(ErrorCode::NonCoercive, "momentum minimizer on arc " + std::to_string(arc) +
                                                " touches the truncation window boundary");
    return {m.fx, o.sign * m.x};
}

double arc_lower_envelope(const HamiltonianModel& model, std::size_t arc, Direction dir) {
    const double len = model.arc_length(arc);
    auto level = [&](double s) { return minimize_momentum(model, arc, dir, std::clamp(s, 0.0, len)).value; };

    int best = 0;
    double best_val = -kInfinity;
    const double h = len / (kEnvelopeSamples - 1);
    for (int i = 0; i < kEnvelopeSamples; ++i) {
        const double v = level(i * h);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    const double lo = std::max(best - 1, 0) * h;
    const double hi = std::min(best + 1, kEnvelopeSamples - 1) * h;
    const auto refined = detail::golden_minimize([&](double s) { return -level(s); }, lo, hi, 1e-12 * (1.0 + len));
    return std::max(best_val, -refined.fx);
}

CriticalBounds compute_critical_bounds(const HamiltonianModel& model, const Network& net) {
    CriticalBounds out;
    out.a_gamma.reserve(net.num_arcs());
    for (std::size_t a = 0; a < net.num_arcs(); ++a) out.a_gamma.push_back(arc_lower_envelope(model, a));
    out.a0 = *std::max_element(out.a_gamma.begin(), out.a_gamma.end());
    out.flux_limiters.assign(net.num_vertices(), -kInfinity);
    for (std::size_t v = 0; v < net.num_vertices(); ++v)
        for (const Incidence& inc : net.incident(v))
            out.flux_limiters[v] = std::max(out.flux_limiters[v], out.a_gamma[inc.arc]);
    return out;
}

}  // namespace netcrit
