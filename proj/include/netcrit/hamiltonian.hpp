#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "netcrit/network.hpp"

namespace netcrit {

enum class Direction { Forward, Reverse };

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Value and maximizer of mu -> lambda*mu - H(s, mu) over the whole real line.
struct ConjugatePoint {
    double value = 0.0;
    double argmax = 0.0;
};

/// Hamiltonian H(s, mu) of one arc in the stored orientation.
///
/// Implementations must be continuous, convex and coercive in mu.
class ArcHamiltonian {
public:
    virtual ~ArcHamiltonian() = default;

    virtual double value(double s, double mu) const = 0;

    /// dH/dmu; the default is a central difference.
    virtual double slope(double s, double mu) const;

    /// Closed-form unconstrained conjugate, when one is known.
    virtual std::optional<ConjugatePoint> conjugate(double s, double lambda) const;
};

/// H(s, mu) = a mu^2 + (b0 + b1 s) mu + c0 + c1 s + c2 s^2 with a > 0.
class QuadraticHamiltonian final : public ArcHamiltonian {
public:
    QuadraticHamiltonian(double a, double b0, double b1, double c0, double c1, double c2);

    double value(double s, double mu) const override;
    double slope(double s, double mu) const override;
    std::optional<ConjugatePoint> conjugate(double s, double lambda) const override;

private:
    double a_, b0_, b1_, c0_, c1_, c2_;
};

/// User-supplied evaluator with no closed-form conjugate.
class FunctionHamiltonian final : public ArcHamiltonian {
public:
    using Fn = std::function<double(double, double)>;

    explicit FunctionHamiltonian(Fn value, Fn slope = {});

    double value(double s, double mu) const override;
    double slope(double s, double mu) const override;

private:
    Fn value_;
    Fn slope_;
};

struct MomentumInterval {
    double lo = 0.0;
    double hi = 0.0;
};

struct TruncationParams {
    MomentumInterval mu_interval;
    double beta0 = 1.0;
};

/// One Hamiltonian per stored arc plus the truncation window of the scheme.
///
/// Reverse-arc evaluation goes through H_rev(s, mu) = H(|arc| - s, -mu), so the
/// compatibility condition holds by construction.
class HamiltonianModel {
public:
    /// `mu_interval` may be left empty, in which case a window is chosen so that
    /// the conjugate maximizers for |lambda| <= beta0 are interior.
    HamiltonianModel(std::string name, const Network& net, std::vector<std::shared_ptr<const ArcHamiltonian>> arcs,
                     double beta0, std::optional<MomentumInterval> mu_interval = std::nullopt);

    const std::string& name() const noexcept { return name_; }
    std::size_t num_arcs() const noexcept { return arcs_.size(); }
    double arc_length(std::size_t arc) const { return lengths_.at(arc); }
    const ArcHamiltonian& arc(std::size_t id) const { return *arcs_.at(id); }
    std::shared_ptr<const ArcHamiltonian> arc_ptr(std::size_t id) const { return arcs_.at(id); }
    const TruncationParams& truncation() const noexcept { return truncation_; }
    double beta0() const noexcept { return truncation_.beta0; }

    /// True when every arc evaluator has a closed-form conjugate.
    bool analytic_lagrangian() const noexcept { return analytic_; }

private:
    std::string name_;
    std::vector<std::shared_ptr<const ArcHamiltonian>> arcs_;
    std::vector<double> lengths_;
    TruncationParams truncation_;
    bool analytic_ = true;
};

double eval_hamiltonian(const HamiltonianModel& model, std::size_t arc, Direction dir, double s, double mu);

/// max over mu in the truncation window of (lambda mu - H(s, mu)) for |lambda| <= beta0,
/// +infinity otherwise.
double truncated_lagrangian(const HamiltonianModel& model, std::size_t arc, Direction dir, double s, double lambda);

/// Same quantity, always through the numerical line search (ignores closed forms).
double numerical_truncated_lagrangian(const HamiltonianModel& model, std::size_t arc, Direction dir, double s,
                                      double lambda);

/// Minimum of H(s, .) over the truncation window. Throws NonCoercive when the
/// minimizer sits on the window boundary.
struct MomentumMinimum {
    double value = 0.0;
    double argmin = 0.0;
};
MomentumMinimum minimize_momentum(const HamiltonianModel& model, std::size_t arc, Direction dir, double s);

/// a = max over s of min over mu of H(s, mu).
double arc_lower_envelope(const HamiltonianModel& model, std::size_t arc, Direction dir = Direction::Forward);

struct CriticalBounds {
    std::vector<double> a_gamma;
    double a0 = 0.0;
    std::vector<double> flux_limiters;
};

CriticalBounds compute_critical_bounds(const HamiltonianModel& model, const Network& net);

}  // namespace netcrit
