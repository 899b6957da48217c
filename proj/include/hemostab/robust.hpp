#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "hemostab/error.hpp"
#include "hemostab/models.hpp"

namespace hemostab {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double mid() const noexcept { return 0.5 * (lo + hi); }
    [[nodiscard]] bool contains(double v) const noexcept { return lo <= v && v <= hi; }
};

struct IntervalParameters {
    Interval beta;
    Interval gamma;
    Interval n;

    void validate() const
    {
        for (const Interval* iv : {&beta, &gamma, &n}) {
            if (!(iv->lo > 0.0) || !(iv->lo <= iv->hi) || !std::isfinite(iv->hi)) {
                throw DomainError("uncertainty intervals need 0 < lo <= hi");
            }
        }
    }
};

/// Delay bound that holds for every parameter realisation in the intervals.
struct RobustBound {
    bool unbounded = false;  // worst-case b <= 0: the condition holds for all delays
    double tau = std::numeric_limits<double>::infinity();
    double worst_case_b = 0.0;
    std::optional<double> x_star;  // Lasota: the equilibrium used in the bound
};

/// b tau < 1: delay-robust sufficient condition, stricter than b tau < pi/2.
[[nodiscard]] inline bool kharitonov_sufficient(const LinearCoefficients& lin, double tau)
{
    if (!(lin.b > 0.0)) throw DomainError("kharitonov_sufficient requires b > 0");
    return lin.b * tau < 1.0;
}

namespace detail {

[[nodiscard]] inline RobustBound bound_from_b(double b, std::optional<double> x_star = std::nullopt)
{
    RobustBound r;
    r.worst_case_b = b;
    r.x_star = x_star;
    if (b > 0.0) {
        r.tau = 1.0 / b;
    } else {
        r.unbounded = true;
    }
    return r;
}

}  // namespace detail

/**
 * @brief Worst-case substitution into b tau < 1.
 *
 * Mackey-Glass: b_wc = (gamma_hi / beta_lo)(n_hi (beta_hi - gamma_lo) - beta_lo).
 * Lasota: b_wc = gamma_hi (x*_wc - n_lo) with x*_wc the largest equilibrium over
 * the eight interval corners.
 */
[[nodiscard]] inline RobustBound robust_delay_bound(ModelKind kind, const IntervalParameters& iv)
{
    iv.validate();
    if (kind == ModelKind::MackeyGlass) {
        const double b = iv.gamma.hi / iv.beta.lo *
                         (iv.n.hi * (iv.beta.hi - iv.gamma.lo) - iv.beta.lo);
        return detail::bound_from_b(b);
    }
    std::optional<double> x_wc;
    for (double beta : {iv.beta.lo, iv.beta.hi}) {
        for (double gamma : {iv.gamma.lo, iv.gamma.hi}) {
            for (double n : {iv.n.lo, iv.n.hi}) {
                try {
                    const double x =
                        largest_equilibrium(ModelKind::Lasota, ModelParameters{beta, gamma, n, 0.0, 1.0})
                            .x_star;
                    if (!x_wc || x > *x_wc) x_wc = x;
                } catch (const NoEquilibrium&) {
                }
            }
        }
    }
    if (!x_wc) throw NoEquilibrium("no interval corner admits a positive equilibrium");
    return detail::bound_from_b(iv.gamma.hi * (*x_wc - iv.n.lo), x_wc);
}

/// Lasota variant that reads x* at the interval midpoints instead of the worst corner.
[[nodiscard]] inline RobustBound robust_delay_bound_nominal(ModelKind kind,
                                                            const IntervalParameters& iv)
{
    iv.validate();
    if (kind == ModelKind::MackeyGlass) return robust_delay_bound(kind, iv);
    const double x = largest_equilibrium(ModelKind::Lasota,
                                         ModelParameters{iv.beta.mid(), iv.gamma.mid(), iv.n.mid(), 0.0, 1.0})
                         .x_star;
    return detail::bound_from_b(iv.gamma.hi * (x - iv.n.lo), x);
}

}  // namespace hemostab
