#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hemostab/error.hpp"
#include "hemostab/models.hpp"
#include "hemostab/numeric.hpp"
#include "hemostab/stability.hpp"

namespace hemostab {

/// Which candidate rate attained the minimum.
enum class RateBranch { Sigma1, Sigma2, Sigma3 };

[[nodiscard]] inline std::string to_string(RateBranch b)
{
    switch (b) {
        case RateBranch::Sigma1: return "sigma1";
        case RateBranch::Sigma2: return "sigma2";
        case RateBranch::Sigma3: return "sigma3";
    }
    return "?";
}

struct ConvergenceResult {
    double sigma = 0.0;  // day^-1
    RateBranch branch = RateBranch::Sigma2;
    double tau_star = 0.0;
    std::optional<double> u2;  // only on the sigma3 branch
};

/// g(u) = (u / sin u) exp(-u / tan u) on (0, pi); increases from 1/e to +inf.
[[nodiscard]] inline double g_function(double u)
{
    if (!(u > 0.0) || !(u < numeric::kPi)) throw DomainError("g(u) requires u in (0, pi)");
    const double s = std::sin(u);
    return (u / s) * std::exp(-u * std::cos(u) / s);
}

/// Delay of peak convergence rate: b tau e^{a tau} = 1/e. Same solver as tau_non_oscillatory.
[[nodiscard]] inline double tau_star(const LinearCoefficients& lin)
{
    return tau_non_oscillatory(lin, 1.0);
}

/**
 * @brief Exponential decay rate of u' = -a u - b u(t - tau) at delay tau.
 *
 * sigma = min(sigma1, sigma2, sigma3):
 *   sigma1 = a + 1/tau,
 *   sigma2 solves (sigma - a) tau e^{(a - sigma) tau} = b tau e^{a tau}   (tau < tau*),
 *   sigma3 = a + u2 cot(u2) / tau with g(u2) = b tau e^{a tau}           (tau > tau*).
 * Requires a >= 0, b > 0. When b > a the delay must be below tau_c.
 */
[[nodiscard]] inline ConvergenceResult rate_of_convergence(const LinearCoefficients& lin, double tau)
{
    const double a = lin.a;
    const double b = lin.b;
    if (!(a >= 0.0) || !(b > 0.0) || !(tau >= 0.0)) {
        throw DomainError("rate_of_convergence requires a >= 0, b > 0, tau >= 0");
    }
    if (lin.supports_hopf() && tau >= tau_critical(lin).tau_c) {
        throw Unstable("tau >= tau_c: the equilibrium is not asymptotically stable");
    }
    ConvergenceResult res;
    res.tau_star = tau_star(lin);
    if (tau == 0.0) {
        res.sigma = a + b;
        res.branch = RateBranch::Sigma2;
        return res;
    }
    const double sigma1 = a + 1.0 / tau;
    if (tau == res.tau_star) {
        res.sigma = sigma1;
        res.branch = RateBranch::Sigma1;
        return res;
    }
    const double target = b * tau * std::exp(a * tau);
    if (tau < res.tau_star) {
        constexpr double eps = 1e-12;
        auto f = [&](double sigma) {
            const double s = (sigma - a) * tau;
            return s * std::exp(-s) - target;
        };
        double lo = a + eps;
        double hi = sigma1 - eps;
        // Rounding can leave target a hair above max(s e^{-s}) = 1/e right next to tau*.
        if (f(hi) < 0.0) {
            res.sigma = sigma1;
            res.branch = RateBranch::Sigma1;
            return res;
        }
        const double sigma2 = numeric::bisect(f, lo, hi, 1e-15 * std::max(1.0, hi));
        res.sigma = std::min(sigma1, sigma2);
        res.branch = sigma2 <= sigma1 ? RateBranch::Sigma2 : RateBranch::Sigma1;
        return res;
    }
    auto f = [&](double u) { return g_function(u) - target; };
    constexpr double lo = 1e-12;
    const double hi = numeric::kPi - 1e-9;
    // g(0+) = 1/e; a target within rounding of 1/e puts u2 at the left end.
    const double u2 = f(lo) >= 0.0 ? lo : numeric::bisect(f, lo, hi, 1e-15);
    const double sigma3 = a + u2 * std::cos(u2) / (std::sin(u2) * tau);
    res.u2 = u2;
    res.sigma = std::min(sigma1, sigma3);
    res.branch = sigma3 <= sigma1 ? RateBranch::Sigma3 : RateBranch::Sigma1;
    return res;
}

struct RocRow {
    double tau = 0.0;
    ConvergenceResult result;
};

/// sigma(tau) on an even grid; every grid delay must lie in [0, tau_c).
[[nodiscard]] inline std::vector<RocRow> roc_curve(const LinearCoefficients& lin, double tau_from,
                                                   double tau_to, std::size_t resolution)
{
    if (resolution < 2 || !(tau_to > tau_from) || !(tau_from >= 0.0)) {
        throw InvalidSweep("invalid delay range");
    }
    const auto grid = numeric::linspace(tau_from, tau_to, resolution);
    return numeric::parallel_map(grid.size(), [&](std::size_t i) {
        return RocRow{grid[i], rate_of_convergence(lin, grid[i])};
    });
}

}  // namespace hemostab
