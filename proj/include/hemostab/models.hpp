#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "hemostab/error.hpp"
#include "hemostab/numeric.hpp"

namespace hemostab {

/// Choice of production nonlinearity F in  x' = eta (beta F(x(t - tau)) - gamma x(t)).
enum class ModelKind {
    MackeyGlass,  ///< F(y) = y / (1 + y^n)
    Lasota,       ///< F(y) = y^n e^{-y}
};

[[nodiscard]] inline std::string_view to_string(ModelKind kind) noexcept
{
    return kind == ModelKind::MackeyGlass ? "mackey-glass" : "lasota";
}

[[nodiscard]] inline ModelKind parse_model_kind(std::string_view name)
{
    if (name == "mackey-glass" || name == "mg") return ModelKind::MackeyGlass;
    if (name == "lasota") return ModelKind::Lasota;
    throw DomainError("unknown model '" + std::string(name) + "'");
}

struct ModelParameters {
    double beta = 0.0;   // day^-1
    double gamma = 0.0;  // day^-1
    double n = 0.0;
    double tau = 0.0;    // days
    double eta = 1.0;

    void validate() const
    {
        if (!(beta > 0.0) || !(gamma > 0.0) || !(n > 0.0) || !(eta > 0.0) || !(tau >= 0.0) ||
            !std::isfinite(beta) || !std::isfinite(gamma) || !std::isfinite(n) ||
            !std::isfinite(tau) || !std::isfinite(eta)) {
            throw DomainError("parameters must satisfy beta, gamma, n, eta > 0 and tau >= 0");
        }
    }
};

struct Equilibrium {
    double x_star = 0.0;
    double residual = 0.0;  // |beta F(x*) - gamma x*|
};

/// Coefficients of the linearisation u' = -a u(t) - b u(t - tau).
struct LinearCoefficients {
    double a = 0.0;
    double b = 0.0;

    /// Delay-induced instability (and hence every threshold beyond tau_noc) requires b > a.
    [[nodiscard]] bool supports_hopf() const noexcept { return b > a; }
};

/// Taylor coefficients of f(x, y) = beta F(y) - gamma x about the equilibrium.
struct TaylorCoefficients {
    double xi_x = 0.0;
    double xi_y = 0.0;
    double xi_yy = 0.0;
    double xi_yyy = 0.0;
};

namespace detail {

/// y^n evaluated as exp(n ln y); only defined for y > 0.
[[nodiscard]] inline double positive_pow(double y, double n)
{
    if (!(y > 0.0)) throw DomainError("concentration must be positive");
    return std::exp(n * std::log(y));
}

}  // namespace detail

[[nodiscard]] inline double nonlinear_F(ModelKind kind, double y, double n)
{
    const double p = detail::positive_pow(y, n);
    if (kind == ModelKind::MackeyGlass) return y / (1.0 + p);
    return p * std::exp(-y);
}

/**
 * @brief Closed-form k-th derivative of F, k in {1, 2, 3}.
 *
 * Mackey-Glass, with p = y^n:
 *   F'   = (1 + (1-n) p) / (1+p)^2
 *   F''  = -(n p / y) ((1+n) + (1-n) p) / (1+p)^3
 *   F''' = (n / y^2) (G - n p G_p),  G = ((1+n) p + (1-n) p^2) / (1+p)^3
 * Lasota, with s = n/y - 1:
 *   F'   = F s
 *   F''  = F (s^2 - n/y^2)
 *   F''' = F (s^3 - 3 s n/y^2 + 2 n/y^3)
 */
[[nodiscard]] inline double F_derivative(ModelKind kind, double y, double n, int order)
{
    if (order < 1 || order > 3) throw DomainError("derivative order must be 1, 2 or 3");
    const double p = detail::positive_pow(y, n);
    if (kind == ModelKind::MackeyGlass) {
        const double q = 1.0 + p;
        switch (order) {
            case 1:
                return (1.0 + (1.0 - n) * p) / (q * q);
            case 2:
                return -(n * p / y) * ((1.0 + n) + (1.0 - n) * p) / (q * q * q);
            default: {
                const double G = ((1.0 + n) * p + (1.0 - n) * p * p) / (q * q * q);
                const double G_p = ((1.0 + n) - 4.0 * n * p - (1.0 - n) * p * p) / (q * q * q * q);
                return (n / (y * y)) * (G - n * p * G_p);
            }
        }
    }
    const double F = p * std::exp(-y);
    const double s = n / y - 1.0;
    const double y2 = y * y;
    switch (order) {
        case 1:
            return F * s;
        case 2:
            return F * (s * s - n / y2);
        default:
            return F * (s * s * s - 3.0 * s * n / y2 + 2.0 * n / (y2 * y));
    }
}

/**
 * @brief All positive equilibria of beta F(x) = gamma x, sorted ascending.
 *
 * Mackey-Glass has the single root (beta/gamma - 1)^{1/n} when beta > gamma.
 * Lasota roots of beta x^{n-1} e^{-x} = gamma are bracketed on a log-spaced scan
 * of [1e-6, 50] and refined by bisection; for n > 1 there may be two.
 * eta does not enter.
 */
[[nodiscard]] inline std::vector<Equilibrium> solve_equilibrium(ModelKind kind,
                                                                const ModelParameters& params)
{
    params.validate();
    const double beta = params.beta;
    const double gamma = params.gamma;
    const double n = params.n;
    auto residual = [&](double x) { return std::fabs(beta * nonlinear_F(kind, x, n) - gamma * x); };

    std::vector<Equilibrium> roots;
    if (kind == ModelKind::MackeyGlass) {
        if (!(beta > gamma)) throw NoEquilibrium();
        const double x = std::exp(std::log(beta / gamma - 1.0) / n);
        roots.push_back({x, residual(x)});
    } else {
        // log of beta x^{n-1} e^{-x} / gamma: same sign, better scaled than the raw residual.
        auto phi = [&](double x) {
            return std::log(beta) + (n - 1.0) * std::log(x) - x - std::log(gamma);
        };
        constexpr int kScan = 4000;
        const double lo = std::log(1e-6);
        const double hi = std::log(50.0);
        double x_prev = 1e-6;
        double f_prev = phi(x_prev);
        for (int i = 1; i <= kScan; ++i) {
            const double x = std::exp(lo + (hi - lo) * i / kScan);
            const double fx = phi(x);
            if (fx == 0.0) {
                roots.push_back({x, residual(x)});
            } else if ((f_prev < 0.0) != (fx < 0.0) && f_prev != 0.0) {
                const double r = numeric::bisect(phi, x_prev, x, 1e-12 * std::max(1.0, x));
                roots.push_back({r, residual(r)});
            }
            x_prev = x;
            f_prev = fx;
        }
    }
    if (roots.empty()) throw NoEquilibrium();
    for (const auto& r : roots) {
        if (!(r.residual < 1e-10)) {
            throw ConvergenceError("equilibrium residual " + std::to_string(r.residual) +
                                   " exceeds 1e-10");
        }
    }
    std::sort(roots.begin(), roots.end(),
              [](const Equilibrium& l, const Equilibrium& r) { return l.x_star < r.x_star; });
    return roots;
}

/// Largest equilibrium; for Lasota with n > 1 it is the only one with b > 0.
[[nodiscard]] inline Equilibrium largest_equilibrium(ModelKind kind, const ModelParameters& params)
{
    return solve_equilibrium(kind, params).back();
}

/// a = gamma, b = -beta F'(x*). Check supports_hopf() before asking for tau_c.
[[nodiscard]] inline LinearCoefficients linearize(ModelKind kind, const ModelParameters& params,
                                                  const Equilibrium& eq)
{
    return {params.gamma, -params.beta * F_derivative(kind, eq.x_star, params.n, 1)};
}

/// Closed-form cubic Taylor coefficients per model, expressed through x* and the parameters.
[[nodiscard]] inline TaylorCoefficients taylor_coefficients(ModelKind kind,
                                                            const ModelParameters& params,
                                                            const Equilibrium& eq)
{
    const double beta = params.beta;
    const double g = params.gamma;
    const double n = params.n;
    const double x = eq.x_star;
    TaylorCoefficients t;
    t.xi_x = -g;
    if (kind == ModelKind::MackeyGlass) {
        const double d = beta - g;
        t.xi_y = (g * g / beta) * ((1.0 - n) * beta / g + n);
        t.xi_yy = g * n * d * (d * (n - 1.0) - g * (n + 1.0)) / (2.0 * beta * beta * x);
        t.xi_yyy = g * n * d *
                   (d * d * (1.0 - n * n) + g * d * (4.0 * n * n + 2.0) + g * g * (1.0 - n * n)) /
                   (6.0 * beta * beta * beta * x * x);
    } else {
        const double m = n - x;
        t.xi_y = g * m;
        t.xi_yy = g * (x * x - 2.0 * x * n + n * (n - 1.0)) / (2.0 * x);
        t.xi_yyy = g * (m * m * m + n * (2.0 - 3.0 * m)) / (6.0 * x * x);
    }
    return t;
}

}  // namespace hemostab
