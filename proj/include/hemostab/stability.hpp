#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hemostab/error.hpp"
#include "hemostab/models.hpp"
#include "hemostab/numeric.hpp"

namespace hemostab {

struct CriticalDelay {
    double tau_c = 0.0;
    double omega0 = 0.0;  // rad/day
    double period = 0.0;  // days
};

struct StabilityThresholds {
    double tau_noc = 0.0;
    double tau_suff = 0.0;
    double tau_c = 0.0;
    double hopf_period = 0.0;
    double omega0 = 0.0;
};

/// Delay below which eta b tau < pi/2 guarantees local stability.
[[nodiscard]] inline double tau_sufficient(const LinearCoefficients& lin, double eta = 1.0)
{
    if (!(lin.b > 0.0)) throw DomainError("tau_sufficient requires b > 0");
    return numeric::kPi / (2.0 * eta * lin.b);
}

/// Hopf delay eta tau sqrt(b^2 - a^2) = arccos(-a/b) with its crossing frequency and period.
[[nodiscard]] inline CriticalDelay tau_critical(const LinearCoefficients& lin, double eta = 1.0)
{
    if (!(lin.a >= 0.0) || !lin.supports_hopf()) throw NoHopf();
    const double root = std::sqrt(lin.b * lin.b - lin.a * lin.a);
    const double omega0 = eta * root;
    const double tau_c = std::acos(-lin.a / lin.b) / omega0;
    return {tau_c, omega0, 2.0 * numeric::kPi / omega0};
}

namespace detail {

/// Unique tau >= 0 with b tau e^{a tau} = 1/e (a >= 0, b > 0). Shared by tau_noc and tau*.
[[nodiscard]] inline double touch_point_delay(double a, double b)
{
    if (!(b > 0.0) || !(a >= 0.0)) throw DomainError("touch point requires a >= 0 and b > 0");
    auto f = [a, b](double tau) { return b * tau * std::exp(a * tau) - numeric::kInvE; };
    // b tau e^{a tau} >= b tau, so 1/(e b) already overshoots.
    const double hi = numeric::kInvE / b;
    return numeric::bisect(f, 0.0, hi, 1e-12 * hi);
}

}  // namespace detail

/// Delay below which the rightmost characteristic root is real: eta b tau e^{eta a tau} = 1/e.
[[nodiscard]] inline double tau_non_oscillatory(const LinearCoefficients& lin, double eta = 1.0)
{
    return detail::touch_point_delay(eta * lin.a, eta * lin.b);
}

[[nodiscard]] inline StabilityThresholds thresholds(const LinearCoefficients& lin, double eta = 1.0)
{
    const auto crit = tau_critical(lin, eta);
    return {tau_non_oscillatory(lin, eta), tau_sufficient(lin, eta), crit.tau_c, crit.period,
            crit.omega0};
}

/**
 * Model-specific printed forms of the stability conditions. They are kept as
 * independent cross-checks of the generic (a, b) route and are returned in
 * absolute value: the Mackey-Glass period and left-hand side carry a factor
 * (gamma - beta) that is negative whenever an equilibrium exists.
 */
namespace closed_form {

/// tau_c from gamma n tau (gamma-beta)/beta sqrt(1 + 2 beta/(n(gamma-beta))) = arccos(beta/(beta + n(gamma-beta))).
[[nodiscard]] inline double mackey_glass_tau_c(double beta, double gamma, double n)
{
    const double d = gamma - beta;
    const double radicand = 1.0 + 2.0 * beta / (n * d);
    if (!(radicand > 0.0)) throw NoHopf();
    const double rate = gamma * n * d / beta * std::sqrt(radicand);
    return std::acos(beta / (beta + n * d)) / std::fabs(rate);
}

/// Raw (signed) Hopf period 2 pi beta / (gamma n (gamma-beta) sqrt(...)); negative for beta > gamma.
[[nodiscard]] inline double mackey_glass_period_raw(double beta, double gamma, double n)
{
    const double d = gamma - beta;
    const double radicand = 1.0 + 2.0 * beta / (n * d);
    if (!(radicand > 0.0)) throw NoHopf();
    return 2.0 * numeric::kPi * beta / (gamma * n * d * std::sqrt(radicand));
}

[[nodiscard]] inline double mackey_glass_tau_suff(double beta, double gamma, double n)
{
    return (numeric::kPi / 2.0) * beta / (gamma * (n * (beta - gamma) - beta));
}

/// Left side of the non-oscillation condition (gamma tau / beta) e^{gamma tau} (n(beta-gamma) - beta).
[[nodiscard]] inline double mackey_glass_noc_lhs(double beta, double gamma, double n, double tau)
{
    return gamma * tau / beta * std::exp(gamma * tau) * (n * (beta - gamma) - beta);
}

[[nodiscard]] inline double lasota_tau_c(double gamma, double n, double x_star)
{
    const double radicand = (x_star - n) * (x_star - n) - 1.0;
    if (!(radicand > 0.0) || !(x_star > n)) throw NoHopf();
    return std::acos(1.0 / (n - x_star)) / (gamma * std::sqrt(radicand));
}

[[nodiscard]] inline double lasota_period(double gamma, double n, double x_star)
{
    const double radicand = (n - x_star) * (n - x_star) - 1.0;
    if (!(radicand > 0.0)) throw NoHopf();
    return 2.0 * numeric::kPi / (gamma * std::sqrt(radicand));
}

[[nodiscard]] inline double lasota_tau_suff(double gamma, double n, double x_star)
{
    return (numeric::kPi / 2.0) / (gamma * (x_star - n));
}

[[nodiscard]] inline double lasota_noc_lhs(double gamma, double n, double x_star, double tau)
{
    return gamma * tau * (x_star - n) * std::exp(gamma * tau);
}

}  // namespace closed_form

/// Hopf period from the model's own closed form, |.|, scaled to gain eta. Uses the given equilibrium.
[[nodiscard]] inline double model_period(ModelKind kind, const ModelParameters& params,
                                         const Equilibrium& eq)
{
    const double raw = kind == ModelKind::MackeyGlass
                           ? closed_form::mackey_glass_period_raw(params.beta, params.gamma, params.n)
                           : closed_form::lasota_period(params.gamma, params.n, eq.x_star);
    const auto lin = linearize(kind, params, eq);
    if (!lin.supports_hopf()) throw NoHopf();
    return std::fabs(raw) / params.eta;
}

[[nodiscard]] inline double model_period(ModelKind kind, const ModelParameters& params)
{
    return model_period(kind, params, largest_equilibrium(kind, params));
}

// ---------------------------------------------------------------------------
// Stability charts

enum class SweepParameter { Beta, N, Gamma, B, A };

[[nodiscard]] inline std::string to_string(SweepParameter p)
{
    switch (p) {
        case SweepParameter::Beta: return "beta";
        case SweepParameter::N: return "n";
        case SweepParameter::Gamma: return "gamma";
        case SweepParameter::B: return "b";
        case SweepParameter::A: return "a";
    }
    return "?";
}

[[nodiscard]] inline SweepParameter parse_sweep_parameter(const std::string& s)
{
    if (s == "beta") return SweepParameter::Beta;
    if (s == "n") return SweepParameter::N;
    if (s == "gamma") return SweepParameter::Gamma;
    if (s == "b") return SweepParameter::B;
    if (s == "a") return SweepParameter::A;
    throw InvalidSweep("unknown sweep parameter '" + s + "'");
}

/// One chart row. Empty optionals mean "unbounded" (stable for every delay).
struct ChartRow {
    double value = 0.0;
    bool has_equilibrium = true;
    std::optional<double> tau_noc;
    std::optional<double> tau_suff;
    std::optional<double> tau_c;
    std::optional<double> period;
};

/// Delay thresholds for a linearisation; tau_c/period are unbounded when b <= a,
/// tau_noc/tau_suff when b <= 0.
[[nodiscard]] inline ChartRow chart_row(double value, const LinearCoefficients& lin, double eta)
{
    ChartRow row;
    row.value = value;
    if (lin.b > 0.0) {
        row.tau_noc = tau_non_oscillatory(lin, eta);
        row.tau_suff = tau_sufficient(lin, eta);
    }
    if (lin.supports_hopf()) {
        const auto crit = tau_critical(lin, eta);
        row.tau_c = crit.tau_c;
        row.period = crit.period;
    }
    return row;
}

struct ModelChartSpec {
    ModelKind kind = ModelKind::MackeyGlass;
    ModelParameters fixed;  // the swept field is overwritten per point
    SweepParameter sweep = SweepParameter::Beta;
    double from = 0.0;
    double to = 1.0;
    std::size_t resolution = 101;
};

/// Thresholds over a one-parameter sweep of a concrete model (largest equilibrium per point).
[[nodiscard]] inline std::vector<ChartRow> stability_chart(const ModelChartSpec& spec)
{
    if (spec.sweep != SweepParameter::Beta && spec.sweep != SweepParameter::N &&
        spec.sweep != SweepParameter::Gamma) {
        throw InvalidSweep("model charts sweep one of beta, n, gamma");
    }
    if (spec.resolution < 2 || !(spec.to > spec.from)) throw InvalidSweep("empty sweep range");
    const auto grid = numeric::linspace(spec.from, spec.to, spec.resolution);
    return numeric::parallel_map(grid.size(), [&](std::size_t i) {
        ModelParameters p = spec.fixed;
        switch (spec.sweep) {
            case SweepParameter::Beta: p.beta = grid[i]; break;
            case SweepParameter::N: p.n = grid[i]; break;
            default: p.gamma = grid[i]; break;
        }
        try {
            const auto eq = largest_equilibrium(spec.kind, p);
            return chart_row(grid[i], linearize(spec.kind, p, eq), p.eta);
        } catch (const NoEquilibrium&) {
            ChartRow row;
            row.value = grid[i];
            row.has_equilibrium = false;
            return row;
        }
    });
}

/// Generic chart at fixed a, sweeping b: delay thresholds as functions of b.
[[nodiscard]] inline std::vector<ChartRow> generic_chart_over_b(double a, double from, double to,
                                                                std::size_t resolution, double eta = 1.0)
{
    if (resolution < 2 || !(to > from) || !(a >= 0.0)) throw InvalidSweep("invalid b sweep");
    const auto grid = numeric::linspace(from, to, resolution);
    return numeric::parallel_map(grid.size(), [&](std::size_t i) {
        return chart_row(grid[i], LinearCoefficients{a, grid[i]}, eta);
    });
}

/// Boundary values of b at fixed tau: the stability chart in the (a, b) plane.
struct BoundaryRow {
    double a = 0.0;
    double b_noc = 0.0;   // b tau e^{a tau} = 1/e
    double b_suff = 0.0;  // b tau = pi/2
    double b_c = 0.0;     // tau sqrt(b^2 - a^2) = arccos(-a/b)
};

/// Critical b for given (a, tau): the b > a with tau sqrt(b^2-a^2) = arccos(-a/b).
[[nodiscard]] inline double critical_gain(double a, double tau, double eta = 1.0)
{
    if (!(a >= 0.0) || !(tau > 0.0)) throw DomainError("critical_gain requires a >= 0, tau > 0");
    const double ea = eta * a;
    auto f = [&](double eb) { return tau * std::sqrt(eb * eb - ea * ea) - std::acos(-ea / eb); };
    // f(a+) = -pi; f grows without bound, and eb = a + pi/tau + pi/(2 tau) is always past the root.
    const double lo = ea > 0.0 ? ea * (1.0 + 1e-15) : 1e-300;
    const double hi = ea + 2.0 * numeric::kPi / tau;
    return numeric::bisect(f, lo, hi, 1e-13 * hi) / eta;
}

[[nodiscard]] inline std::vector<BoundaryRow> generic_chart_over_a(double tau, double from, double to,
                                                                   std::size_t resolution,
                                                                   double eta = 1.0)
{
    if (resolution < 2 || !(to > from) || !(from >= 0.0) || !(tau > 0.0)) {
        throw InvalidSweep("invalid a sweep");
    }
    const auto grid = numeric::linspace(from, to, resolution);
    return numeric::parallel_map(grid.size(), [&](std::size_t i) {
        const double a = grid[i];
        BoundaryRow r;
        r.a = a;
        r.b_noc = numeric::kInvE / (eta * tau) * std::exp(-eta * a * tau);
        r.b_suff = numeric::kPi / (2.0 * eta * tau);
        r.b_c = critical_gain(a, tau, eta);
        return r;
    });
}

}  // namespace hemostab
