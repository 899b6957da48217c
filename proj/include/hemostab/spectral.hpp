#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "hemostab/error.hpp"
#include "hemostab/models.hpp"
#include "hemostab/numeric.hpp"

namespace hemostab {

/// Root of lambda + eta a + eta b e^{-lambda tau} = 0; the im >= 0 member of a conjugate pair.
struct CharacteristicRoot {
    double re = 0.0;
    double im = 0.0;
    double residual = 0.0;
};

struct SpectralOptions {
    /// Imaginary starts are spaced pi/(2 tau) up to imag_span_factor * eta * b.
    double imag_span_factor = 4.0;
    int real_starts = 6;
    int max_iterations = 200;
    double residual_tolerance = 1e-10;
    double dedup_distance = 1e-8;
};

[[nodiscard]] inline std::complex<double> characteristic_function(const LinearCoefficients& lin,
                                                                  double tau, double eta,
                                                                  std::complex<double> lambda)
{
    return lambda + eta * lin.a + eta * lin.b * std::exp(-lambda * tau);
}

namespace detail {

/// Damped Newton from one start. Returns false when the iteration fails to settle.
inline bool newton_characteristic(const LinearCoefficients& lin, double tau, double eta,
                                  std::complex<double>& lambda, const SpectralOptions& opt)
{
    auto F = [&](std::complex<double> z) { return characteristic_function(lin, tau, eta, z); };
    auto dF = [&](std::complex<double> z) {
        return 1.0 - eta * lin.b * tau * std::exp(-z * tau);
    };
    std::complex<double> f = F(lambda);
    for (int it = 0; it < opt.max_iterations; ++it) {
        const auto d = dF(lambda);
        if (std::abs(d) == 0.0 || !std::isfinite(std::abs(f))) return false;
        std::complex<double> step = f / d;
        std::complex<double> next = lambda - step;
        std::complex<double> fn = F(next);
        for (int k = 0; k < 30 && !(std::abs(fn) < std::abs(f)); ++k) {
            step *= 0.5;
            next = lambda - step;
            fn = F(next);
        }
        const double scale = std::max(1.0, std::abs(next));
        lambda = next;
        f = fn;
        if (std::abs(step) < 1e-15 * scale) break;
    }
    // A couple of plain polishing steps.
    for (int k = 0; k < 3; ++k) {
        const auto d = dF(lambda);
        if (std::abs(d) == 0.0) break;
        const auto next = lambda - F(lambda) / d;
        if (std::abs(F(next)) <= std::abs(F(lambda))) lambda = next;
    }
    return std::isfinite(lambda.real()) && std::isfinite(lambda.imag()) &&
           std::abs(F(lambda)) < opt.residual_tolerance;
}

}  // namespace detail

/**
 * @brief Distinct characteristic roots reachable from the multistart grid.
 *
 * Real starts span [-a - b - 2/tau, b] (scaled by eta); imaginary starts are
 * k pi/(2 tau) for k = 0..K with K pi/(2 tau) >= imag_span_factor * eta * b.
 */
[[nodiscard]] inline std::vector<CharacteristicRoot> characteristic_roots(
    const LinearCoefficients& lin, double tau, double eta = 1.0, const SpectralOptions& opt = {})
{
    if (!(tau > 0.0) || !(lin.b > 0.0) || !(eta > 0.0)) {
        throw DomainError("spectral search requires tau > 0, b > 0, eta > 0");
    }
    const double ea = eta * lin.a;
    const double eb = eta * lin.b;
    const double re_lo = -ea - eb - 2.0 / tau;
    const double re_hi = eb;
    const double im_step = numeric::kPi / (2.0 * tau);
    const int K = static_cast<int>(std::ceil(opt.imag_span_factor * eb / im_step)) + 2;

    std::vector<CharacteristicRoot> roots;
    for (int k = 0; k <= K; ++k) {
        for (int r = 0; r < opt.real_starts; ++r) {
            const double re = re_lo + (re_hi - re_lo) * r / std::max(1, opt.real_starts - 1);
            std::complex<double> z(re, k * im_step);
            if (!detail::newton_characteristic(lin, tau, eta, z, opt)) continue;
            z = {z.real(), std::fabs(z.imag())};
            if (z.imag() < 1e-12) z = {z.real(), 0.0};
            const bool seen = std::any_of(roots.begin(), roots.end(), [&](const auto& q) {
                return std::abs(std::complex<double>(q.re, q.im) - z) < opt.dedup_distance;
            });
            if (!seen) {
                roots.push_back({z.real(), z.imag(), std::abs(characteristic_function(lin, tau, eta, z))});
            }
        }
    }
    std::sort(roots.begin(), roots.end(),
              [](const auto& l, const auto& r) { return l.re > r.re; });
    return roots;
}

/// Root with the largest real part (decides stability; -re is the decay rate).
[[nodiscard]] inline CharacteristicRoot rightmost_root(const LinearCoefficients& lin, double tau,
                                                       double eta = 1.0,
                                                       const SpectralOptions& opt = {})
{
    const auto roots = characteristic_roots(lin, tau, eta, opt);
    if (roots.empty()) throw ConvergenceError("no characteristic root converged");
    return roots.front();
}

/// omega0 = eta sqrt(b^2 - a^2), the frequency at which the rightmost pair crosses the axis.
[[nodiscard]] inline double crossing_frequency(const LinearCoefficients& lin, double eta = 1.0)
{
    if (!lin.supports_hopf()) throw NoHopf();
    return eta * std::sqrt(lin.b * lin.b - lin.a * lin.a);
}

}  // namespace hemostab
