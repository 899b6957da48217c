#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "hemostab/error.hpp"
#include "hemostab/models.hpp"
#include "hemostab/numeric.hpp"
#include "hemostab/stability.hpp"

namespace hemostab {

using cplx = std::complex<double>;

enum class BifurcationType { Supercritical, Subcritical };

[[nodiscard]] inline std::string to_string(BifurcationType t)
{
    return t == BifurcationType::Supercritical ? "supercritical" : "subcritical";
}

struct HopfPoint {
    double eta_c = 0.0;
    double omega0 = 0.0;
};

/// First Lyapunov coefficient and the quantities derived from it at one gain.
struct LyapunovSummary {
    double eta = 0.0;
    cplx c1_0;
    double mu2 = 0.0;
    double beta2 = 0.0;
};

/**
 * Center-manifold reduction of x' = eta f(x(t), x(t - tau)) at its Hopf point,
 * with q(theta) = e^{i omega0 theta} and q*(s) = D e^{i omega0 s}.
 * Coefficient fields are evaluated at the requested gain `eta`; `critical`
 * repeats c1(0), mu2 and beta2 at eta = eta_c.
 */
struct HopfReport {
    double tau = 0.0;
    double eta = 0.0;
    double eta_c = 0.0;
    double omega0 = 0.0;
    cplx D;
    cplx g20, g11, g02, g21;
    cplx w20_at_0, w20_at_minus_tau;
    cplx w11_at_0, w11_at_minus_tau;
    cplx E1, E2;
    cplx c1_0;
    double alpha_prime = 0.0;
    double mu2 = 0.0;
    double beta2 = 0.0;
    BifurcationType bifurcation_type = BifurcationType::Supercritical;
    bool orbit_stable = false;
    double period = 0.0;
    LyapunovSummary critical;
};

/// e^{i phi} built from cos/sin.
[[nodiscard]] inline cplx unit_phasor(double phi) { return std::polar(1.0, phi); }

/// eta_c tau sqrt(b^2 - a^2) = arccos(-a/b) at fixed tau.
[[nodiscard]] inline HopfPoint hopf_point(const LinearCoefficients& lin, double tau)
{
    if (!(lin.a >= 0.0) || !lin.supports_hopf()) throw NoHopf();
    if (!(tau > 0.0)) throw DomainError("hopf_point requires tau > 0");
    const double root = std::sqrt(lin.b * lin.b - lin.a * lin.a);
    const double eta_c = std::acos(-lin.a / lin.b) / (tau * root);
    return {eta_c, eta_c * root};
}

[[nodiscard]] inline HopfPoint hopf_point(ModelKind kind, const ModelParameters& params)
{
    const auto eq = largest_equilibrium(kind, params);
    return hopf_point(linearize(kind, params, eq), params.tau);
}

/// Re(d lambda / d eta) at lambda = i omega0, from implicit differentiation of the characteristic equation.
[[nodiscard]] inline double alpha_prime(const LinearCoefficients& lin, double tau, double eta_c,
                                        double omega0)
{
    const cplx lambda(0.0, omega0);
    const cplx denom = 1.0 - eta_c * lin.b * tau * unit_phasor(-omega0 * tau);
    if (std::abs(denom) < 1e-12) throw DegenerateCrossing("1 - eta b tau e^{-i omega tau} vanishes");
    return ((lambda / eta_c) / denom).real();
}

namespace detail {

struct NormalFormTerms {
    cplx D, g20, g11, g02, g21, w20_0, w20_m, w11_0, w11_m, E1, E2, c1;
};

/// Normal-form coefficients at gain eta with the crossing frequency omega0 held fixed.
[[nodiscard]] inline NormalFormTerms normal_form_terms(const TaylorCoefficients& xi, double tau,
                                                       double eta, double omega0)
{
    const cplx I(0.0, 1.0);
    const double w = omega0;
    const cplx iw = I * w;
    const cplx e1 = unit_phasor(-w * tau);      // e^{-i w tau}
    const cplx e2 = unit_phasor(-2.0 * w * tau);
    NormalFormTerms t;
    t.D = 1.0 / (1.0 + tau * eta * xi.xi_y * std::conj(e1));
    const cplx qs0 = std::conj(t.D);  // conj(q*(0))
    t.g20 = 2.0 * qs0 * eta * xi.xi_yy * e2;
    t.g11 = 2.0 * qs0 * eta * xi.xi_yy;
    t.g02 = 2.0 * qs0 * eta * xi.xi_yy * std::conj(e2);
    const cplx g02c = std::conj(t.g02);
    const cplx g11c = std::conj(t.g11);

    const cplx theta1 = (eta * xi.xi_x - 2.0 * iw) * (t.g20 / iw + g02c / (3.0 * iw)) +
                        eta * xi.xi_y * (t.g20 / iw * e1 + g02c / (3.0 * iw) * std::conj(e1)) +
                        t.g20 + g02c - 2.0 * eta * xi.xi_yy * e2;
    const cplx theta2 = -eta * xi.xi_x * (t.g11 / iw - g11c / iw) -
                        eta * xi.xi_y * (t.g11 / iw * e1 - g11c / iw * std::conj(e1)) + t.g11 + g11c -
                        2.0 * eta * xi.xi_yy;
    const cplx den1 = eta * xi.xi_x + eta * xi.xi_y * e2 - 2.0 * iw;
    const cplx den2 = eta * (xi.xi_x + xi.xi_y);
    if (std::abs(den1) < 1e-12 || std::abs(den2) < 1e-12) {
        throw ResonantDenominator("normal form denominator vanishes");
    }
    t.E1 = theta1 / den1;
    t.E2 = theta2 / den2;

    auto w20 = [&](double th) {
        return -t.g20 / iw * unit_phasor(w * th) - g02c / (3.0 * iw) * unit_phasor(-w * th) +
               t.E1 * unit_phasor(2.0 * w * th);
    };
    auto w11 = [&](double th) {
        return t.g11 / iw * unit_phasor(w * th) - g11c / iw * unit_phasor(-w * th) + t.E2;
    };
    t.w20_0 = w20(0.0);
    t.w20_m = w20(-tau);
    t.w11_0 = w11(0.0);
    t.w11_m = w11(-tau);
    t.g21 = qs0 * eta *
            (xi.xi_yy * (4.0 * t.w11_m * e1 + 2.0 * t.w20_m * std::conj(e1)) +
             6.0 * xi.xi_yyy * e1);
    t.c1 = I / (2.0 * w) *
               (t.g20 * t.g11 - 2.0 * std::norm(t.g11) - std::norm(t.g02) / 3.0) +
           t.g21 / 2.0;
    return t;
}

}  // namespace detail

/**
 * @brief Type of the Hopf bifurcation in the gain eta and stability of the emerging cycle.
 *
 * The crossing (eta_c, omega0) and alpha'(0) come from the linearisation at the
 * given delay; the Taylor coefficients and eta enter the normal-form terms.
 * mu2 = -Re c1(0) / alpha'(0) (supercritical iff mu2 > 0) and
 * beta2 = 2 Re c1(0) (cycle stable iff beta2 < 0).
 */
[[nodiscard]] inline HopfReport normal_form(const TaylorCoefficients& xi, double tau, double eta)
{
    const LinearCoefficients lin{-xi.xi_x, -xi.xi_y};
    const auto hp = hopf_point(lin, tau);
    const double ap = alpha_prime(lin, tau, hp.eta_c, hp.omega0);

    const auto t = detail::normal_form_terms(xi, tau, eta, hp.omega0);
    HopfReport r;
    r.tau = tau;
    r.eta = eta;
    r.eta_c = hp.eta_c;
    r.omega0 = hp.omega0;
    r.D = t.D;
    r.g20 = t.g20;
    r.g11 = t.g11;
    r.g02 = t.g02;
    r.g21 = t.g21;
    r.w20_at_0 = t.w20_0;
    r.w20_at_minus_tau = t.w20_m;
    r.w11_at_0 = t.w11_0;
    r.w11_at_minus_tau = t.w11_m;
    r.E1 = t.E1;
    r.E2 = t.E2;
    r.c1_0 = t.c1;
    r.alpha_prime = ap;
    r.mu2 = -t.c1.real() / ap;
    r.beta2 = 2.0 * t.c1.real();
    r.bifurcation_type = r.mu2 > 0.0 ? BifurcationType::Supercritical : BifurcationType::Subcritical;
    r.orbit_stable = r.beta2 < 0.0;
    r.period = 2.0 * numeric::kPi / hp.omega0;

    const auto tc = detail::normal_form_terms(xi, tau, hp.eta_c, hp.omega0);
    r.critical = {hp.eta_c, tc.c1, -tc.c1.real() / ap, 2.0 * tc.c1.real()};
    return r;
}

[[nodiscard]] inline HopfReport normal_form(ModelKind kind, const ModelParameters& params,
                                            const Equilibrium& eq)
{
    return normal_form(taylor_coefficients(kind, params, eq), params.tau, params.eta);
}

/// Uses params.eta as the evaluation gain and the largest equilibrium.
[[nodiscard]] inline HopfReport normal_form(ModelKind kind, const ModelParameters& params)
{
    return normal_form(kind, params, largest_equilibrium(kind, params));
}

/**
 * <q*, q> evaluated with the bilinear form
 *   conj(psi(0)) phi(0) - int_{-tau}^{0} int_{0}^{theta} conj(psi(zeta - theta)) d eta(theta) phi(zeta) d zeta,
 * where only the point mass eta xi_y at theta = -tau contributes to the integral.
 * The zeta integral is done with composite Simpson on `panels` panels.
 */
[[nodiscard]] inline cplx eigenvector_pairing(const TaylorCoefficients& xi, double tau, double eta,
                                              double omega0, bool conjugate_q = false,
                                              int panels = 2000)
{
    const cplx D = 1.0 / (1.0 + tau * eta * xi.xi_y * unit_phasor(omega0 * tau));
    auto q = [&](double th) { return conjugate_q ? unit_phasor(-omega0 * th) : unit_phasor(omega0 * th); };
    auto qstar_conj = [&](double s) { return std::conj(D * unit_phasor(omega0 * s)); };
    // integral over zeta from 0 to -tau of conj(q*(zeta + tau)) q(zeta)
    const int m = panels % 2 == 0 ? panels : panels + 1;
    const double hstep = -tau / m;
    cplx acc = 0.0;
    for (int k = 0; k <= m; ++k) {
        const double z = hstep * k;
        const double wgt = (k == 0 || k == m) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        acc += wgt * qstar_conj(z + tau) * q(z);
    }
    acc *= hstep / 3.0;
    return qstar_conj(0.0) * q(0.0) - eta * xi.xi_y * acc;
}

}  // namespace hemostab
