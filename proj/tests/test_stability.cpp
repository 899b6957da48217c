#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hemostab/spectral.hpp"
#include "hemostab/stability.hpp"

using namespace hemostab;

namespace {

const LinearCoefficients kMG{0.3, 1.575};

LinearCoefficients lin_of(ModelKind kind, const ModelParameters& p)
{
    return linearize(kind, p, largest_equilibrium(kind, p));
}

}  // namespace

TEST(Thresholds, MackeyGlassValues)
{
    EXPECT_NEAR(tau_sufficient(kMG), 0.997, 1e-3);
    const auto c = tau_critical(kMG);
    EXPECT_NEAR(c.tau_c, 1.14, 5e-3);
    EXPECT_NEAR(c.omega0, 1.546, 1e-3);
    EXPECT_NEAR(c.period, 4.06, 5e-3);
    EXPECT_NEAR(tau_non_oscillatory(kMG), 0.22, 5e-3);
}

TEST(Thresholds, LasotaValues)
{
    const auto lin = lin_of(ModelKind::Lasota, {0.9, 0.1, 0.1, 0.0, 1.0});
    EXPECT_NEAR(tau_critical(lin).tau_c, 17.7, 0.1);
    EXPECT_NEAR(tau_critical(lin).omega0, 0.126, 1e-3);
    EXPECT_NEAR(tau_non_oscillatory(LinearCoefficients{0.3, 0.168}), 1.43, 0.02);
}

TEST(Thresholds, UndelayedDecayLimits)
{
    EXPECT_NEAR(tau_non_oscillatory(LinearCoefficients{0.0, 1.0}), 1.0 / std::numbers::e, 1e-12);
    const auto c = tau_critical(LinearCoefficients{0.0, 2.0});
    EXPECT_NEAR(c.omega0, 2.0, 1e-15);
    EXPECT_NEAR(c.tau_c, std::numbers::pi / 4.0, 1e-15);
    EXPECT_NEAR(critical_gain(0.0, 1.0), std::numbers::pi / 2.0, 1e-10);
}

TEST(Thresholds, NoHopfWhenFeedbackIsWeak)
{
    EXPECT_THROW((void)tau_critical(LinearCoefficients{0.3, 0.2}), NoHopf);
    EXPECT_THROW((void)tau_sufficient(LinearCoefficients{0.3, -0.1}), DomainError);
}

TEST(Thresholds, GainScaling)
{
    for (double eta : {0.5, 1.0, 2.0, 3.7}) {
        EXPECT_NEAR(tau_critical(kMG, eta).tau_c * eta, tau_critical(kMG).tau_c, 1e-12);
        EXPECT_NEAR(tau_sufficient(kMG, eta) * eta, tau_sufficient(kMG), 1e-12);
        EXPECT_NEAR(tau_non_oscillatory(kMG, eta) * eta, tau_non_oscillatory(kMG), 1e-11);
    }
}

TEST(Thresholds, OrderingOnRandomLinearisations)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = 0.01 + 3.0 * u(rng);
        const LinearCoefficients lin{a, a * (1.0 + 1e-3 + 5.0 * u(rng))};
        const double eta = 0.2 + 3.0 * u(rng);
        const auto t = thresholds(lin, eta);
        EXPECT_LT(t.tau_noc, 1.0 / (eta * lin.b));
        EXPECT_LT(1.0 / (eta * lin.b), t.tau_suff);
        EXPECT_LT(t.tau_suff, t.tau_c);
    }
}

TEST(Thresholds, NonOscillatoryBoundarySolvesItsEquation)
{
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const LinearCoefficients lin{2.0 * u(rng), 0.05 + 3.0 * u(rng)};
        const double tau = tau_non_oscillatory(lin);
        EXPECT_NEAR(lin.b * tau * std::exp(lin.a * tau), 1.0 / std::numbers::e, 1e-11);
    }
}

TEST(Thresholds, CriticalDelayIsWhereTheRightmostRootCrosses)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        const double a = 0.05 + 1.0 * u(rng);
        const LinearCoefficients lin{a, a * (1.1 + 4.0 * u(rng))};
        const double tc = tau_critical(lin).tau_c;
        auto re = [&](double tau) { return rightmost_root(lin, tau).re; };
        const double crossing = numeric::bisect(re, 0.5 * tc, 1.5 * tc, 1e-10);
        EXPECT_NEAR(crossing, tc, 1e-8) << "a=" << lin.a << " b=" << lin.b;
    }
}

TEST(ClosedForms, AgreeWithGenericRoute)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int mg = 0;
    int ls = 0;
    for (int i = 0; i < 400; ++i) {
        ModelParameters p;
        p.gamma = 0.05 + 0.5 * u(rng);
        p.beta = p.gamma * (1.2 + 3.0 * u(rng));
        if (i % 2 == 0) {
            p.n = 3.0 + 20.0 * u(rng);
            const auto lin = lin_of(ModelKind::MackeyGlass, p);
            if (!lin.supports_hopf()) continue;
            const auto c = tau_critical(lin);
            EXPECT_NEAR(closed_form::mackey_glass_tau_c(p.beta, p.gamma, p.n), c.tau_c, 1e-9 * c.tau_c);
            EXPECT_NEAR(std::fabs(closed_form::mackey_glass_period_raw(p.beta, p.gamma, p.n)), c.period,
                        1e-9 * c.period);
            EXPECT_NEAR(closed_form::mackey_glass_tau_suff(p.beta, p.gamma, p.n), tau_sufficient(lin),
                        1e-9 * tau_sufficient(lin));
            const double tn = tau_non_oscillatory(lin);
            EXPECT_NEAR(closed_form::mackey_glass_noc_lhs(p.beta, p.gamma, p.n, tn), 1.0 / std::numbers::e, 1e-9);
            EXPECT_NEAR(model_period(ModelKind::MackeyGlass, p), c.period, 1e-9 * c.period);
            ++mg;
        } else {
            p.beta = p.gamma * (2.0 + 20.0 * u(rng));
            p.n = 0.01 + 0.9 * u(rng);
            const auto eq = largest_equilibrium(ModelKind::Lasota, p);
            const auto lin = linearize(ModelKind::Lasota, p, eq);
            if (!lin.supports_hopf()) continue;
            const auto c = tau_critical(lin);
            EXPECT_NEAR(closed_form::lasota_tau_c(p.gamma, p.n, eq.x_star), c.tau_c, 1e-9 * c.tau_c);
            EXPECT_NEAR(closed_form::lasota_period(p.gamma, p.n, eq.x_star), c.period, 1e-9 * c.period);
            EXPECT_NEAR(closed_form::lasota_tau_suff(p.gamma, p.n, eq.x_star), tau_sufficient(lin),
                        1e-9 * tau_sufficient(lin));
            const double tn = tau_non_oscillatory(lin);
            EXPECT_NEAR(closed_form::lasota_noc_lhs(p.gamma, p.n, eq.x_star, tn), 1.0 / std::numbers::e, 1e-9);
            ++ls;
        }
    }
    EXPECT_GT(mg, 50);
    EXPECT_GT(ls, 50);
}

TEST(ClosedForms, MackeyGlassPrintedPeriodIsNegative)
{
    EXPECT_LT(closed_form::mackey_glass_period_raw(0.8, 0.3, 10.0), 0.0);
    EXPECT_NEAR(model_period(ModelKind::MackeyGlass, {0.8, 0.3, 10.0, 0.0, 1.0}), 4.0637, 1e-4);
}

TEST(Charts, MackeyGlassThresholdsFallWithBeta)
{
    ModelChartSpec spec{ModelKind::MackeyGlass, {0.8, 0.3, 10.0, 0.0, 1.0}, SweepParameter::Beta, 0.5, 1.0, 51};
    const auto rows = stability_chart(spec);
    ASSERT_EQ(rows.size(), 51u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_LT(*rows[i].tau_c, *rows[i - 1].tau_c);
        EXPECT_LT(*rows[i].tau_suff, *rows[i - 1].tau_suff);
        EXPECT_LT(*rows[i].tau_noc, *rows[i - 1].tau_noc);
    }
}

TEST(Charts, LasotaThresholdsRiseWithN)
{
    ModelChartSpec spec{ModelKind::Lasota, {0.9, 0.1, 0.1, 0.0, 1.0}, SweepParameter::N, 0.001, 0.6, 41};
    const auto rows = stability_chart(spec);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ASSERT_TRUE(rows[i].tau_c && rows[i - 1].tau_c);
        EXPECT_GT(*rows[i].tau_c, *rows[i - 1].tau_c);
        EXPECT_GT(*rows[i].tau_suff, *rows[i - 1].tau_suff);
    }
}

TEST(Charts, SentinelsAndMissingEquilibria)
{
    ModelChartSpec spec{ModelKind::MackeyGlass, {0.8, 0.3, 10.0, 0.0, 1.0}, SweepParameter::Beta, 0.1, 0.5, 5};
    const auto rows = stability_chart(spec);
    EXPECT_FALSE(rows.front().has_equilibrium);  // beta = 0.1 < gamma
    const auto over_b = generic_chart_over_b(0.5, 0.1, 2.0, 20);
    for (const auto& r : over_b) {
        EXPECT_EQ(r.tau_c.has_value(), r.value > 0.5);
        EXPECT_TRUE(r.tau_suff.has_value());
    }
    EXPECT_THROW((void)stability_chart({ModelKind::MackeyGlass, {}, SweepParameter::B, 0.0, 1.0, 5}), InvalidSweep);
}

TEST(Charts, GenericBoundaryAboveSufficientBoundary)
{
    const auto rows = generic_chart_over_a(1.0, 0.0, 3.0, 61);
    EXPECT_NEAR(rows.front().b_c, std::numbers::pi / 2.0, 1e-9);
    EXPECT_NEAR(rows.front().b_suff, std::numbers::pi / 2.0, 1e-15);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_GT(rows[i].b_c, rows[i].b_suff);
        EXPECT_LT(rows[i].b_noc, rows[i].b_suff);
        EXPECT_NEAR(tau_critical(LinearCoefficients{rows[i].a, rows[i].b_c}).tau_c, 1.0, 1e-9);
    }
}

TEST(Charts, ParallelResultsIndependentOfWorkerCount)
{
    ModelChartSpec spec{ModelKind::Lasota, {0.9, 0.1, 0.1, 0.0, 1.0}, SweepParameter::Beta, 0.5, 1.0, 64};
    setenv("HEMOSTAB_WORKERS", "1", 1);
    const auto serial = stability_chart(spec);
    setenv("HEMOSTAB_WORKERS", "8", 1);
    const auto parallel = stability_chart(spec);
    unsetenv("HEMOSTAB_WORKERS");
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(serial[i].value, parallel[i].value);
        EXPECT_EQ(serial[i].tau_c, parallel[i].tau_c);
    }
}
