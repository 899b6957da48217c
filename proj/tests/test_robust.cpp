#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hemostab/robust.hpp"
#include "hemostab/spectral.hpp"

using namespace hemostab;

namespace {

IntervalParameters wide_mg(double n_hi) { return {{0.1, 2.0}, {0.1, 2.0}, {7.0, n_hi}}; }

IntervalParameters wide_lasota(double n_lo) { return {{0.1, 2.0}, {0.1, 2.0}, {n_lo, 0.9}}; }

}  // namespace

TEST(Kharitonov, DelayRobustCondition)
{
    const LinearCoefficients lin{0.3, 1.575};
    EXPECT_TRUE(kharitonov_sufficient(lin, 0.5));
    EXPECT_FALSE(kharitonov_sufficient(lin, 0.997));
    EXPECT_TRUE(kharitonov_sufficient(lin, 0.0));
}

TEST(RobustBound, MackeyGlassWideIntervals)
{
    const auto r = robust_delay_bound(ModelKind::MackeyGlass, wide_mg(7.0));
    EXPECT_FALSE(r.unbounded);
    EXPECT_NEAR(r.worst_case_b, 2.0 / 0.1 * (7.0 * 1.9 - 0.1), 1e-9);
    EXPECT_NEAR(r.tau, 0.1 / (2.0 * (7.0 * 1.9 - 0.1)), 1e-12);
    EXPECT_NEAR(r.tau, 0.00379, 1e-5);
}

TEST(RobustBound, MackeyGlassDecreasesWithUpperN)
{
    double prev = robust_delay_bound(ModelKind::MackeyGlass, wide_mg(7.0)).tau;
    for (int k = 1; k <= 130; ++k) {
        const double tau = robust_delay_bound(ModelKind::MackeyGlass, wide_mg(7.0 + 0.1 * k)).tau;
        EXPECT_LT(tau, prev);
        prev = tau;
    }
}

TEST(RobustBound, LasotaIncreasesWithLowerN)
{
    double prev = robust_delay_bound(ModelKind::Lasota, wide_lasota(0.1)).tau;
    for (int k = 1; k <= 80; ++k) {
        const auto r = robust_delay_bound(ModelKind::Lasota, wide_lasota(0.1 + 0.01 * k));
        EXPECT_GT(r.tau, prev);
        ASSERT_TRUE(r.x_star.has_value());
        prev = r.tau;
    }
}

TEST(RobustBound, DegenerateIntervalsGiveNominalGain)
{
    for (auto kind : {ModelKind::MackeyGlass, ModelKind::Lasota}) {
        const ModelParameters p = kind == ModelKind::MackeyGlass ? ModelParameters{0.8, 0.3, 10.0, 0.0, 1.0}
                                                                 : ModelParameters{0.9, 0.1, 0.1, 0.0, 1.0};
        const IntervalParameters iv{{p.beta, p.beta}, {p.gamma, p.gamma}, {p.n, p.n}};
        const auto b = linearize(kind, p, largest_equilibrium(kind, p)).b;
        EXPECT_NEAR(robust_delay_bound(kind, iv).worst_case_b, b, 1e-12);
        EXPECT_NEAR(robust_delay_bound_nominal(kind, iv).worst_case_b, b, 1e-12);
    }
}

TEST(RobustBound, DominatesEveryRealisation)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto kind : {ModelKind::MackeyGlass, ModelKind::Lasota}) {
        const IntervalParameters iv = kind == ModelKind::MackeyGlass
                                          ? IntervalParameters{{0.7, 0.9}, {0.25, 0.35}, {8.0, 12.0}}
                                          : IntervalParameters{{0.8, 1.0}, {0.08, 0.12}, {0.05, 0.2}};
        const auto bound = robust_delay_bound(kind, iv);
        for (int i = 0; i < 100; ++i) {
            ModelParameters p;
            p.beta = iv.beta.lo + (iv.beta.hi - iv.beta.lo) * u(rng);
            p.gamma = iv.gamma.lo + (iv.gamma.hi - iv.gamma.lo) * u(rng);
            p.n = iv.n.lo + (iv.n.hi - iv.n.lo) * u(rng);
            const auto lin = linearize(kind, p, largest_equilibrium(kind, p));
            EXPECT_LE(lin.b, bound.worst_case_b);
            // Any delay under the robust bound is locally stable.
            EXPECT_LT(rightmost_root(lin, 0.999 * bound.tau).re, 0.0);
        }
    }
}

TEST(RobustBound, UnboundedWhenFeedbackCannotDestabilise)
{
    const auto r = robust_delay_bound(ModelKind::MackeyGlass, {{0.5, 0.5}, {0.3, 0.3}, {1.0, 1.0}});
    EXPECT_TRUE(r.unbounded);
    EXPECT_TRUE(std::isinf(r.tau));
}

TEST(RobustBound, RejectsMalformedIntervals)
{
    EXPECT_THROW((void)robust_delay_bound(ModelKind::MackeyGlass, {{0.9, 0.5}, {0.3, 0.3}, {1.0, 1.0}}),
                 DomainError);
    EXPECT_THROW((void)robust_delay_bound(ModelKind::Lasota, {{0.0, 0.5}, {0.3, 0.3}, {1.0, 1.0}}), DomainError);
}

TEST(RobustBound, LasotaNominalIsLessConservative)
{
    const auto wc = robust_delay_bound(ModelKind::Lasota, wide_lasota(0.5));
    const auto nom = robust_delay_bound_nominal(ModelKind::Lasota, wide_lasota(0.5));
    EXPECT_GE(nom.tau, wc.tau);
    EXPECT_LE(*nom.x_star, *wc.x_star);
}
