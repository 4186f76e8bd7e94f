#include <relkin/diagnostics.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace relkin;

TEST(Counterexample, TemperedPieceSettlesAndUntemperedGrows) {
    const auto k = KernelSpec::soft(1.5, 0.25);
    const auto r = zetaB_split(Vec3(0, 0, 0), k, {5, 10, 20}, 16);
    ASSERT_EQ(r.zetaB2.size(), 3u);
    EXPECT_GT(r.growthFactor, 1.9);
    EXPECT_LT(r.b1LastChange, 0.01);
    EXPECT_THROW(zetaB_split(Vec3(0, 0, 0), k, {0.0}), DomainError);
}

TEST(Counterexample, DecayMakesSecondPieceFinite) {
    const auto k = KernelSpec::hard(0, 0.5);
    const auto r = zetaB_split(Vec3(0, 0, 0), k, {20, 40}, 16, 1.0, 0.05);
    EXPECT_NEAR(r.zetaB2[1] / r.zetaB2[0], 1.0, 1e-6);
}

TEST(ReducedK2, RatioIsScaleFree) {
    // (pi/64) int x^{-1-gamma} chi_0(x) dx, independent of k and of (p', q)
    const double ref = 0.040681759156484354;
    const auto a = mass_shell_lift(0.3, 1, -2), b = mass_shell_lift(-1, 0.5, 0.2);
    for (int k = -5; k <= 5; ++k) {
        const auto r = reduced_k2_bound(a, b, k, 0.5);
        EXPECT_NEAR(r.ratio(), ref, 1e-10) << k;
        EXPECT_LT(r.Y1, r.Y2);
    }
    // the y-window shrinks like 4^{-k}
    const auto r0 = reduced_k2_bound(a, b, 0, 0.5), r3 = reduced_k2_bound(a, b, 3, 0.5);
    EXPECT_NEAR((r0.Y2 - r0.Y1) / (r3.Y2 - r3.Y1), 64.0, 1e-6);
}

TEST(ExpBound, NoViolations) {
    const auto r = exp_bound_suite(2000, 3);
    EXPECT_EQ(r.points, 2000u);
    EXPECT_EQ(r.violations, 0u);
    EXPECT_LE(r.worstJ, 1.0);
    EXPECT_LE(r.fittedC, 1.0 + 1e-12);
    EXPECT_LE(r.fittedCTheta, 1.0 + 1e-12);
}

TEST(JacobianScan, GridAndSkip) {
    GridSpec g{-1, 1, 1};
    EXPECT_EQ(g.count(), 3);
    const auto s = jacobian_scan(Vec3(0, 0, 0), Vec3(0, 0, 2), g);
    EXPECT_EQ(s.skipped, 1u);
    EXPECT_EQ(s.rows.size(), 26u);
    EXPECT_TRUE(std::isfinite(s.minAbs));
}
