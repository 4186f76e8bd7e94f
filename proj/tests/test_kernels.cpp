#include <relkin/kernels.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace relkin;

TEST(KernelSpec, ValidRanges) {
    EXPECT_NO_THROW(KernelSpec::hard(0, 0.5).validate());
    EXPECT_NO_THROW(KernelSpec::hard(-0.5, 0.5).validate());
    EXPECT_NO_THROW(KernelSpec::soft(1.5, 0.25).validate());
    EXPECT_THROW(KernelSpec::hard(-0.6, 0.5).validate(), ConfigError);
    EXPECT_THROW(KernelSpec::hard(2.0, 0.5).validate(), ConfigError);
    EXPECT_THROW(KernelSpec::soft(0.4, 0.5).validate(), ConfigError);
    EXPECT_THROW(KernelSpec::soft(2.0, 0.5).validate(), ConfigError);
}

TEST(KernelSpec, GammaOutsideAngularRange) {
    try {
        KernelSpec::hard(0, 1.5).validate();
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("0 < gamma < 1"), std::string::npos);
    }
    EXPECT_THROW(KernelSpec::hard(0, 0.0).validate(), ConfigError);
}

TEST(Phi, Values) {
    const auto k = KernelSpec::hard(1.0, 0.5);
    EXPECT_DOUBLE_EQ(phi(3.0, k), 3.0);
    EXPECT_EQ(phi(0.0, KernelSpec::hard(0, 0.5)), 1.0);
    EXPECT_THROW(phi(0.0, KernelSpec::soft(1, 0.5)), SingularAtZero);
}

TEST(Sigma0, Values) {
    const auto k = KernelSpec::hard(0, 0.5);
    EXPECT_NEAR(sigma0(std::numbers::pi / 2, k), 0.50794908747392776, 1e-15);
    EXPECT_THROW(sigma0(0.0, k), DomainError);
    EXPECT_THROW(sigma0(2.0, k), DomainError);
    EXPECT_EQ(sigma0(0.05, KernelSpec::hard(0, 0.5, 0.1)), 0.0);
    auto c = k;
    c.angularModel = AngularModel::Constant;
    EXPECT_EQ(sigma0(0.3, c), 1.0);
}

TEST(Sigma, SupportIsSymmetrizedHalf) {
    const auto k = KernelSpec::hard(0, 0.5);
    EXPECT_EQ(sigma(1.0, 2.0, k), 0.0);
    EXPECT_GT(sigma(1.0, 1.0, k), 0.0);
}

TEST(Sigma0, SingularRateNearZero) {
    // sigma0 sin(theta) ~ theta^{-1-gamma}
    const auto k = KernelSpec::hard(0, 0.3);
    const double a = sigma0(1e-4, k) * std::sin(1e-4), b = sigma0(2e-4, k) * std::sin(2e-4);
    EXPECT_NEAR(std::log2(a / b), 1.3, 1e-12);
}

TEST(Smoothstep, Limits) {
    EXPECT_EQ(smoothstep(-1), 0.0);
    EXPECT_EQ(smoothstep(0), 0.0);
    EXPECT_EQ(smoothstep(1), 1.0);
    EXPECT_DOUBLE_EQ(smoothstep(0.5), 0.5);
    EXPECT_NEAR(smoothstep(0.3) + smoothstep(0.7), 1.0, 1e-15);
}

TEST(Dyadic, PartitionOfUnity) {
    for (double x : {1e-3, 0.01, 0.3, 0.5, 0.7071, 1.0, 1.19, 3.0, 17.0, 900.0}) {
        double s = 0;
        for (int k = -20; k <= 20; ++k) s += dyadic_chi(k, x);
        EXPECT_NEAR(s, 1.0, 1e-14) << x;
    }
}

TEST(Dyadic, SupportAndScaling) {
    for (int k : {-3, 0, 2}) {
        EXPECT_EQ(dyadic_chi(k, dyadic_lo(k) * 0.999), 0.0);
        EXPECT_EQ(dyadic_chi(k, dyadic_hi(k) * 1.001), 0.0);
        EXPECT_GT(dyadic_chi(k, std::sqrt(dyadic_lo(k) * dyadic_hi(k))), 0.99);
        EXPECT_NEAR(dyadic_chi(k, 0.37), dyadic_chi(0, 0.37 * std::exp2(k)), 1e-15);
    }
    EXPECT_EQ(dyadic_chi(0, 0.0), 0.0);
    EXPECT_NEAR(dyadic_hi(0) / dyadic_lo(0), std::exp2(1.5), 1e-14);
}

TEST(SphereMass, ClosedForm) {
    EXPECT_NEAR(sphere_mass(KernelSpec::hard(0, 0.5, 0.1)), 29.711839964660400, 1e-12);
    EXPECT_TRUE(std::isinf(sphere_mass(KernelSpec::hard(0, 0.5))));
    // against a direct quadrature of sin * sigma0 on [eps, pi/2]
    const auto k = KernelSpec::hard(0, 0.4, 0.2);
    const int n = 200000;
    const double a = 0.2, b = std::numbers::pi / 2, h = (b - a) / n;
    double s = 0;
    for (int i = 0; i < n; ++i) {
        const double t = a + (i + 0.5) * h;
        s += std::sin(t) * sigma0(t, k);
    }
    EXPECT_NEAR(sphere_mass(k), 2 * std::numbers::pi * s * h, 1e-6);
}
