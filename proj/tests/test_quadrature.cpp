#include <relkin/quadrature.hpp>
#include <relkin/volume.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace relkin;

TEST(GaussLegendre, ExactForPolynomials) {
    const Rule& r = gauss_legendre(10);
    for (int k = 0; k < 20; ++k) {
        double s = 0;
        for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * std::pow(r.x[i], k);
        EXPECT_NEAR(s, k % 2 ? 0.0 : 2.0 / (k + 1), 1e-14) << k;
    }
}

TEST(GaussLegendre, NodesSymmetricAndSorted) {
    const Rule& r = gauss_legendre(33);
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(r.x[i], -r.x[r.size() - 1 - i], 1e-15);
    EXPECT_EQ(r.x[16], 0.0);
}

TEST(GaussJacobi, MomentsOfPowerWeight) {
    // int_0^1 x^alpha x^k dx = 1/(alpha + k + 1)
    for (double alpha : {-0.5, 0.3, 2.0}) {
        const Rule& r = gauss_jacobi01(8, alpha);
        for (int k = 0; k < 16; ++k) {
            double s = 0;
            for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * std::pow(r.x[i], k);
            EXPECT_NEAR(s, 1.0 / (alpha + k + 1), 1e-13) << alpha << " " << k;
        }
    }
}

TEST(Composite, SkipsEmptyPanels) {
    const Rule r = gl_composite(4, {0, 1, 1, 3});
    EXPECT_EQ(r.size(), 8u);
    double s = 0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * r.x[i] * r.x[i];
    EXPECT_NEAR(s, 9.0, 1e-13);
}

TEST(Periodic, Trigonometric) {
    Rule r = periodic(16);
    double s = 0, c2 = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        s += r.w[i] * std::sin(3 * r.x[i]);
        c2 += r.w[i] * std::cos(r.x[i]) * std::cos(r.x[i]);
    }
    EXPECT_NEAR(s, 0.0, 1e-14);
    EXPECT_NEAR(c2, std::numbers::pi, 1e-14);
}

TEST(Neumaier, Cancellation) {
    NeumaierSum s;
    s += 1.0;
    s += 1e100;
    s += 1.0;
    s += -1e100;
    EXPECT_EQ(s.value(), 2.0);
}

TEST(ParallelSum, IndependentOfThreadCount) {
    auto f = [](std::size_t i) { return std::sin(0.001 * double(i)) / (1.0 + double(i)); };
    const double a = parallel_sum(100000, f, 1), b = parallel_sum(100000, f, 4), c = parallel_sum(100000, f, 7);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
    auto g = [](std::size_t i, std::vector<double>& acc) {
        acc[0] = double(i);
        acc[1] = 1.0;
    };
    const auto v1 = parallel_sum_vec(1000, 2, g, 1), v3 = parallel_sum_vec(1000, 2, g, 3);
    EXPECT_EQ(v1, v3);
    EXPECT_EQ(v1[0], 499500.0);
    EXPECT_EQ(v1[1], 1000.0);
}

TEST(QuadratureSpec, DoubledAndScaled) {
    QuadratureSpec q;
    EXPECT_EQ(q.doubled().radialOrder, 48);
    EXPECT_EQ(q.scaled(0.01).sphereOrder, 2);
    EXPECT_EQ(q.scaled(1.5).planarOrder, 24);
}

TEST(Volume, GaussianMass) {
    // int exp(-|p - c|^2) = pi^{3/2}
    const double ref = std::pow(std::numbers::pi, 1.5);
    VolumeSpec v;
    v.R = 12;
    v.radialOrder = 24;
    v.sphereOrder = 24;
    EXPECT_NEAR(volume_integral(v, [](const Vec3& p) { return std::exp(-norm2(p - Vec3(0.3, -0.2, 0.5))); }), ref, 1e-9);
    v.sym = Symmetry::Axial;
    EXPECT_NEAR(volume_integral(v, [](const Vec3& p) { return std::exp(-norm2(p - Vec3(0, 0, 0.7))); }), ref, 1e-10);
    v.sym = Symmetry::Radial;
    EXPECT_NEAR(volume_integral(v, [](const Vec3& p) { return std::exp(-norm2(p)); }), ref, 1e-12);
}

TEST(Volume, Breakpoints) {
    const auto b = volume_breakpoints(5.0);
    EXPECT_EQ(b.front(), 0.0);
    EXPECT_EQ(b.back(), 5.0);
    EXPECT_EQ(b[b.size() - 2], 4.5);
}
