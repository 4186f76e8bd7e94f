#include <relkin/test_functions.hpp>
#include <relkin/volume.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace relkin;

TEST(TestFunction, PointValues) {
    const auto g = TestFunction::gaussian(0.5, Vec3(1, 0, 0), 2.0);
    EXPECT_DOUBLE_EQ(g(Vec3(1, 0, 0)), 2.0);
    EXPECT_NEAR(g(Vec3(0, 0, 0)), 2.0 * std::exp(-0.5), 1e-15);
    const auto s = TestFunction::sqrt_juttner();
    EXPECT_NEAR(s(Vec3(0, 0, 0)) * s(Vec3(0, 0, 0)), juttner_p0(1.0), 1e-17);
    const auto j = TestFunction::juttner_poly(1, 0, 2, 1);
    const Vec3 p(0.5, -1, 2);
    const double p0 = std::sqrt(1 + norm2(p));
    EXPECT_NEAR(j(p), sqrt_juttner_p0(p0) * 0.5 * 4 * p0, 1e-15);
}

TEST(TestFunction, Arithmetic) {
    const auto a = TestFunction::gaussian(1.0), b = TestFunction::sqrt_juttner();
    const Vec3 p(0.1, 0.2, 0.3);
    EXPECT_NEAR((a - 3.0 * b)(p), a(p) - 3.0 * b(p), 1e-15);
    EXPECT_EQ((a + b).terms().size(), 2u);
}

TEST(TestFunction, GradientMatchesFiniteDifference) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-2, 2);
    for (const auto& f : default_family()) {
        for (int t = 0; t < 10; ++t) {
            const Vec3 p(u(rng), u(rng), u(rng));
            const Vec3 g = f.gradient(p);
            for (int i = 0; i < 3; ++i) {
                Vec3 h;
                h[i] = 1e-5;
                const double fd = (f(p + h) - f(p - h)) / 2e-5;
                EXPECT_NEAR(g[i], fd, 1e-7 * std::max(1.0, std::abs(fd))) << f.name();
            }
        }
    }
    const auto m = TestFunction::juttner_poly(2, 1, 1, 2) + TestFunction::gaussian(0.3, Vec3(1, -1, 0.5));
    const Vec3 p(0.7, -0.4, 1.1), h(0, 1e-5, 0);
    EXPECT_NEAR(m.gradient(p)[1], (m(p + h) - m(p - h)) / 2e-5, 1e-8);
}

TEST(TestFunction, Symmetry) {
    EXPECT_EQ(TestFunction::gaussian(1).symmetry(), Symmetry::Radial);
    EXPECT_EQ(TestFunction::gaussian(1, Vec3(0, 0, 1)).symmetry(), Symmetry::Axial);
    EXPECT_EQ(TestFunction::juttner_poly(0, 0, 1, 0).symmetry(), Symmetry::Axial);
    EXPECT_EQ(TestFunction::gaussian(1, Vec3(1, 0, 0)).symmetry(), Symmetry::General);
    EXPECT_EQ(TestFunction::juttner_poly(1, 0, 0, 0).symmetry(), Symmetry::General);
    const auto a = TestFunction::gaussian(1), b = TestFunction::gaussian(1, Vec3(0, 0, 2));
    EXPECT_EQ(common_symmetry({&a, &b}), Symmetry::Axial);
}

TEST(TestFunction, Weight) {
    EXPECT_EQ(weight_w2l(3.0, 0), 1.0);
    EXPECT_EQ(weight_w2l(3.0, 2), 81.0);
}

TEST(DefaultFamily, RadialAndIntegrals) {
    const auto fam = default_family();
    ASSERT_EQ(fam.size(), 10u);
    for (const auto& f : fam) EXPECT_EQ(f.symmetry(), Symmetry::Radial) << f.name();
    VolumeSpec v;
    v.sym = Symmetry::Radial;
    v.radialOrder = 32;
    // int (sqrt J p0^2)^2 = int J p0^4
    EXPECT_NEAR(volume_integral(v, [&](const Vec3& p) { return fam[7](p) * fam[7](p); }), 435.56235276461612, 1e-9);
    // int exp(-|p|^2 / 2) |p|^2
    EXPECT_NEAR(volume_integral(v, [&](const Vec3& p) { return fam[4](p); }), 47.248829837167259, 1e-11);
}
