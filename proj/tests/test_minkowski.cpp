#include <relkin/minkowski.hpp>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace relkin;

namespace {

// Boost along a unit direction n with rapidity eta, composed with a rotation
// about z; a generic proper orthochronous element.
LorentzMatrix random_lorentz(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    Vec3 n(u(rng), u(rng), u(rng));
    n = n / norm(n);
    const double eta = 2.0 * std::abs(u(rng));
    const double ch = std::cosh(eta), sh = std::sinh(eta);
    LorentzMatrix B = LorentzMatrix::identity();
    B(0, 0) = ch;
    for (int i = 0; i < 3; ++i) {
        B(0, i + 1) = B(i + 1, 0) = sh * n[i];
        for (int j = 0; j < 3; ++j) B(i + 1, j + 1) = (i == j ? 1.0 : 0.0) + (ch - 1.0) * n[i] * n[j];
    }
    const double a = 3.0 * u(rng);
    LorentzMatrix R = LorentzMatrix::identity();
    R(1, 1) = std::cos(a);
    R(1, 2) = -std::sin(a);
    R(2, 1) = std::sin(a);
    R(2, 2) = std::cos(a);
    return R * B;
}

} // namespace

TEST(MassShell, RestMomentum) { EXPECT_EQ(mass_shell_lift(0, 0, 0).p0, 1.0); }

TEST(MassShell, KnownValues) {
    EXPECT_NEAR(mass_shell_lift(1, 0, 0).p0, 1.4142135623730951, 1e-15);
    EXPECT_NEAR(mass_shell_lift(0, 3, 4).p0, 5.0990195135927845, 1e-14);
}

TEST(MassShell, RejectsNonFinite) {
    EXPECT_THROW(mass_shell_lift(std::numeric_limits<double>::quiet_NaN(), 0, 0), NonFiniteInput);
    EXPECT_THROW(mass_shell_lift(0, std::numeric_limits<double>::infinity(), 0), NonFiniteInput);
}

TEST(LorentzInner, Values) {
    const auto z = mass_shell_lift(0, 0, 0);
    EXPECT_DOUBLE_EQ(lorentz_inner(z, z), -1.0);
    EXPECT_NEAR(lorentz_inner(mass_shell_lift(1, 0, 0), z), -std::sqrt(2.0), 1e-15);
    // on shell a.a = -1
    const auto a = mass_shell_lift(3, -2, 7);
    EXPECT_NEAR(lorentz_inner(a, a), -1.0, 1e-13);
}

TEST(LorentzInner, InvariantUnderRandomTransforms) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int t = 0; t < 200; ++t) {
        const LorentzMatrix L = random_lorentz(rng);
        const auto a = mass_shell_lift(u(rng), u(rng), u(rng)).as4();
        const auto b = mass_shell_lift(u(rng), u(rng), u(rng)).as4();
        const double ref = lorentz_inner(a, b);
        EXPECT_NEAR(lorentz_inner(apply(L, a), apply(L, b)), ref, 1e-12 * std::abs(ref) * 50);
    }
}

TEST(ComTransform, RejectsColinear) {
    EXPECT_THROW(com_transform(mass_shell_lift(1, 0, 0), mass_shell_lift(-1, 0, 0)), ColinearPair);
    EXPECT_THROW(com_transform(mass_shell_lift(1, 2, 3), mass_shell_lift(1, 2, 3)), DegeneratePair);
}

TEST(ComTransform, CenterOfMomentumConditions) {
    const auto p = mass_shell_lift(1, 0, 0), q = mass_shell_lift(0, 1, 0);
    const LorentzMatrix L = com_transform(p, q);
    const double g = relative_g_raw(p, q), rs = std::sqrt(g * g + 4);
    const Vec4 P{p.p0 + q.p0, 1, 1, 0}, D{p.p0 - q.p0, 1, -1, 0};
    const Vec4 a = apply(L, P), b = apply(L, D);
    EXPECT_NEAR(a[0], rs, 1e-12);
    EXPECT_NEAR(a[1], 0, 1e-12);
    EXPECT_NEAR(a[2], 0, 1e-12);
    EXPECT_NEAR(a[3], 0, 1e-12);
    EXPECT_NEAR(-b[0], 0, 1e-12);
    EXPECT_NEAR(-b[1], 0, 1e-12);
    EXPECT_NEAR(-b[2], 0, 1e-12);
    EXPECT_NEAR(-b[3], g, 1e-12);
}

TEST(ComTransform, ThirdRowIsNormalizedCross) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int t = 0; t < 100; ++t) {
        const auto p = mass_shell_lift(u(rng), u(rng), u(rng)), q = mass_shell_lift(u(rng), u(rng), u(rng));
        const LorentzMatrix L = com_transform(p, q);
        const Vec3 c = cross(p.p, q.p) / norm(cross(p.p, q.p));
        EXPECT_EQ(L(2, 0), 0.0);
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(L(2, i + 1), c[i], 1e-14);
        EXPECT_TRUE(validate(L).ok(1e-11));
    }
}

TEST(InvertLorentz, Identity) {
    const LorentzMatrix I = invert_lorentz(LorentzMatrix::identity());
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) EXPECT_EQ(I(a, b), a == b ? 1.0 : 0.0);
}

TEST(InvertLorentz, RoundTripToSumMomentum) {
    const auto p = mass_shell_lift(2, -1, 0.5), q = mass_shell_lift(-0.3, 4, 1);
    const LorentzMatrix Li = invert_lorentz(com_transform(p, q));
    const double g = relative_g_raw(p, q), rs = std::sqrt(g * g + 4);
    const Vec4 r = apply(Li, {rs, 0, 0, 0});
    EXPECT_NEAR(r[0], p.p0 + q.p0, 1e-10);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(r[i + 1], p.p[i] + q.p[i], 1e-10);
}

TEST(InvertLorentz, AgreesWithLinearSolve) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const LorentzMatrix L = random_lorentz(rng);
        const LorentzMatrix Li = invert_lorentz(L);
        Eigen::Matrix4d M;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) M(a, b) = L(a, b);
        const Eigen::Matrix4d X = M.partialPivLu().solve(Eigen::Matrix4d::Identity());
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) EXPECT_NEAR(Li(a, b), X(a, b), 1e-10);
    }
}

TEST(Validate, BoostOfRestMomentum) {
    std::mt19937_64 rng(9);
    const LorentzMatrix L = random_lorentz(rng);
    EXPECT_TRUE(validate(L).ok(1e-12));
    const Vec4 r = apply(L, {1, 0, 0, 0});
    EXPECT_GE(r[0], 1.0);
}
