#include <relkin/linearized.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace relkin;

namespace {

QuadratureSpec small_quad(int r, int s, int pl) {
    QuadratureSpec q;
    q.radialOrder = r;
    q.sphereOrder = s;
    q.planarOrder = pl;
    return q;
}

} // namespace

TEST(ProjectP, BasisCases) {
    const auto a = project_P(TestFunction::sqrt_juttner());
    EXPECT_NEAR(a.A, 1.0, 1e-10);
    EXPECT_EQ(norm(a.B), 0.0);
    EXPECT_NEAR(a.C, 0.0, 1e-10);

    const auto b = project_P(TestFunction::juttner_poly(0, 0, 1, 0));
    EXPECT_NEAR(b.A, 0.0, 1e-10);
    EXPECT_NEAR(b.B[2], 1.0, 1e-10);
    EXPECT_EQ(b.B[0], 0.0);
    EXPECT_NEAR(b.C, 0.0, 1e-10);

    const auto c = project_P(TestFunction::juttner_poly(0, 0, 0, 1));
    EXPECT_NEAR(c.A, 0.0, 1e-10);
    EXPECT_NEAR(c.C, 1.0, 1e-10);

    const auto d = project_P(TestFunction::juttner_poly(1, 0, 0, 0));
    EXPECT_NEAR(d.B[0], 1.0, 1e-10);
    EXPECT_NEAR(d.B[1], 0.0, 1e-10);
}

TEST(ProjectP, KeepsSymmetry) {
    const auto g = TestFunction::gaussian(0.7);
    EXPECT_EQ(micro_part(g).symmetry(), Symmetry::Radial);
    const auto h = project_P(g);
    EXPECT_EQ(norm(h.B), 0.0);
}

TEST(ProjectP, Idempotent) {
    const auto f = TestFunction::gaussian(0.6, Vec3(0.3, -0.2, 0.4));
    const auto Pf = hydro_function(project_P(f));
    const auto PPf = project_P(Pf), Pf1 = project_P(f);
    EXPECT_NEAR(PPf.A, Pf1.A, 1e-10);
    EXPECT_NEAR(PPf.C, Pf1.C, 1e-10);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(PPf.B[i], Pf1.B[i], 1e-10);
    // (I - P) f is orthogonal to P f
    EXPECT_NEAR(l2_inner(micro_part(f), Pf), 0.0, 1e-10);
}

TEST(Identities, MicroscopicAndMoments) {
    for (const auto& f : {TestFunction::gaussian(0.5, Vec3(0.2, 0.1, -0.3)), TestFunction::juttner_poly(1, 1, 0, 2)}) {
        for (const auto& c : microscopic_identity_check(f)) EXPECT_LT(std::abs(c.residual), 1e-9) << c.name;
    }
}

TEST(ConservationConstants, FrozenValuesAndSigns) {
    const auto c = conservation_constants();
    EXPECT_NEAR(c.mu1, 0.19498169732870906, 1e-12);
    EXPECT_NEAR(c.mu3, -0.81634708030302068, 1e-12);
    EXPECT_GT(c.mu1, 0.0);
    EXPECT_LT(c.mu3, 0.0);
    EXPECT_TRUE(std::isfinite(c.mu2) && std::isfinite(c.mu4));
}

TEST(Dirichlet, NullSpaceAndPositivity) {
    const auto k = KernelSpec::hard(0, 0.5, 0.2);
    const auto q = small_quad(8, 8, 8);
    const auto z = dirichlet_form(TestFunction::sqrt_juttner(), k, q, 8.0, 12.0);
    EXPECT_LT(std::abs(z.value), 1e-10 * z.scale);
    EXPECT_LT(std::abs(z.symmetric), 1e-10 * z.scale);
    const auto g = dirichlet_form(TestFunction::gaussian(1.0), k, q, 8.0, 12.0);
    const auto h = dirichlet_form(TestFunction::gaussian(1.0), k, small_quad(12, 12, 12), 8.0, 12.0);
    EXPECT_GT(g.value, 0.0);
    EXPECT_NEAR(g.value / h.value, 1.0, 5e-4);
    // the squared form converges from below and more slowly
    EXPECT_LT(std::abs(h.value - h.symmetric), std::abs(g.value - g.symmetric));
    EXPECT_LT(h.symmetric, h.value);
}

TEST(NForm, WeightsAndZeta) {
    const auto k = KernelSpec::hard(0, 0.5, 0.2);
    const auto q = small_quad(8, 8, 8);
    const auto f = TestFunction::gaussian(1.0);
    const auto a = n_form(f, 0, k, q, 6.0, 10.0), b = n_form(f, 1, k, q, 6.0, 10.0);
    EXPECT_GT(a.seminorm, 0.0);
    EXPECT_GT(b.seminorm, a.seminorm);
    EXPECT_TRUE(std::isfinite(a.zetaPart));
    EXPECT_THROW(n_form(f, 2, k, q, 6.0, 10.0), DomainError);
    // constants have zero seminorm
    const auto c = n_form(TestFunction::gaussian(1e-12), 0, k, q, 4.0, 8.0);
    EXPECT_LT(c.seminorm, 1e-12 * std::abs(c.zetaPart));
}
