#include <relkin/norms.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace relkin;

TEST(WeightedL2, Gaussian) {
    const auto g = TestFunction::gaussian(1.0);
    EXPECT_NEAR(weighted_l2(g, 0, 0.0), 1.9687012432153025, 1e-11);
    // w^2 = p0^2 = 1 + |p|^2 and <|p|^2> = 3/4 under exp(-2|p|^2)
    EXPECT_NEAR(weighted_l2(g, 1, 0.0), 1.75 * 1.9687012432153025, 1e-11);
    // l = 1 with no exponent equals l = 0 with exponent 2
    EXPECT_NEAR(weighted_l2(g, 1, 0.0), weighted_l2(g, 0, 2.0), 1e-12);
}

TEST(Fractional, QuadratureAgainstMonteCarlo) {
    const auto f = TestFunction::gaussian(0.8);
    VolumeSpec v;
    v.R = 12;
    const auto fp = fractional_parts(f, 0.25, 0.5, 0, v);
    const double mc = fractional_double_mc(f, 0.25, 0.5, 0, 400000, 11, 1.0);
    EXPECT_GT(fp.double_, 0.0);
    EXPECT_NEAR(mc / fp.double_, 1.0, 0.02);
}

TEST(Fractional, ConvergesInOrder) {
    const auto f = TestFunction::gaussian(1.0, Vec3(0, 0, 0.5));
    VolumeSpec v;
    v.R = 10;
    const double a = fractional_parts(f, 0.25, 0.5, 1, v, 12, 10).double_;
    const double b = fractional_parts(f, 0.25, 0.5, 1, v, 20, 14).double_;
    EXPECT_NEAR(a / b, 1.0, 1e-5);
    EXPECT_NEAR(fractional_norm(f, 0.0, 0.5, 1, v), fractional_parts(f, 0.25, 0.5, 1, v).norm(), 1e-14);
}

TEST(LPBump, MassAndShape) {
    const auto& B = LPBump::instance();
    EXPECT_NEAR(B.mass(), 1.0, 1e-10);
    EXPECT_EQ(B.phi(0.3), 1.0);
    EXPECT_EQ(B.phi(1.0), 0.0);
    EXPECT_EQ(B.psi(0.2), 1.0 - 0.125);
    EXPECT_EQ(B.psi(2.5), 0.0);
}

TEST(LP, TelescopingAndLattice) {
    const auto f = TestFunction::gaussian(1.0);
    RadialGrid gr;
    gr.h = 1.0 / 32;
    gr.R = 6.0;
    const auto d = lp_decompose(f, 3, gr);
    const auto s = lp_partial_direct(f, 3, gr);
    double worst = 0;
    for (std::size_t i = 0; i < s.size(); ++i) worst = std::max(worst, std::abs(s[i] - d.partial[i]));
    EXPECT_LT(worst, 2e-7);
    std::vector<double> fv(gr.size());
    for (std::size_t i = 0; i < fv.size(); ++i) fv[i] = std::exp(-gr.r(i) * gr.r(i));
    EXPECT_NEAR(lattice_integral(gr, fv), std::pow(std::numbers::pi, 1.5), 1e-7);
    // S_J f -> f: the mollifier preserves mass
    EXPECT_NEAR(lattice_integral(gr, d.partial), lattice_integral(gr, fv), 1e-6);
}

TEST(LP, Errors) {
    RadialGrid gr;
    gr.h = 0.25;
    EXPECT_THROW(lp_decompose(TestFunction::gaussian(1.0), 3, gr), GridTooCoarse);
    gr.h = 1.0 / 64;
    EXPECT_THROW(lp_decompose(TestFunction::gaussian(1.0, Vec3(1, 0, 0)), 2, gr), DomainError);
}

TEST(LP, RatioFinite) {
    RadialGrid gr;
    gr.R = 10;
    const auto r = lp_inequality_ratio(TestFunction::gaussian(1.0), 0.0, 0.5, 2, 0, gr);
    EXPECT_GT(r.ratio(), 0.0);
    EXPECT_GT(r.ratioGrad(), 0.0);
    EXPECT_TRUE(std::isfinite(r.ratio()) && std::isfinite(r.ratioGrad()));
}
