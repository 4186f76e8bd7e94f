#pragma once

#include <relkin/errors.hpp>
#include <relkin/geometry.hpp>
#include <relkin/kernels.hpp>
#include <relkin/quadrature.hpp>
#include <relkin/test_functions.hpp>
#include <relkin/volume.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace relkin {

// int (p0)^exponent w^{2l} |f|^2 dp.
inline double weighted_l2(const TestFunction& f, int l, double exponent, const VolumeSpec& v = {}) {
    VolumeSpec vs = v;
    vs.sym = f.symmetry();
    return volume_integral(vs, [&](const Vec3& p) {
        const double p0 = std::sqrt(1.0 + norm2(p));
        const double x = f(p, p0);
        return std::pow(p0, exponent) * weight_w2l(p0, l) * x * x;
    });
}

struct FractionalParts {
    double l2 = 0;      // |w^l f|^2 in L^2 with weight (p0)^{mu}
    double double_ = 0; // the |p - p'| <= 1 difference integral
    double squared() const { return l2 + double_; }
    double norm() const { return std::sqrt(squared()); }
};

// |f|^2 = int (p0)^mu w^{2l} f^2 + int int_{|u|<=1} w^{2l}(p) (f(p+u)-f(p))^2 (p0 p'0)^{mu/2} / |u|^{3+gamma}.
// The fractional norm of the paper is mu = (rho + gamma)/2. In |u| the
// integrand behaves like |u|^{1-gamma} times a bounded factor, which a
// Gauss-Jacobi rule integrates at spectral rate.
inline FractionalParts fractional_parts(const TestFunction& f, double mu, double gamma, int l, const VolumeSpec& v,
                                        int nU = 16, int nDir = 12) {
    FractionalParts out;
    VolumeSpec vs = v;
    vs.sym = f.symmetry();
    out.l2 = volume_integral(vs, [&](const Vec3& p) {
        const double p0 = std::sqrt(1.0 + norm2(p));
        const double x = f(p, p0);
        return std::pow(p0, mu) * weight_w2l(p0, l) * x * x;
    });
    const Rule& gj = gauss_jacobi01(nU, 1.0 - gamma);
    const Rule& c = gauss_legendre(nDir);
    Rule ph = periodic(2 * nDir);
    out.double_ = volume_integral(vs, [&](const Vec3& p) {
        const double p0 = std::sqrt(1.0 + norm2(p));
        const double fp = f(p, p0);
        NeumaierSum s;
        for (std::size_t i = 0; i < gj.size(); ++i) {
            const double u = gj.x[i];
            for (std::size_t j = 0; j < c.size(); ++j) {
                const double ct = c.x[j], st = std::sqrt(1.0 - ct * ct);
                for (std::size_t k = 0; k < ph.size(); ++k) {
                    const Vec3 d(st * std::cos(ph.x[k]), st * std::sin(ph.x[k]), ct);
                    const Vec3 pp = p + u * d;
                    const double pp0 = std::sqrt(1.0 + norm2(pp));
                    const double df = f(pp, pp0) - fp;
                    // u^2 du / u^{3+gamma} = u^{1-gamma} du / u^2
                    s.add(gj.w[i] * c.w[j] * ph.w[k] * df * df / (u * u) * std::pow(p0 * pp0, 0.5 * mu));
                }
            }
        }
        return weight_w2l(p0, l) * s.value();
    });
    return out;
}

inline double fractional_norm(const TestFunction& f, double rho, double gamma, int l, const VolumeSpec& v = {},
                              int nU = 16, int nDir = 12) {
    return fractional_parts(f, 0.5 * (rho + gamma), gamma, l, v, nU, nDir).norm();
}

// Monte Carlo oracle for the difference part: p from a Gaussian proposal,
// u uniform in direction with |u| drawn from density (2-gamma) |u|^{1-gamma} on [0,1].
inline double fractional_double_mc(const TestFunction& f, double mu, double gamma, int l, std::int64_t n,
                                   std::uint64_t seed, double proposalSigma = 1.5) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, proposalSigma);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    const double a = 2.0 - gamma;
    const double norm3 = std::pow(2.0 * std::numbers::pi * proposalSigma * proposalSigma, 1.5);
    NeumaierSum s;
    for (std::int64_t i = 0; i < n; ++i) {
        const Vec3 p(nd(rng), nd(rng), nd(rng));
        const double qp = std::exp(-norm2(p) / (2.0 * proposalSigma * proposalSigma)) / norm3;
        const double u = std::pow(ud(rng), 1.0 / a);
        const double ct = 2.0 * ud(rng) - 1.0, st = std::sqrt(1.0 - ct * ct), ph = 2.0 * std::numbers::pi * ud(rng);
        const Vec3 pp = p + u * Vec3(st * std::cos(ph), st * std::sin(ph), ct);
        const double p0 = std::sqrt(1.0 + norm2(p)), pp0 = std::sqrt(1.0 + norm2(pp));
        const double df = f(pp, pp0) - f(p, p0);
        // density of u: a u^{1-gamma} / (4 pi) per unit solid angle
        const double qu = a * std::pow(u, 1.0 - gamma) / (4.0 * std::numbers::pi);
        const double val = weight_w2l(p0, l) * df * df * std::pow(p0 * pp0, 0.5 * mu) * std::pow(u, -1.0 - gamma);
        s.add(val / (qp * qu));
    }
    return s.value() / double(n);
}

// ---------------------------------------------------------------------------
// Littlewood-Paley pieces for radial functions on a uniform radial lattice.

// Mother bump: phi = 1 on |p| <= 1/2, 0 on |p| >= 1, with the transition
// 1 - S(t^a), t = 2|p| - 1, and a fixed by bisection so that int phi = 1.
class LPBump {
public:
    static const LPBump& instance() {
        static const LPBump b;
        return b;
    }
    double exponent() const { return a_; }
    double phi(double r) const { return profile(r, a_); }
    double psi(double r) const { return phi(r) - 0.125 * phi(0.5 * r); }
    // M(x) = int_0^x t psi(t) dt, cubic Hermite on a fine table.
    double M(double x) const {
        if (x <= 0) return 0.0;
        if (x >= 2.0) return Mtab_.back();
        const double h = 2.0 / (Mtab_.size() - 1);
        const std::size_t i = std::min<std::size_t>(std::size_t(x / h), Mtab_.size() - 2);
        const double t = (x - i * h) / h;
        const double y0 = Mtab_[i], y1 = Mtab_[i + 1];
        const double d0 = h * (i * h) * psi(i * h), d1 = h * ((i + 1) * h) * psi((i + 1) * h);
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * d1;
    }
    double mass() const {
        return 4.0 * std::numbers::pi * gl_int([&](double r) { return r * r * phi(r); }, 0.0, 1.0);
    }

private:
    static double profile(double r, double a) {
        if (r <= 0.5) return 1.0;
        if (r >= 1.0) return 0.0;
        return 1.0 - smoothstep(std::pow(2.0 * r - 1.0, a));
    }
    template <class F>
    static double gl_int(F&& f, double lo, double hi, int panels = 64) {
        const Rule& g = gauss_legendre(20);
        NeumaierSum s;
        const double h = (hi - lo) / panels;
        for (int k = 0; k < panels; ++k)
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double x = lo + h * (k + 0.5 * (g.x[i] + 1.0));
                s.add(0.5 * h * g.w[i] * f(x));
            }
        return s.value();
    }
    LPBump() {
        auto mass_at = [&](double a) {
            return 4.0 * std::numbers::pi * gl_int([&](double r) { return r * r * profile(r, a); }, 0.0, 1.0);
        };
        double lo = 0.01, hi = 100.0;  // mass increases with a
        for (int it = 0; it < 200; ++it) {
            const double mid = std::sqrt(lo * hi);
            (mass_at(mid) < 1.0 ? lo : hi) = mid;
        }
        a_ = std::sqrt(lo * hi);
        const int n = 8192;
        Mtab_.assign(n + 1, 0.0);
        const double h = 2.0 / n;
        for (int i = 1; i <= n; ++i)
            Mtab_[i] = Mtab_[i - 1] + gl_int([&](double t) { return t * psi(t); }, (i - 1) * h, i * h, 1);
    }
    double a_ = 1.0;
    std::vector<double> Mtab_;
};

struct RadialGrid {
    double h = 1.0 / 64;
    double R = 8.0;
    std::size_t size() const { return std::size_t(std::llround(R / h)) + 1; }
    double r(std::size_t i) const { return h * double(i); }
};

struct LPDecomposition {
    RadialGrid grid;
    std::vector<std::vector<double>> pieces;  // pieces[j][i] = Delta_j f at r_i
    std::vector<double> partial;              // S_{J} f at r_i
};

namespace detail {
// (f * K_j)(r) for radial f and radial K_j(x) = 2^{3j} K(2^j x) supported in
// |x| <= 2^{-j}: (2 pi / r) int s f(s) [M_j(r + s) - M_j(|r - s|)] ds with
// M_j(x) = 2^{j} M(2^j x) where M(y) = int_0^y t K(t) dt.
template <class F, class MF, class KF>
double radial_convolve(F&& f, double r, int j, MF&& M, KF&& K, int order = 16) {
    const double a = std::exp2(-j), sc = std::exp2(j);
    const Rule& g = gauss_legendre(order);
    NeumaierSum s;
    if (r < 1e-12) {
        // 4 pi int s^2 f(s) K_j(s) ds
        const double edges[] = {0.0, 0.25, 0.375, 0.5, 0.75, 1.0};
        for (int pnl = 0; pnl < 5; ++pnl) {
            const double lo = a * edges[pnl], hi = a * edges[pnl + 1];
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * g.x[i];
                s.add(0.5 * (hi - lo) * g.w[i] * 4.0 * std::numbers::pi * x * x * f(x) * sc * sc * sc * K(sc * x));
            }
        }
        return s.value();
    }
    // M jumps in slope wherever r +- s crosses a transition shell of the
    // bump (radii a/4, a/2 and a), so every such s is a panel edge.
    std::vector<double> brk{std::max(0.0, r - a), r, r + a};
    for (double c : {0.25, 0.375, 0.5, 0.75, 1.0}) {
        brk.push_back(r + c * a);
        brk.push_back(std::abs(r - c * a));
    }
    std::sort(brk.begin(), brk.end());
    brk.erase(std::unique(brk.begin(), brk.end()), brk.end());
    brk.erase(std::remove_if(brk.begin(), brk.end(), [&](double x) { return x < std::max(0.0, r - a); }), brk.end());
    for (std::size_t b = 0; b + 1 < brk.size(); ++b) {
        const double lo = brk[b], hi = brk[b + 1];
        if (!(hi > lo)) continue;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * g.x[i];
            const double d = sc * (M(sc * (r + x)) - M(sc * std::abs(r - x)));
            s.add(0.5 * (hi - lo) * g.w[i] * x * f(x) * d);
        }
    }
    return 2.0 * std::numbers::pi / r * s.value();
}
} // namespace detail

// Delta_0 = S_0 = f * phi_0, Delta_j = S_j - S_{j-1} = f * psi_j.
inline LPDecomposition lp_decompose(const TestFunction& f, int Jmax, const RadialGrid& grid) {
    if (f.symmetry() != Symmetry::Radial) throw DomainError("the radial lattice decomposition needs a radial function");
    if (grid.h > std::exp2(-Jmax - 2)) throw GridTooCoarse("lattice spacing exceeds 2^{-Jmax-2}");
    const LPBump& B = LPBump::instance();
    auto fr = [&](double s) { return f(Vec3(0, 0, s)); };
    // M for phi: int_0^x t phi(t) dt
    auto Mphi = [&](double y) {
        if (y <= 0.5) return 0.5 * y * y;
        // 0.125 + int_{1/2}^{min(y,1)} t phi(t) dt; psi relation keeps this cheap
        const double top = std::min(y, 1.0);
        const Rule& g = gauss_legendre(24);
        NeumaierSum s;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double t = 0.5 * (0.5 + top) + 0.5 * (top - 0.5) * g.x[i];
            s.add(0.5 * (top - 0.5) * g.w[i] * t * B.phi(t));
        }
        return 0.125 + s.value();
    };
    LPDecomposition d;
    d.grid = grid;
    const std::size_t n = grid.size();
    d.pieces.assign(Jmax + 1, std::vector<double>(n, 0.0));
    d.partial.assign(n, 0.0);
    for (int j = 0; j <= Jmax; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const double r = grid.r(i);
            if (j == 0)
                d.pieces[0][i] = detail::radial_convolve(fr, r, 0, Mphi, [&](double x) { return B.phi(x); });
            else
                d.pieces[j][i] = detail::radial_convolve(
                    fr, r, j - 1, [&](double y) { return 2.0 * B.M(2.0 * y); },
                    [&](double x) { return 8.0 * B.psi(2.0 * x); });
            d.partial[i] += d.pieces[j][i];
        }
    }
    return d;
}

// S_J f evaluated directly with phi_J, for the telescoping check.
inline std::vector<double> lp_partial_direct(const TestFunction& f, int J, const RadialGrid& grid) {
    const LPBump& B = LPBump::instance();
    auto fr = [&](double s) { return f(Vec3(0, 0, s)); };
    auto Mphi = [&](double y) {
        if (y <= 0.5) return 0.5 * y * y;
        const double top = std::min(y, 1.0);
        const Rule& g = gauss_legendre(24);
        NeumaierSum s;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double t = 0.5 * (0.5 + top) + 0.5 * (top - 0.5) * g.x[i];
            s.add(0.5 * (top - 0.5) * g.w[i] * t * B.phi(t));
        }
        return 0.125 + s.value();
    };
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = detail::radial_convolve(fr, grid.r(i), J, Mphi, [&](double x) { return B.phi(x); });
    return out;
}

// int over R^3 of a radial lattice function: 4 pi int r^2 g(r) dr by composite Simpson.
inline double lattice_integral(const RadialGrid& grid, const std::vector<double>& g) {
    const std::size_t n = g.size();
    NeumaierSum s;
    const std::size_t m = (n - 1) % 2 == 0 ? n : n - 1;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = grid.r(i);
        double w = (i == 0 || i == m - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s.add(w * r * r * g[i]);
    }
    return 4.0 * std::numbers::pi * grid.h / 3.0 * s.value();
}

struct LPRatio {
    double lhs = 0, rhs = 0;
    double lhsGrad = 0, rhsGrad = 0;
    double ratio() const { return lhs / rhs; }
    double ratioGrad() const { return lhsGrad / rhsGrad; }
};

// sum_j 2^{gamma j} int |Delta_j f|^2 (p0)^rho against the fractional
// expression with the same weight, and the first-derivative variant
// sum_j 2^{(gamma-1) j} int |grad Delta_j f|^2 (p0)^{(rho+gamma)/2} w^{2l}
// against the weighted fractional norm.
inline LPRatio lp_inequality_ratio(const TestFunction& f, double rho, double gamma, int Jmax, int l = 0,
                                   const RadialGrid& grid = {}, const VolumeSpec& v = {}) {
    RadialGrid gr = grid;
    if (gr.h > std::exp2(-Jmax - 2)) gr.h = std::exp2(-Jmax - 2);
    LPDecomposition d = lp_decompose(f, Jmax, gr);
    LPRatio r;
    const std::size_t n = gr.size();
    std::vector<double> w0(n), w1(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p0 = std::sqrt(1.0 + gr.r(i) * gr.r(i));
        w0[i] = std::pow(p0, rho);
        w1[i] = std::pow(p0, 0.5 * (rho + gamma)) * weight_w2l(p0, l);
    }
    std::vector<double> tmp(n);
    for (int j = 0; j <= Jmax; ++j) {
        const auto& D = d.pieces[j];
        for (std::size_t i = 0; i < n; ++i) tmp[i] = D[i] * D[i] * w0[i];
        r.lhs += std::exp2(gamma * j) * lattice_integral(gr, tmp);
        // radial derivative, fourth-order central differences (even extension at 0)
        auto at = [&](long k) { return D[std::size_t(std::abs(k))]; };
        for (std::size_t i = 0; i < n; ++i) {
            const long k = long(i);
            double dv;
            if (k + 2 < long(n))
                dv = (at(k - 2) - 8 * at(k - 1) + 8 * at(k + 1) - at(k + 2)) / (12 * gr.h);
            else
                dv = (D[i] - D[i - 1]) / gr.h;
            tmp[i] = dv * dv * w1[i];
        }
        r.lhsGrad += std::exp2((gamma - 1.0) * j) * lattice_integral(gr, tmp);
    }
    r.rhs = fractional_parts(f, rho, gamma, 0, v).squared();
    r.rhsGrad = fractional_parts(f, 0.5 * (rho + gamma), gamma, l, v).squared();
    return r;
}

} // namespace relkin
