#pragma once

#include <relkin/equilibrium.hpp>
#include <relkin/errors.hpp>
#include <relkin/geometry.hpp>
#include <relkin/kernels.hpp>
#include <relkin/quadrature.hpp>
#include <relkin/volume.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace relkin {

// ---------------------------------------------------------------------------
// Cancellation counterexample. Both pieces are written after the delta
// reduction as an outer q integral and a radial r integral; c' = 1.

struct CounterexampleReport {
    Vec3 p;
    std::vector<double> truncations;
    std::vector<double> zetaB1;
    std::vector<double> zetaB2;
    double growthFactor = 0;   // min ratio zetaB2(2R)/zetaB2(R) over consecutive doublings
    double b1LastChange = 0;   // relative change of zetaB1 over the last doubling in the list
};

namespace detail {

// s_lambda Phi(g_lambda) sigma0 with a bounded angular factor sigma0 = 1 on the
// whole sphere. decay > 0 multiplies sigma0 by exp(-decay r^2), which makes
// the untempered piece finite.
inline double counterexample_kernel(double g, double s, double r, const KernelSpec& k, double decay) {
    const double rs = std::sqrt(s);
    const double gl2 = g * g + 0.5 * rs * (std::sqrt(r * r + s) - rs);
    const double ang = decay > 0 ? std::exp(-decay * r * r) : 1.0;
    return (gl2 + 4.0) * phi(std::sqrt(gl2), k) * ang;
}

// Panels on [0, R] of width at most w.
inline Rule panels(double R, double w, int n) {
    std::vector<double> brk{0.0};
    const int np = std::max(1, int(std::ceil(R / w)));
    for (int i = 1; i <= np; ++i) brk.push_back(R * i / np);
    return gl_composite(n, brk);
}

} // namespace detail

// Evaluates both pieces at each truncation R of the r integral; the q
// integral is taken over R^3 (axially about p).
inline CounterexampleReport zetaB_split(const Vec3& p, const KernelSpec& k, const std::vector<double>& Rs,
                                        int order = 24, double rPanel = 1.0, double decay = 0.0) {
    CounterexampleReport rep;
    rep.p = p;
    rep.truncations = Rs;
    const FourMomentum P = mass_shell_lift(p);
    const double pr = norm(p);
    const Vec3 ax = pr > 0 ? p / pr : Vec3(0, 0, 1);
    Vec3 e1, e2;
    orthonormal_frame(ax, e1, e2);
    VolumeSpec v;
    v.radialOrder = order;
    v.sphereOrder = order;
    v.R = 80.0;
    v.sym = pr > 0 ? Symmetry::Axial : Symmetry::Radial;
    for (double R : Rs) {
        if (!(R > 0)) throw DomainError("truncation radius must be positive");
        Rule rr = detail::panels(R, rPanel, order);
        double b1 = 0, b2 = 0;
        // volume_integral places q on the z-axis frame; rotate into the p frame.
        b1 = volume_integral(v, [&](const Vec3& y) {
            const Vec3 qv = y[2] * ax + y[0] * e1 + y[1] * e2;
            const FourMomentum Q = mass_shell_lift(qv);
            const double g = relative_g_raw(P, Q);
            if (g < 1e-14) return 0.0;
            const double s = g * g + 4.0, rs = std::sqrt(s);
            const double cr = norm(cross(P.p, Q.p));
            const double rate = (P.p0 + Q.p0) / (2.0 * rs);
            const double yc = cr / (g * rs);
            NeumaierSum acc;
            for (std::size_t i = 0; i < rr.size(); ++i) {
                const double r = rr.x[i], sq = std::sqrt(r * r + s);
                const double arg = yc * r;
                // exp(-rate sq) I0(arg) = exp(arg - rate sq) e^{-arg} I0(arg); the
                // e^{p0/2 - q0/2} prefactor is folded in before exponentiating.
                const double lg = 0.5 * P.p0 - 0.5 * Q.p0 + arg - rate * sq;
                acc.add(rr.w[i] * r / sq * detail::counterexample_kernel(g, s, r, k, decay) * std::exp(lg) * bessel_i0e(arg));
            }
            return acc.value() / (Q.p0 * g);
        });
        b2 = volume_integral(v, [&](const Vec3& y) {
            const Vec3 qv = y[2] * ax + y[0] * e1 + y[1] * e2;
            const FourMomentum Q = mass_shell_lift(qv);
            const double g = relative_g_raw(P, Q);
            if (g < 1e-14) return 0.0;
            const double s = g * g + 4.0;
            NeumaierSum acc;
            for (std::size_t i = 0; i < rr.size(); ++i) {
                const double r = rr.x[i], sq = std::sqrt(r * r + s);
                acc.add(rr.w[i] * r / sq * detail::counterexample_kernel(g, s, r, k, decay));
            }
            return std::exp(-Q.p0) * acc.value() / (Q.p0 * g);
        });
        rep.zetaB1.push_back(b1 / P.p0);
        rep.zetaB2.push_back(b2 / P.p0);
    }
    rep.growthFactor = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < Rs.size(); ++i) rep.growthFactor = std::min(rep.growthFactor, rep.zetaB2[i + 1] / rep.zetaB2[i]);
    if (Rs.size() < 2) rep.growthFactor = 0;
    if (Rs.size() >= 2) {
        const std::size_t n = Rs.size();
        rep.b1LastChange = std::abs(rep.zetaB1[n - 1] - rep.zetaB1[n - 2]) / std::abs(rep.zetaB1[n - 2]);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Reduced integral: gtilde sqrt(stilde) k2(p', q) after the delta reductions,
// (pi sqrt(stilde) / 256) int dy' gbar^{-2-gamma} chi_k(gbar) with
// gbar^2 = (sqrt(stilde)/2)(y' - sqrt(stilde)).

struct ReducedK2 {
    double value = 0;
    double scale = 0;   // 2^{k gamma}
    double Y1 = 0, Y2 = 0;  // nominal window from gbar in [2^{-k-1}, 2^{-k}]
    double ratio() const { return value / scale; }
};

inline ReducedK2 reduced_k2_bound(const FourMomentum& pp, const FourMomentum& q, int k, double gamma, int order = 32) {
    const double gt = relative_g_raw(pp, q);
    const double st = gt * gt + 4.0, rst = std::sqrt(st);
    ReducedK2 r;
    r.scale = std::exp2(k * gamma);
    r.Y1 = rst + std::exp2(-2 * k - 1) / rst;
    r.Y2 = rst + std::exp2(-2 * k + 1) / rst;
    if (!(r.Y2 > r.Y1)) throw EmptyWindow("degenerate reduced-integral window");
    // integrate over the actual support of chi_k
    const double a = dyadic_lo(k), b = dyadic_hi(k);
    const double y1 = rst + 2.0 * a * a / rst, y2 = rst + 2.0 * b * b / rst;
    std::vector<double> brk{y1};
    for (double x : {dyadic_lo(k) * std::exp2(2 * kDyadicBlend), dyadic_hi(k) * std::exp2(-2 * kDyadicBlend)})
        brk.push_back(rst + 2.0 * x * x / rst);
    brk.push_back(y2);
    std::sort(brk.begin(), brk.end());
    Rule g = gl_composite(order, brk);
    NeumaierSum s;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double gb = std::sqrt(0.5 * rst * (g.x[i] - rst));
        s.add(g.w[i] * std::pow(gb, -2.0 - gamma) * dyadic_chi(k, gb));
    }
    r.value = std::numbers::pi * rst / 256.0 * s.value();
    return r;
}

// ---------------------------------------------------------------------------
// Exponential bounds on the dual frame quantities.

struct ExpBoundReport {
    std::size_t points = 0;
    std::size_t violations = 0;   // sqrt(J(q)) e^l e^{-sqrt(l^2 - j^2)} > 1
    double worstJ = 0;            // max of that quantity
    double fittedC = 0;           // max over points of max_z exp(-l sqrt(z^2+1) + j z) / exp(-sqrt(l^2-j^2))
    double fittedCTheta = 0;      // same with (2 theta - 1)(l, j)
};

inline ExpBoundReport exp_bound_suite(std::size_t nPairs, std::uint64_t seed, double pmax = 10.0,
                                      const std::vector<double>& thetas = {0.55, 0.75, 1.0}, int nz = 201) {
    ExpBoundReport rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-pmax, pmax);
    auto max_ratio = [&](double l, double j) {
        const double base = -std::sqrt(std::max(l * l - j * j, 0.0));
        double m = -INFINITY;
        for (int i = 0; i < nz; ++i) {
            const double z = double(i) / (nz - 1);
            m = std::max(m, -l * std::sqrt(z * z + 1.0) + j * z);
        }
        return std::exp(m - base);
    };
    for (std::size_t n = 0; n < nPairs; ++n) {
        const FourMomentum pp = mass_shell_lift(Vec3(u(rng), u(rng), u(rng)));
        const FourMomentum q = mass_shell_lift(Vec3(u(rng), u(rng), u(rng)));
        const double gt = relative_g_raw(pp, q);
        if (gt < 1e-12) continue;
        const double l = 0.25 * (pp.p0 + q.p0), j = norm(cross(pp.p, q.p)) / (2.0 * gt);
        ++rep.points;
        const double lj = std::sqrt(std::max(l * l - j * j, 0.0));
        const double logJ = 0.5 * std::log(juttner_p0(q.p0, Normalization::PaperLiteral)) + l - lj;
        const double v = std::exp(logJ);
        rep.worstJ = std::max(rep.worstJ, v);
        if (v > 1.0 + 1e-12) ++rep.violations;
        rep.fittedC = std::max(rep.fittedC, max_ratio(l, j));
        for (double th : thetas) {
            const double c = 2.0 * th - 1.0;
            rep.fittedCTheta = std::max(rep.fittedCTheta, max_ratio(c * l, c * j));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Scan of |dp'/dp| over a cubic grid at fixed (q, w).

struct GridSpec {
    double lo = -5.0, hi = 5.0, step = 0.5;
    int count() const { return int(std::floor((hi - lo) / step + 1e-9)) + 1; }
    double at(int i) const { return lo + step * i; }
};

struct JacobianRow {
    Vec3 p;
    double det;
};

struct JacobianScan {
    std::vector<JacobianRow> rows;
    double minAbs = INFINITY;
    Vec3 argmin;
    std::size_t belowThreshold = 0;
    std::size_t skipped = 0;
};

inline JacobianScan jacobian_scan(const Vec3& q, const Vec3& w, const GridSpec& grid, bool extended = false,
                                  double threshold = 1e-6, double h = 1e-4) {
    JacobianScan s;
    const int n = grid.count();
    const Vec3 wn = w / norm(w);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const Vec3 p(grid.at(i), grid.at(j), grid.at(k));
                // the chart is undefined where g = 0
                if (norm(p - q) < 1e-9) {
                    ++s.skipped;
                    continue;
                }
                const double d = collision_map_jacobian(p, q, wn, h, Chart::CenterOfMomentum, extended);
                s.rows.push_back({p, d});
                if (std::abs(d) < s.minAbs) {
                    s.minAbs = std::abs(d);
                    s.argmin = p;
                }
                if (std::abs(d) < threshold) ++s.belowThreshold;
            }
    return s;
}

} // namespace relkin
