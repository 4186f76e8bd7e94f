#pragma once

#include <relkin/minkowski.hpp>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace relkin {

using Real50 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>,
                                             boost::multiprecision::et_off>;

struct CollisionInvariants {
    double g = 0;
    double s = 4;
    double vM = 0;
};

template <class R>
inline R relative_g(const FourMomentumT<R>& a, const FourMomentumT<R>& b) {
    return relative_g_raw(a, b);
}

inline CollisionInvariants invariants(const FourMomentum& p, const FourMomentum& q) {
    // -p.q - 1 is evaluated in the cancellation-free form, so the radicand is
    // never negative; the clamp only guards hand-built off-shell inputs.
    double rad = 2.0 * (norm2(p.p - q.p) + norm2(cross(p.p, q.p))) / (p.p0 * q.p0 + dot(p.p, q.p) + 1.0);
    if (rad < 0 && rad >= -1e-14) rad = 0;
    CollisionInvariants c;
    c.g = std::sqrt(rad);
    c.s = rad + 4.0;
    c.vM = c.g * std::sqrt(c.s) / (p.p0 * q.p0);
    return c;
}

// a0 - b0 without cancellation.
template <class R>
inline R energy_gap(const FourMomentumT<R>& a, const FourMomentumT<R>& b) {
    return dot(a.p - b.p, a.p + b.p) / (a.p0 + b.p0);
}

template <class R>
using CollisionPairT = std::pair<FourMomentumT<R>, FourMomentumT<R>>;

// Centre-of-momentum parametrization. The (xi - 1) term is rewritten as
// (P.w) P / (sqrt s (E + sqrt s)), which is regular at P = 0.
template <class R>
inline CollisionPairT<R> post_collision(const FourMomentumT<R>& p, const FourMomentumT<R>& q, const Vec3T<R>& w) {
    using std::sqrt;
    const Vec3T<R> P = p.p + q.p;
    const R E = p.p0 + q.p0;
    const R g = relative_g_raw(p, q);
    const R rs = sqrt(g * g + R(4));
    const Vec3T<R> half = R(0.5) * P;
    const Vec3T<R> t = R(0.5) * g * (w + (dot(P, w) / (rs * (E + rs))) * P);
    const R t0 = R(0.5) * g * dot(P, w) / rs;
    FourMomentumT<R> pp{half + t, R(0.5) * E + t0};
    FourMomentumT<R> qq{half - t, R(0.5) * E - t0};
    return {pp, qq};
}

// Glassey-Strauss parametrization p' = p + a w, q' = q - a w.
template <class R>
inline CollisionPairT<R> post_collision_gs(const FourMomentumT<R>& p, const FourMomentumT<R>& q, const Vec3T<R>& w) {
    using std::sqrt;
    const Vec3T<R> P = p.p + q.p;
    const R E = p.p0 + q.p0;
    const R wP = dot(w, P);
    const R a = R(2) * E * (p.p0 * dot(w, q.p) - q.p0 * dot(w, p.p)) / (E * E - wP * wP);
    Vec3T<R> pp = p.p + a * w;
    Vec3T<R> qq = q.p - a * w;
    return {mass_shell_lift(pp), mass_shell_lift(qq)};
}

enum class Chart { CenterOfMomentum, GlasseyStrauss };

template <class R>
inline CollisionPairT<R> post_collision(const FourMomentumT<R>& p, const FourMomentumT<R>& q, const Vec3T<R>& w, Chart c) {
    return c == Chart::CenterOfMomentum ? post_collision(p, q, w) : post_collision_gs(p, q, w);
}

// cos(theta) = (p-q).(p'-q') / g^2. With conservation (p-q) - (p'-q') = 2(p-p'),
// so 1 - cos(theta) = D.D / (2 g^2) with D = (p-q) - (p'-q'); this form keeps
// full relative accuracy for grazing outcomes.
inline double scattering_cos(const FourMomentum& p, const FourMomentum& q,
                             const FourMomentum& pp, const FourMomentum& qq) {
    const double g = relative_g_raw(p, q);
    if (g < 1e-12) throw UndefinedAngle("g below 1e-12");
    const Vec3 D = (p.p - q.p) - (pp.p - qq.p);
    const double D0 = energy_gap(p, q) - energy_gap(pp, qq);
    const double c = 1.0 - (norm2(D) - D0 * D0) / (2.0 * g * g);
    return std::clamp(c, -1.0, 1.0);
}

inline double prepost_jacobian_analytic(const FourMomentum& p, const FourMomentum& q, const Vec3& w,
                                        Chart chart = Chart::GlasseyStrauss) {
    auto [pp, qq] = post_collision(p, q, w, chart);
    return pp.p0 * qq.p0 / (p.p0 * q.p0);
}

namespace detail {

template <class R, int N, class Map>
Eigen::Matrix<R, N, N> central_jacobian(const std::array<R, N>& x, R h, Map map) {
    Eigen::Matrix<R, N, N> Jm;
    for (int i = 0; i < N; ++i) {
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        auto fp = map(xp), fm = map(xm);
        for (int r = 0; r < N; ++r) Jm(r, i) = (fp[r] - fm[r]) / (R(2) * h);
    }
    return Jm;
}

// Richardson-extrapolated determinant; throws when det(h) and det(h/2)
// disagree by more than 10 %.
template <class R, int N, class Map>
R richardson_det(const std::array<R, N>& x, R h, Map map, bool check) {
    using std::abs;
    auto J1 = central_jacobian<R, N>(x, h, map);
    auto J2 = central_jacobian<R, N>(x, h / R(2), map);
    Eigen::Matrix<R, N, N> Jr = (R(4) * J2 - J1) / R(3);
    R d = Jr.determinant();
    if (check) {
        R d1 = J1.determinant(), d2 = J2.determinant();
        R scale = std::max(abs(d1), abs(d2));
        if (scale > R(0) && abs(d1 - d2) > R(0.1) * scale)
            throw StepTooSmall("determinant fluctuates by more than 10% between h and h/2");
    }
    return d;
}

} // namespace detail

// 6x6 determinant of (p,q) -> (p',q') at fixed w in the Glassey-Strauss chart.
// In the centre-of-momentum chart p' depends on (p,q) only through p+q and
// p0+q0, so that map is rank four and its determinant vanishes identically.
inline double prepost_jacobian_numeric(const FourMomentum& p, const FourMomentum& q, const Vec3& w,
                                       double h = 1e-4) {
    if (!(h >= 1e-7 && h <= 1e-3)) throw DomainError("step outside [1e-7, 1e-3]");
    std::array<double, 6> x{p.p[0], p.p[1], p.p[2], q.p[0], q.p[1], q.p[2]};
    auto map = [&](const std::array<double, 6>& y) {
        auto [a, b] = post_collision_gs(mass_shell_lift(Vec3(y[0], y[1], y[2])),
                                        mass_shell_lift(Vec3(y[3], y[4], y[5])), w);
        return std::array<double, 6>{a.p[0], a.p[1], a.p[2], b.p[0], b.p[1], b.p[2]};
    };
    return std::abs(detail::richardson_det<double, 6>(x, h, map, true));
}

template <class R>
inline R collision_map_jacobian_t(const Vec3T<R>& p, const Vec3T<R>& q, const Vec3T<R>& w, R h, Chart chart) {
    std::array<R, 3> x{p[0], p[1], p[2]};
    const auto Q = mass_shell_lift(q);
    auto map = [&](const std::array<R, 3>& y) {
        auto pr = post_collision(mass_shell_lift(Vec3T<R>(y[0], y[1], y[2])), Q, w, chart);
        return std::array<R, 3>{pr.first.p[0], pr.first.p[1], pr.first.p[2]};
    };
    return detail::richardson_det<R, 3>(x, h, map, false);
}

// |d p' / d p| at fixed (q, w).
inline double collision_map_jacobian(const Vec3& p, const Vec3& q, const Vec3& w, double h = 1e-4,
                                     Chart chart = Chart::CenterOfMomentum, bool extended = false) {
    if (!extended) return collision_map_jacobian_t<double>(p, q, w, h, chart);
    auto up = [](const Vec3& v) { return Vec3T<Real50>(Real50(v[0]), Real50(v[1]), Real50(v[2])); };
    Vec3T<Real50> W = up(w);
    W = W / norm(W);
    Real50 d = collision_map_jacobian_t<Real50>(up(p), up(q), W, Real50(h) / Real50(1000), chart);
    return static_cast<double>(d);
}

struct DualFrameQuantities {
    double gTilde = 0;
    double sTilde = 4;
    double gL = 0;
    double gLam = 0;
    double sLam = 4;
    double cosThetaLam = 1;
    double l = 0;
    double j = 0;
    Vec3 A;
    double A0 = 0;
};

// Frame quantities on (p', q) at z in R^2. A is the spatial part of the
// image of the z-plane point under the inverse centre-of-momentum matrix
// built on (p', q), so that p' + A lies on the mass shell with energy p'0 + A0.
inline DualFrameQuantities dual_frame(const FourMomentum& pp, const FourMomentum& q, double z1, double z2) {
    const LorentzMatrix L = com_transform(pp, q);
    DualFrameQuantities d;
    d.gTilde = relative_g_raw(pp, q);
    d.sTilde = d.gTilde * d.gTilde + 4.0;
    const double zz = z1 * z1 + z2 * z2;
    const double Zm1 = zz / (std::sqrt(zz + 1.0) + 1.0);
    const double gL2 = 0.5 * d.sTilde * Zm1;
    d.gL = std::sqrt(gL2);
    const double gLam2 = d.gTilde * d.gTilde + gL2;
    d.gLam = std::sqrt(gLam2);
    d.sLam = gLam2 + 4.0;
    d.cosThetaLam = std::clamp(2.0 * d.gTilde * d.gTilde / gLam2 - 1.0, -1.0, 1.0);
    const Vec3 pxq = cross(pp.p, q.p);
    const double cr = norm(pxq);
    d.l = 0.25 * (pp.p0 + q.p0);
    d.j = cr / (2.0 * d.gTilde);
    const double rs = std::sqrt(d.sTilde);
    const Vec3 L1(L.m[1][1], L.m[1][2], L.m[1][3]);
    d.A = (0.5 * Zm1) * (pp.p + q.p) + (0.5 * rs * z1) * L1 + (0.5 * rs * z2 / cr) * pxq;
    d.A0 = 2.0 * d.l * Zm1 - 2.0 * d.j * z1;
    return d;
}

inline double hyperboloid_metric(const FourMomentum& p, const FourMomentum& pp) {
    const double d0 = energy_gap(p, pp);
    return std::sqrt(norm2(p.p - pp.p) + d0 * d0);
}

// Returns the labels of violated relations; empty when everything holds.
inline std::vector<std::string> pointwise_inequality_suite(const FourMomentum& p, const FourMomentum& q,
                                                           const FourMomentum& pp, const FourMomentum& qq,
                                                           double z1, double z2, double tol = 1e-10) {
    std::vector<std::string> bad;
    auto check = [&](bool ok, const char* name) {
        if (!ok) bad.emplace_back(name);
    };
    const double up = 1.0 + tol, dn = 1.0 - tol;
    const auto c = invariants(p, q);
    const double g = c.g, s = c.s;
    const double pq = norm(p.p - q.p);

    check(s >= std::max(g * g, 4.0) * dn, "s.ge.g2");
    check(s <= 4.0 * p.p0 * q.p0 * up, "s.le.pq");
    check(g <= 2.0 * std::sqrt(p.p0 * q.p0) * up, "g.upper.est");
    check(pq / std::sqrt(p.p0 * q.p0) <= g * up + 1e-300, "g.lower.est");
    check(g <= pq * up + 1e-15, "g.ineq.sharp");
    check(std::abs(energy_gap(p, q)) <= pq * up + 1e-15, "p0q0.le.pq");
    check(p.p0 + q.p0 <= 2.0 * p.p0 * q.p0 * up, "p0.plus.q0.le.p0q0");

    const double gt = relative_g_raw(pp, q);
    const double gb = relative_g_raw(pp, p);
    const double st = gt * gt + 4.0;
    const double cr = norm(cross(pp.p, q.p));
    const double pmq = norm(pp.p - q.p);
    if (gt > 1e-12 && cr > 1e-12 * pp.p0 * q.p0) {
        const double l = 0.25 * (pp.p0 + q.p0);
        const double j = cr / (2.0 * gt);
        check(j <= l * up, "j.le.l");
        check(l <= 0.5 * pp.p0 * q.p0 * up && j * j <= 0.25 * pp.p0 * q.p0 * up, "l.upper.ineq");
        const double lhs = l * l - j * j;
        const double f1 = ((pp.p0 + q.p0) * (pp.p0 + q.p0) * gt * gt - 4.0 * cr * cr) / (16.0 * gt * gt);
        const double f2 = st / (16.0 * gt * gt) * pmq * pmq;
        const double sc = l * l * 1e-8;
        check(std::abs(lhs - f2) <= sc && std::abs(f1 - f2) <= sc, "l2j2");
        check(std::sqrt(pmq * pmq * st) / (4.0 * gt) >= 0.25 * pmq * dn, "l2j2size");

        const auto d = dual_frame(pp, q, z1, z2);
        const double Z = std::sqrt(z1 * z1 + z2 * z2 + 1.0);
        const double gl2 = d.gLam * d.gLam;
        check(gt * gt * std::max(Z, std::sqrt(2.0)) <= 2.0 * gl2 * up && gl2 <= d.sLam * up
                  && std::abs(d.sLam - 0.5 * st * (Z + 1.0)) <= 1e-10 * d.sLam && d.sLam <= st * Z * up,
              "ineq.gL.here");
    }
    if (g > 1e-12) {
        const double ct = scattering_cos(p, q, pp, qq);
        if (ct >= 0) check(gt * gt <= g * g * up && g * g <= 2.0 * gt * gt * up, "gtildeg.equiv");
        check(std::abs(g * g - gt * gt - gb * gb) <= 1e-10 * g * g, "triangle.id");
        check(std::abs(std::sqrt(std::max(0.0, 0.5 * (1.0 - ct))) - gb / g) <= 1e-10, "bargoverg");
    }
    check(p.p0 <= (pp.p0 + qq.p0) * up && pp.p0 + qq.p0 <= 2.0 * pp.p0 * qq.p0 * up, "pp'q'");
    {
        const double sc = 1e-12 * (p.p0 * q.p0 + pp.p0 * qq.p0 + pp.p0 * q.p0 + p.p0 * qq.p0 + p.p0 * pp.p0 + q.p0 * qq.p0);
        const bool a = std::abs(lorentz_inner(p, q) - lorentz_inner(pp, qq)) <= sc;
        const bool b = std::abs(lorentz_inner(pp, q) - lorentz_inner(p, qq)) <= sc;
        const bool e = std::abs(lorentz_inner(pp, p) - lorentz_inner(qq, q)) <= sc;
        check(a && b && e, "eq.pqp'q'");
    }
    {
        const double d = hyperboloid_metric(p, pp);
        const double e = norm(p.p - pp.p);
        check(e * dn <= d + 1e-300 && d <= std::sqrt(2.0) * e * up + 1e-300, "simple.calc2");
    }
    check(c.vM <= 4.0 * up, "moller.upper.est");
    return bad;
}

} // namespace relkin
