#pragma once

#include <relkin/errors.hpp>
#include <relkin/vec.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace relkin {

// Metric signature (-,+,+,+), units m = c = 1.
template <class R>
struct FourMomentumT {
    Vec3T<R> p;
    R p0{1};

    Vec4 as4() const { return {double(p0), double(p[0]), double(p[1]), double(p[2])}; }
};

using FourMomentum = FourMomentumT<double>;

template <class R>
inline FourMomentumT<R> mass_shell_lift(const Vec3T<R>& p) {
    using std::sqrt;
    using std::abs;
    for (int i = 0; i < 3; ++i)
        if (!(abs(p[i]) < std::numeric_limits<double>::infinity()))
            throw NonFiniteInput("momentum component is not finite");
    return {p, sqrt(R(1) + norm2(p))};
}

inline FourMomentum mass_shell_lift(double a, double b, double c) { return mass_shell_lift(Vec3(a, b, c)); }

template <class R>
inline R lorentz_inner(const FourMomentumT<R>& a, const FourMomentumT<R>& b) {
    return -a.p0 * b.p0 + dot(a.p, b.p);
}

inline double lorentz_inner(const Vec4& a, const Vec4& b) {
    return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

// Row index mu, column index nu: (Lambda a)^mu = sum_nu m[mu][nu] a^nu.
struct LorentzMatrix {
    std::array<std::array<double, 4>, 4> m{};

    static LorentzMatrix identity() {
        LorentzMatrix L;
        for (int i = 0; i < 4; ++i) L.m[i][i] = 1.0;
        return L;
    }
    double operator()(int mu, int nu) const { return m[mu][nu]; }
    double& operator()(int mu, int nu) { return m[mu][nu]; }
};

inline Vec4 apply(const LorentzMatrix& L, const Vec4& a) {
    Vec4 r{};
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) r[mu] += L.m[mu][nu] * a[nu];
    return r;
}

inline LorentzMatrix operator*(const LorentzMatrix& A, const LorentzMatrix& B) {
    LorentzMatrix C;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0;
            for (int k = 0; k < 4; ++k) s += A.m[i][k] * B.m[k][j];
            C.m[i][j] = s;
        }
    return C;
}

constexpr double eta(int mu) { return mu == 0 ? -1.0 : 1.0; }

// Lambda^{-1} = eta Lambda^T eta.
inline LorentzMatrix invert_lorentz(const LorentzMatrix& L) {
    LorentzMatrix R;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) R.m[mu][nu] = eta(mu) * L.m[nu][mu] * eta(nu);
    return R;
}

// max_{mu,nu} |(Lambda^T D Lambda - D)_{mu nu}|, accumulated in extended precision
inline double isometry_residual(const LorentzMatrix& L) {
    double worst = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            long double s = 0;
            for (int k = 0; k < 4; ++k) s += (long double)L.m[k][a] * eta(k) * L.m[k][b];
            long double target = a == b ? eta(a) : 0.0;
            worst = std::max(worst, double(std::abs(s - target)));
        }
    return worst;
}

inline double determinant(const LorentzMatrix& L) {
    const auto& m = L.m;
    auto det3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) {
        return m[r0][c0] * (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1])
             - m[r0][c1] * (m[r1][c0] * m[r2][c2] - m[r1][c2] * m[r2][c0])
             + m[r0][c2] * (m[r1][c0] * m[r2][c1] - m[r1][c1] * m[r2][c0]);
    };
    return m[0][0] * det3(1, 2, 3, 1, 2, 3) - m[0][1] * det3(1, 2, 3, 0, 2, 3)
         + m[0][2] * det3(1, 2, 3, 0, 1, 3) - m[0][3] * det3(1, 2, 3, 0, 1, 2);
}

struct LorentzValidation {
    double isometry = 0;
    double det = 0;
    bool orthochronous = false;
    bool ok(double tol = 1e-12) const {
        return isometry <= tol && std::abs(det - 1.0) <= tol && orthochronous;
    }
};

inline LorentzValidation validate(const LorentzMatrix& L) {
    return {isometry_residual(L), determinant(L), L.m[0][0] >= 1.0 - 1e-12};
}

// Relative momentum g(a,b) = sqrt(2(-a.b - 1)) in a cancellation-free form:
// a0 b0 - a.b - 1 = (|a-b|^2 + |a x b|^2) / (a0 b0 + a.b + 1).
template <class R>
inline R relative_g_raw(const FourMomentumT<R>& a, const FourMomentumT<R>& b) {
    using std::sqrt;
    R num = norm2(a.p - b.p) + norm2(cross(a.p, b.p));
    R den = a.p0 * b.p0 + dot(a.p, b.p) + R(1);
    return sqrt(R(2) * num / den);
}

// Explicit centre-of-momentum matrix built on (p, q):
// Lambda (p + q) = (sqrt s, 0, 0, 0) and -Lambda (p - q) = (0, 0, 0, g).
// Entries are formed in extended precision and rounded once, which keeps the
// isometry residual at the level of a few ulps of the largest entry.
inline LorentzMatrix com_transform(const FourMomentum& p, const FourMomentum& q) {
    using R = long double;
    const FourMomentumT<R> P = mass_shell_lift(Vec3T<R>(p.p[0], p.p[1], p.p[2]));
    const FourMomentumT<R> Q = mass_shell_lift(Vec3T<R>(q.p[0], q.p[1], q.p[2]));
    const Vec3T<R> pxq = cross(P.p, Q.p);
    const R cr = std::sqrt(norm2(pxq));
    const R g = relative_g_raw(P, Q);
    if (g < R(1e-12)) throw DegeneratePair("relative momentum g below 1e-12");
    if (cr < R(1e-12) * P.p0 * Q.p0) throw ColinearPair("|p x q| below 1e-12 p0 q0");
    const R rs = std::sqrt(g * g + R(4));

    LorentzMatrix L;
    L.m[0][0] = double((P.p0 + Q.p0) / rs);
    for (int i = 0; i < 3; ++i) L.m[0][i + 1] = double(-(P.p[i] + Q.p[i]) / rs);

    L.m[1][0] = double(R(2) * cr / (g * rs));
    // p_i (p0 + q0 p.q) + q_i (q0 + p0 p.q) = |p x q| (n x (p0 q - q0 p)) with
    // n = (p x q)/|p x q|; the cross-product form avoids cancellation.
    const Vec3T<R> n = pxq / cr;
    const Vec3T<R> L1 = cross(n, P.p0 * Q.p - Q.p0 * P.p);
    for (int i = 0; i < 3; ++i) L.m[1][i + 1] = double(R(2) * L1[i] / (g * rs));

    L.m[2][0] = 0.0;
    for (int i = 0; i < 3; ++i) L.m[2][i + 1] = double(n[i]);

    const R gap = dot(P.p - Q.p, P.p + Q.p) / (P.p0 + Q.p0);
    L.m[3][0] = double(gap / g);
    for (int i = 0; i < 3; ++i) L.m[3][i + 1] = double(-(P.p[i] - Q.p[i]) / g);
    return L;
}

} // namespace relkin
