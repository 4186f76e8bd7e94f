#pragma once

#include <array>
#include <cmath>

namespace relkin {

// Small fixed-size vectors. Templated on the scalar so the collision map can
// run in extended precision.
template <class R>
struct Vec3T {
    R x[3]{R(0), R(0), R(0)};

    constexpr Vec3T() = default;
    constexpr Vec3T(R a, R b, R c) : x{a, b, c} {}

    R& operator[](int i) { return x[i]; }
    const R& operator[](int i) const { return x[i]; }

    Vec3T& operator+=(const Vec3T& o) { for (int i = 0; i < 3; ++i) x[i] += o.x[i]; return *this; }
    Vec3T& operator-=(const Vec3T& o) { for (int i = 0; i < 3; ++i) x[i] -= o.x[i]; return *this; }
    Vec3T& operator*=(R s) { for (int i = 0; i < 3; ++i) x[i] *= s; return *this; }
};

template <class R> inline Vec3T<R> operator+(Vec3T<R> a, const Vec3T<R>& b) { return a += b; }
template <class R> inline Vec3T<R> operator-(Vec3T<R> a, const Vec3T<R>& b) { return a -= b; }
template <class R> inline Vec3T<R> operator-(const Vec3T<R>& a) { return Vec3T<R>(-a[0], -a[1], -a[2]); }
template <class R> inline Vec3T<R> operator*(R s, Vec3T<R> a) { return a *= s; }
template <class R> inline Vec3T<R> operator*(Vec3T<R> a, R s) { return a *= s; }
template <class R> inline Vec3T<R> operator/(Vec3T<R> a, R s) { return a *= (R(1) / s); }

template <class R> inline R dot(const Vec3T<R>& a, const Vec3T<R>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
template <class R> inline Vec3T<R> cross(const Vec3T<R>& a, const Vec3T<R>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
template <class R> inline R norm2(const Vec3T<R>& a) { return dot(a, a); }
template <class R> inline R norm(const Vec3T<R>& a) { using std::sqrt; return sqrt(dot(a, a)); }

template <class R> inline R max_abs(const Vec3T<R>& a) {
    using std::abs;
    using std::max;
    return max(abs(a[0]), max(abs(a[1]), abs(a[2])));
}

// Any unit vector orthogonal to n (n assumed unit); the second basis vector is n x e1.
inline void orthonormal_frame(const Vec3T<double>& n, Vec3T<double>& e1, Vec3T<double>& e2) {
    Vec3T<double> a = std::abs(n[0]) < 0.6 ? Vec3T<double>(1, 0, 0)
                    : (std::abs(n[1]) < 0.6 ? Vec3T<double>(0, 1, 0) : Vec3T<double>(0, 0, 1));
    e1 = a - dot(a, n) * n;
    e1 = e1 / norm(e1);
    e2 = cross(n, e1);
}

using Vec3 = Vec3T<double>;
using Vec4 = std::array<double, 4>;

} // namespace relkin
