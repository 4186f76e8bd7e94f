#pragma once

#include <relkin/errors.hpp>
#include <relkin/minkowski.hpp>
#include <relkin/quadrature.hpp>

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <mutex>
#include <numbers>

namespace relkin {

enum class Normalization { PaperLiteral, UnitMass };

inline double bessel_k2(double z) {
    if (!(z > 0.0)) throw DomainError("K2 requires z > 0");
    return boost::math::cyl_bessel_k(2, z);
}

inline double bessel_i0(double y) {
    if (y < 0.0) throw DomainError("I0 requires y >= 0");
    return boost::math::cyl_bessel_i(0, y);
}

inline double bessel_i1(double y) {
    if (y < 0.0) throw DomainError("I1 requires y >= 0");
    return boost::math::cyl_bessel_i(1, y);
}

namespace detail {
// e^{-y} I_nu(y) by the Hankel asymptotic series, used beyond the overflow range.
inline double scaled_bessel_i_asym(int nu, double y) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 30; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (k * 8.0 * y);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * y);
}
} // namespace detail

// Exponentially scaled e^{-y} I0(y) and e^{-y} I1(y).
inline double bessel_i0e(double y) {
    if (y < 0.0) throw DomainError("I0 requires y >= 0");
    return y < 600.0 ? std::exp(-y) * bessel_i0(y) : detail::scaled_bessel_i_asym(0, y);
}

inline double bessel_i1e(double y) {
    if (y < 0.0) throw DomainError("I1 requires y >= 0");
    return y < 600.0 ? std::exp(-y) * bessel_i1(y) : detail::scaled_bessel_i_asym(1, y);
}

inline double juttner_norm(Normalization n) {
    static const double k21 = bessel_k2(1.0);
    const double base = 1.0 / (4.0 * std::numbers::pi);
    return n == Normalization::UnitMass ? base / k21 : base;
}

inline double juttner_p0(double p0, Normalization n = Normalization::UnitMass) {
    return juttner_norm(n) * std::exp(-p0);
}

inline double juttner(const FourMomentum& p, Normalization n = Normalization::UnitMass) {
    return juttner_p0(p.p0, n);
}

inline double sqrt_juttner_p0(double p0, Normalization n = Normalization::UnitMass) {
    return std::sqrt(juttner_norm(n)) * std::exp(-0.5 * p0);
}

// int_0^inf r^2 f(r) dr for integrands decaying like e^{-c sqrt(1+r^2)}, on
// composite Gauss-Legendre panels of growing width.
template <class F>
double radial_integral(F&& f, int order = 32, double rmax = 80.0) {
    std::vector<double> brk{0.0, 0.5, 1.0, 2.0, 4.0, 7.0, 11.0, 16.0, 23.0, 32.0, 44.0, 60.0};
    while (brk.back() < rmax) brk.push_back(brk.back() * 1.4);
    brk.back() = std::max(brk.back(), rmax);
    Rule r = gl_composite(order, brk);
    NeumaierSum s;
    for (std::size_t i = 0; i < r.size(); ++i) s.add(r.w[i] * r.x[i] * r.x[i] * f(r.x[i]));
    return s.value();
}

// int_{R^3} J dp: K2(1) literally, 1 under the unit-mass normalization.
inline double juttner_mass(Normalization n, int order = 32) {
    const double c = 4.0 * std::numbers::pi * juttner_norm(n);
    return c * radial_integral([](double r) { return std::exp(-std::sqrt(1.0 + r * r)); }, order);
}

struct EquilibriumMoments {
    double lambda0 = 0;   // int p0 J
    double lambda00 = 0;  // int p0^2 J
    double lambda11 = 0;  // int p1^2 J
    double lambda22 = 0;  // int p2^2 J
    double lambda11_0 = 0; // int p1^2 / p0 J
    double selfGap = 0;   // relative change against the doubled-order rule
};

namespace detail {
inline EquilibriumMoments compute_moments(Normalization n, int order) {
    const double c = 4.0 * std::numbers::pi * juttner_norm(n);
    auto e = [](double r) { return std::exp(-std::sqrt(1.0 + r * r)); };
    auto p0 = [](double r) { return std::sqrt(1.0 + r * r); };
    EquilibriumMoments m;
    m.lambda0 = c * radial_integral([&](double r) { return p0(r) * e(r); }, order);
    m.lambda00 = c * radial_integral([&](double r) { return (1.0 + r * r) * e(r); }, order);
    m.lambda11 = c * radial_integral([&](double r) { return r * r / 3.0 * e(r); }, order);
    m.lambda11_0 = c * radial_integral([&](double r) { return r * r / 3.0 / p0(r) * e(r); }, order);
    // The p2 moment is computed independently on a product sphere rule as an
    // isotropy check.
    const Rule& mu = gauss_legendre(16);
    Rule ph = periodic(16);
    NeumaierSum ang;
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t k = 0; k < ph.size(); ++k) {
            const double st = std::sqrt(1.0 - mu.x[i] * mu.x[i]);
            const double y = st * std::sin(ph.x[k]);
            ang.add(mu.w[i] * ph.w[k] * y * y);
        }
    m.lambda22 = juttner_norm(n) * ang.value() * radial_integral([&](double r) { return r * r * e(r); }, order);
    return m;
}
} // namespace detail

inline const EquilibriumMoments& moments(Normalization n = Normalization::UnitMass) {
    static std::once_flag f[2];
    static EquilibriumMoments m[2];
    const int i = n == Normalization::UnitMass ? 1 : 0;
    std::call_once(f[i], [&] {
        EquilibriumMoments a = detail::compute_moments(n, 32);
        EquilibriumMoments b = detail::compute_moments(n, 64);
        auto rel = [](double x, double y) { return std::abs(x - y) / std::abs(y); };
        b.selfGap = std::max({rel(a.lambda0, b.lambda0), rel(a.lambda00, b.lambda00), rel(a.lambda11, b.lambda11),
                              rel(a.lambda11_0, b.lambda11_0)});
        m[i] = b;
    });
    return m[i];
}

// int sqrt(J(q)) |p - q|^k dq for |p| = pr after the exact angular integration.
inline double juttner_band_integral(double pr, double k, Normalization n = Normalization::UnitMass, int order = 48) {
    const double c = 2.0 * std::numbers::pi * std::sqrt(juttner_norm(n));
    auto ang = [&](double q) {
        if (pr < 1e-12) return 2.0 * std::pow(q, k);
        return (std::pow(pr + q, k + 2.0) - std::pow(std::abs(pr - q), k + 2.0)) / (pr * q * (k + 2.0));
    };
    auto f = [&](double q) { return q * q * std::exp(-0.5 * std::sqrt(1.0 + q * q)) * ang(q); };
    std::vector<double> brk;
    if (pr > 0) {
        for (int i = 0; i <= 4; ++i) brk.push_back(pr * i / 4.0);
    } else {
        brk.push_back(0.0);
    }
    for (double w : {0.5, 1.5, 4.0, 10.0, 22.0, 40.0, 70.0, 110.0}) brk.push_back(pr + w);
    Rule r = gl_composite(order, brk);
    NeumaierSum s;
    for (std::size_t i = 0; i < r.size(); ++i) s.add(r.w[i] * f(r.x[i]));
    return c * s.value();
}

} // namespace relkin
