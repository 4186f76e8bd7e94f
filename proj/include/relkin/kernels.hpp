#pragma once

#include <relkin/errors.hpp>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace relkin {

enum class Family { Hard, Soft };
enum class AngularModel { Canonical, Constant };

struct KernelSpec {
    Family family = Family::Hard;
    double rho = 0.0;
    double gamma = 0.5;
    double cPhi = 1.0;
    double epsilon = 0.0;
    AngularModel angularModel = AngularModel::Canonical;
    int kMin = -10;
    int kMax = 10;

    void validate() const {
        std::ostringstream m;
        if (!(gamma > 0.0 && gamma < 1.0)) {
            m << "gamma = " << gamma << " violates the angular assumption range 0 < gamma < 1";
            throw ConfigError(m.str());
        }
        if (family == Family::Hard && !(rho >= -gamma && rho < 2.0)) {
            m << "hard kernel requires -gamma <= rho < 2, got rho = " << rho;
            throw ConfigError(m.str());
        }
        if (family == Family::Soft && !(rho > -1.5 - gamma && rho < -gamma)) {
            m << "soft kernel requires -3/2 - gamma < rho < -gamma, got rho = " << rho;
            throw ConfigError(m.str());
        }
        if (!(cPhi > 0.0)) throw ConfigError("c_phi must be positive");
        if (!(epsilon >= 0.0 && epsilon < std::numbers::pi / 2)) throw ConfigError("epsilon must lie in [0, pi/2)");
        if (kMin > kMax) throw ConfigError("empty dyadic window");
    }

    static KernelSpec hard(double a, double gamma, double eps = 0.0) {
        KernelSpec k;
        k.family = Family::Hard;
        k.rho = a;
        k.gamma = gamma;
        k.epsilon = eps;
        return k;
    }
    static KernelSpec soft(double b, double gamma, double eps = 0.0) {
        KernelSpec k;
        k.family = Family::Soft;
        k.rho = -b;
        k.gamma = gamma;
        k.epsilon = eps;
        return k;
    }
};

inline double phi(double g, const KernelSpec& k) {
    if (g == 0.0 && k.rho < 0.0) throw SingularAtZero("Phi(g) is singular at g = 0");
    return k.cPhi * std::pow(g, k.rho);
}

// Angular profile without the cutoff or the domain check.
inline double sigma0_raw(double theta, const KernelSpec& k) {
    if (k.angularModel == AngularModel::Constant) return 1.0;
    return std::pow(theta, -1.0 - k.gamma) / std::sin(theta);
}

inline double sigma0(double theta, const KernelSpec& k) {
    if (!(theta > 0.0) || theta > std::numbers::pi / 2 + 1e-14)
        throw DomainError("theta outside (0, pi/2]");
    if (theta < k.epsilon) return 0.0;
    return sigma0_raw(theta, k);
}

// sigma(g, theta) = Phi(g) sigma0(theta); zero outside the symmetrized support.
inline double sigma(double g, double theta, const KernelSpec& k) {
    if (theta > std::numbers::pi / 2 || theta < k.epsilon || theta <= 0.0) return 0.0;
    return phi(g, k) * sigma0_raw(theta, k);
}

// C-infinity transition: 0 for t <= 0, 1 for t >= 1.
inline double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

// Dyadic partition in log2 scale. chi_k(x) = chi_0(2^k x); chi_0 rises across
// log2 x = -1 and falls across log2 x = 0 with half-width kDyadicBlend, so the
// translates telescope to exactly 1.
inline constexpr double kDyadicBlend = 0.25;

inline double dyadic_chi(int k, double x) {
    if (!(x > 0.0)) return 0.0;
    const double t = std::log2(x) + k;
    const double d = kDyadicBlend;
    return smoothstep((t + 1.0 + d) / (2.0 * d)) - smoothstep((t + d) / (2.0 * d));
}

// Closed support of chi_k.
inline double dyadic_lo(int k) { return std::exp2(-k - 1 - kDyadicBlend); }
inline double dyadic_hi(int k) { return std::exp2(-k + kDyadicBlend); }

// Phi(g) * 2 pi * int sin(theta) sigma0(theta) dtheta over [eps, pi/2], closed form
// for the canonical model: 2 pi (eps^-gamma - (pi/2)^-gamma) / gamma.
inline double sphere_mass(const KernelSpec& k) {
    if (k.angularModel == AngularModel::Constant)
        return 2.0 * std::numbers::pi * (std::cos(k.epsilon));
    if (k.epsilon <= 0.0) return INFINITY;
    return 2.0 * std::numbers::pi * (std::pow(k.epsilon, -k.gamma) - std::pow(std::numbers::pi / 2, -k.gamma)) / k.gamma;
}

} // namespace relkin
