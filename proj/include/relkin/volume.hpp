#pragma once

#include <relkin/quadrature.hpp>
#include <relkin/test_functions.hpp>
#include <relkin/vec.hpp>

#include <cmath>
#include <numbers>
#include <vector>

namespace relkin {

// Product rule on R^3: composite radial panels x Gauss-Legendre in cos x
// periodic azimuth. Panels grow with |p| so tails like exp(-p0/2) are cheap.
struct VolumeSpec {
    int radialOrder = 24;
    int sphereOrder = 24;
    double R = 80.0;
    Symmetry sym = Symmetry::General;
};

inline std::vector<double> volume_breakpoints(double R) {
    std::vector<double> brk{0.0, 0.5, 1.0, 2.0, 3.0, 4.5, 6.0, 8.0, 11.0, 16.0, 23.0, 32.0, 44.0, 60.0, 80.0};
    std::vector<double> out;
    for (double b : brk) {
        if (b >= R) break;
        out.push_back(b);
    }
    out.push_back(R);
    return out;
}

template <class F>
double volume_integral(const VolumeSpec& v, F&& f) {
    Rule rr = gl_composite(v.radialOrder, volume_breakpoints(v.R));
    const Rule& c = gauss_legendre(v.sphereOrder);
    Rule ph = periodic(v.sphereOrder);
    NeumaierSum s;
    for (std::size_t i = 0; i < rr.size(); ++i) {
        const double r = rr.x[i], wr = rr.w[i] * r * r;
        if (v.sym == Symmetry::Radial) {
            s.add(wr * 4.0 * std::numbers::pi * f(Vec3(0, 0, r)));
            continue;
        }
        for (std::size_t j = 0; j < c.size(); ++j) {
            const double ct = c.x[j], st = std::sqrt(1.0 - ct * ct);
            if (v.sym == Symmetry::Axial) {
                s.add(wr * c.w[j] * 2.0 * std::numbers::pi * f(Vec3(r * st, 0, r * ct)));
                continue;
            }
            for (std::size_t k = 0; k < ph.size(); ++k)
                s.add(wr * c.w[j] * ph.w[k] * f(Vec3(r * st * std::cos(ph.x[k]), r * st * std::sin(ph.x[k]), r * ct)));
        }
    }
    return s.value();
}

} // namespace relkin
