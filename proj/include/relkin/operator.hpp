#pragma once

#include <relkin/equilibrium.hpp>
#include <relkin/geometry.hpp>
#include <relkin/kernels.hpp>
#include <relkin/quadrature.hpp>
#include <relkin/test_functions.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace relkin {

// Everything needed to generate post-collisional momenta for a fixed (p, q)
// with the scattering angle measured from the centre-of-momentum direction k.
struct PairFrame {
    Vec3 p, q, P;
    double p0 = 1, q0 = 1, E = 2, g = 0, s = 4, rs = 2, vM = 0;
    double c = 0;  // 1 / (sqrt s (E + sqrt s))
    Vec3 k, e1, e2;

    PairFrame() = default;
    PairFrame(const Vec3& p_, const Vec3& q_) : p(p_), q(q_) {
        p0 = std::sqrt(1.0 + norm2(p));
        q0 = std::sqrt(1.0 + norm2(q));
        P = p + q;
        E = p0 + q0;
        g = relative_g_raw(FourMomentum{p, p0}, FourMomentum{q, q0});
        s = g * g + 4.0;
        rs = std::sqrt(s);
        vM = g * rs / (p0 * q0);
        c = 1.0 / (rs * (E + rs));
        Vec3 ps = p + (dot(p, P) * c - p0 / rs) * P;
        const double n = norm(ps);
        k = n > 0 ? ps / n : Vec3(0, 0, 1);
        orthonormal_frame(k, e1, e2);
    }

    Vec3 omega(double ct, double st, double cp, double sp) const {
        return ct * k + (st * cp) * e1 + (st * sp) * e2;
    }

    void outcome(const Vec3& w, Vec3& pp, double& pp0, Vec3& qq, double& qq0) const {
        const double Pw = dot(P, w);
        const Vec3 t = (0.5 * g) * (w + (Pw * c) * P);
        const double t0 = 0.5 * g * Pw / rs;
        pp = 0.5 * P + t;
        qq = 0.5 * P - t;
        pp0 = 0.5 * E + t0;
        qq0 = 0.5 * E - t0;
    }
};

// theta nodes with weights that already contain sin(theta) sigma0(theta) dtheta.
struct AngularRule {
    std::vector<double> th, W;
    bool singular = false;  // true when the rule assumes O(theta^2) brackets
    std::size_t size() const { return th.size(); }
};

// With a cutoff the interval [eps, tmax] is mapped logarithmically, which
// flattens theta^{-1-gamma}. Without a cutoff a Gauss-Jacobi rule with weight
// theta^{1-gamma} absorbs the singularity against a bracket that vanishes
// like theta^2 after azimuthal averaging.
inline AngularRule angular_rule(const KernelSpec& k, int n, double tmin = 0.0, double tmax = std::numbers::pi / 2) {
    AngularRule r;
    const double lo = std::max(tmin, k.epsilon);
    if (!(tmax > lo)) return r;
    if (k.angularModel == AngularModel::Constant) {
        Rule gl = gl_interval(n, lo, tmax);
        for (std::size_t i = 0; i < gl.size(); ++i) {
            r.th.push_back(gl.x[i]);
            r.W.push_back(gl.w[i] * std::sin(gl.x[i]));
        }
        return r;
    }
    if (lo > 0.0) {
        const double L = std::log(tmax / lo);
        Rule gl = gl_interval(n, 0.0, 1.0);
        for (std::size_t i = 0; i < gl.size(); ++i) {
            const double th = lo * std::exp(L * gl.x[i]);
            r.th.push_back(th);
            r.W.push_back(gl.w[i] * L * th * std::sin(th) * sigma0_raw(th, k));
        }
        return r;
    }
    r.singular = true;
    const double a = 1.0 - k.gamma;
    const Rule& gj = gauss_jacobi01(n, a);
    const double sc = std::pow(tmax, 2.0 - k.gamma);
    for (std::size_t i = 0; i < gj.size(); ++i) {
        const double th = tmax * gj.x[i];
        // theta^{-1-gamma} H = theta^{1-gamma} (H / theta^2); the canonical
        // profile has sin(theta) sigma0 = theta^{-1-gamma} exactly.
        r.th.push_back(th);
        r.W.push_back(sc * gj.w[i] / (th * th));
    }
    return r;
}

// Outer (p, q) rule: p on a radial x polar x azimuth product reduced by the
// symmetry of the integrand, q = p + u with u in spherical coordinates about
// -p so the cone g ~ |u| sits at a coordinate endpoint.
struct OuterSpec {
    double Rp = 8.0;       // |p| range
    double Rq = 8.0;       // |q| support radius
    double panel = 2.0;    // radial panel width
    int nRad = 8;          // GL nodes per radial panel
    int nCos = 12;
    int nPhi = 12;
    int nCosP = 0;         // polar order of the p nodes; 0 means nCos
    Symmetry sym = Symmetry::Radial;
    int threads = 1;
};

inline OuterSpec outer_from(const QuadratureSpec& q, Symmetry sym, double Rp, double Rq) {
    OuterSpec o;
    o.Rp = Rp;
    o.Rq = Rq;
    o.nRad = q.radialOrder;
    o.nCos = q.sphereOrder;
    o.nPhi = q.sphereOrder;
    o.sym = sym;
    o.threads = q.threads;
    return o;
}

struct PNode {
    Vec3 p;
    double w;
};

inline Rule radial_panels(double R, double panel, int n) {
    const int np = std::max(1, int(std::ceil(R / panel - 1e-12)));
    std::vector<double> brk;
    for (int i = 0; i <= np; ++i) brk.push_back(R * i / np);
    return gl_composite(n, brk);
}

inline std::vector<PNode> p_nodes(const OuterSpec& o) {
    std::vector<PNode> out;
    Rule rr = radial_panels(o.Rp, o.panel, o.nRad);
    const double pi = std::numbers::pi;
    for (std::size_t i = 0; i < rr.size(); ++i) {
        const double r = rr.x[i], wr = rr.w[i] * r * r;
        if (o.sym == Symmetry::Radial) {
            out.push_back({Vec3(0, 0, r), wr * 4.0 * pi});
            continue;
        }
        const Rule& c = gauss_legendre(o.nCosP > 0 ? o.nCosP : o.nCos);
        for (std::size_t j = 0; j < c.size(); ++j) {
            const double ct = c.x[j], st = std::sqrt(1.0 - ct * ct);
            if (o.sym == Symmetry::Axial) {
                out.push_back({Vec3(r * st, 0, r * ct), wr * c.w[j] * 2.0 * pi});
                continue;
            }
            Rule ph = periodic(o.nPhi);
            for (std::size_t k = 0; k < ph.size(); ++k)
                out.push_back({Vec3(r * st * std::cos(ph.x[k]), r * st * std::sin(ph.x[k]), r * ct), wr * c.w[j] * ph.w[k]});
        }
    }
    return out;
}

// Calls f(q, weight) for every q node attached to p.
template <class F>
void for_each_q(const OuterSpec& o, const Vec3& p, F&& f) {
    const double pr = norm(p);
    Vec3 a = pr > 0 ? (-1.0 / pr) * p : Vec3(0, 0, 1), b1, b2;
    orthonormal_frame(a, b1, b2);
    Rule ur = radial_panels(pr + o.Rq, o.panel, o.nRad);
    const Rule& c = gauss_legendre(o.nCos);
    const bool dropPhi = o.sym == Symmetry::Radial;
    Rule ph = dropPhi ? Rule{{0.0}, {2.0 * std::numbers::pi}} : periodic(o.nPhi);
    for (std::size_t i = 0; i < ur.size(); ++i) {
        const double u = ur.x[i], wu = ur.w[i] * u * u;
        for (std::size_t j = 0; j < c.size(); ++j) {
            const double ct = c.x[j], st = std::sqrt(1.0 - ct * ct);
            for (std::size_t k = 0; k < ph.size(); ++k) {
                const Vec3 d = ct * a + (st * std::cos(ph.x[k])) * b1 + (st * std::sin(ph.x[k])) * b2;
                f(p + u * d, wu * c.w[j] * ph.w[k]);
            }
        }
    }
}

// Sum over all (p, q) pairs of f(p, q, acc) * weight into m accumulators.
template <class F>
std::vector<double> integrate_pairs(const OuterSpec& o, std::size_t m, F&& f) {
    const auto P = p_nodes(o);
    return parallel_sum_vec(
        P.size(), m,
        [&](std::size_t i, std::vector<double>& acc) {
            std::vector<double> loc(m);
            std::vector<NeumaierSum> sum(m);
            for_each_q(o, P[i].p, [&](const Vec3& q, double wq) {
                std::fill(loc.begin(), loc.end(), 0.0);
                f(P[i].p, q, loc);
                for (std::size_t k = 0; k < m; ++k) sum[k].add(wq * loc[k]);
            });
            for (std::size_t k = 0; k < m; ++k) acc[k] += P[i].w * sum[k].value();
        },
        o.threads, 1);
}

inline std::size_t count_pairs(const OuterSpec& o) {
    std::size_t n = 0;
    for (const auto& pn : p_nodes(o)) for_each_q(o, pn.p, [&](const Vec3&, double) { ++n; });
    return n;
}

// Inner sphere sum: f(theta-weight, p', p'0, q', q'0) over the angular rule
// and an azimuthal trapezoid.
template <class F>
void for_each_omega(const PairFrame& fr, const AngularRule& ar, int nPhi, F&& f) {
    const double dphi = 2.0 * std::numbers::pi / nPhi;
    Vec3 pp, qq;
    double pp0, qq0;
    for (std::size_t i = 0; i < ar.size(); ++i) {
        const double ct = std::cos(ar.th[i]), st = std::sin(ar.th[i]);
        for (int m = 0; m < nPhi; ++m) {
            const double ph = dphi * (m + 0.5);
            fr.outcome(fr.omega(ct, st, std::cos(ph), std::sin(ph)), pp, pp0, qq, qq0);
            f(ar.W[i] * dphi, ar.th[i], pp, pp0, qq, qq0);
        }
    }
}

struct FormValue {
    double value = 0;
    double selfConsistencyGap = 0;
    std::size_t nodes = 0;
};

// Pointwise collision operator Q(F,G)(p) = int dq dw vM sigma [F(p')G(q') - F(p)G(q)].
inline double collision_Q(const TestFunction& F, const TestFunction& G, const Vec3& p, const KernelSpec& ker,
                          const QuadratureSpec& quad, double Rq = 8.0) {
    OuterSpec o = outer_from(quad, Symmetry::General, 0.0, Rq);
    AngularRule ar = angular_rule(ker, quad.planarOrder);
    const double Fp = F(p);
    NeumaierSum sum;
    for_each_q(o, p, [&](const Vec3& q, double wq) {
        PairFrame fr(p, q);
        if (fr.g <= 0) return;
        const double Gq = G(q, fr.q0);
        double acc = 0;
        for_each_omega(fr, ar, quad.planarOrder, [&](double w, double, const Vec3& pp, double pp0, const Vec3& qq, double qq0) {
            acc += w * (F(pp, pp0) * G(qq, qq0) - Fp * Gq);
        });
        sum.add(wq * fr.vM * phi(fr.g, ker) * acc);
    });
    return sum.value();
}

// Gamma(f,h)(p) = int dq dw vM sigma sqrt(J(q)) (f(q')h(p') - f(q)h(p)).
inline double gamma_bilinear(const TestFunction& f, const TestFunction& h, const Vec3& p, const KernelSpec& ker,
                             const QuadratureSpec& quad, double Rq = 10.0) {
    OuterSpec o = outer_from(quad, Symmetry::General, 0.0, Rq);
    AngularRule ar = angular_rule(ker, quad.planarOrder);
    const double hp = h(p);
    NeumaierSum sum;
    for_each_q(o, p, [&](const Vec3& q, double wq) {
        PairFrame fr(p, q);
        if (fr.g <= 0) return;
        const double fq = f(q, fr.q0);
        double acc = 0;
        for_each_omega(fr, ar, quad.planarOrder, [&](double w, double, const Vec3& pp, double pp0, const Vec3& qq, double qq0) {
            acc += w * (f(qq, qq0) * h(pp, pp0) - fq * hp);
        });
        sum.add(wq * fr.vM * phi(fr.g, ker) * sqrt_juttner_p0(fr.q0) * acc);
    });
    return sum.value();
}

// Runs a (p, q, omega) integral at the given rule and at a refined rule and
// reports the relative change.
template <class Eval>
std::vector<FormValue> with_refinement(const QuadratureSpec& quad, double refine, Eval&& eval) {
    auto a = eval(quad);
    std::vector<FormValue> out(a.first.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].value = a.first[i];
        out[i].nodes = a.second;
    }
    if (refine > 1.0) {
        auto b = eval(quad.scaled(refine));
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double den = std::max(std::abs(b.first[i]), 1e-300);
            out[i].selfConsistencyGap = std::abs(b.first[i] - a.first[i]) / den;
            out[i].value = b.first[i];
            out[i].nodes = b.second;
        }
    }
    return out;
}

struct Triple {
    TestFunction f, h, eta;
    std::string name;
};

// <w^{2l} Gamma(f,h), eta> in the omega representation, l = 0 and l = 1.
inline std::vector<double> trilinear_omega_raw(const Triple& t, const KernelSpec& ker, const QuadratureSpec& quad,
                                               double Rp, double Rq) {
    OuterSpec o = outer_from(quad, common_symmetry({&t.f, &t.h, &t.eta}), Rp, Rq);
    AngularRule ar = angular_rule(ker, quad.planarOrder);
    const int nphi = quad.planarOrder;
    return integrate_pairs(o, 2, [&](const Vec3& p, const Vec3& q, std::vector<double>& acc) {
        PairFrame fr(p, q);
        if (fr.g <= 0) return;
        const double fq = t.f(q, fr.q0), hp = t.h(p, fr.p0);
        double a = 0;
        for_each_omega(fr, ar, nphi, [&](double w, double, const Vec3& pp, double pp0, const Vec3& qq, double qq0) {
            a += w * (t.f(qq, qq0) * t.h(pp, pp0) - fq * hp);
        });
        const double base = fr.vM * phi(fr.g, ker) * sqrt_juttner_p0(fr.q0) * t.eta(p, fr.p0) * a;
        acc[0] = base;
        acc[1] = base * fr.p0 * fr.p0;
    });
}

inline std::vector<FormValue> trilinear_omega(const Triple& t, const KernelSpec& ker, const QuadratureSpec& quad,
                                              double Rp = 8.0, double Rq = 10.0, double refine = 0.0) {
    OuterSpec o0 = outer_from(quad, common_symmetry({&t.f, &t.h, &t.eta}), Rp, Rq);
    return with_refinement(quad, refine, [&](const QuadratureSpec& q) {
        OuterSpec o = outer_from(q, o0.sym, Rp, Rq);
        return std::make_pair(trilinear_omega_raw(t, ker, q, Rp, Rq),
                              count_pairs(o) * std::size_t(q.planarOrder) * q.planarOrder);
    });
}

// Dual representation: outer (p', q), inner z-plane mapped to (theta_L, phi)
// through tan^2(theta_L / 2) = g_L^2 / gtilde^2, so that dz / sqrt(|z|^2+1)
// = (2 gtilde^2 / stilde) tan(theta/2) / cos^2(theta/2) dtheta dphi.
inline std::vector<double> trilinear_dual_raw(const Triple& t, const KernelSpec& ker, const QuadratureSpec& quad,
                                              double Rp, double Rq) {
    OuterSpec o = outer_from(quad, common_symmetry({&t.f, &t.h, &t.eta}), Rp, Rq);
    AngularRule ar = angular_rule(ker, quad.planarOrder);
    const int nphi = quad.planarOrder;
    const double dphi = 2.0 * std::numbers::pi / nphi;
    std::vector<double> cph(nphi), sph(nphi);
    for (int m = 0; m < nphi; ++m) {
        cph[m] = std::cos(dphi * (m + 0.5));
        sph[m] = std::sin(dphi * (m + 0.5));
    }
    return integrate_pairs(o, 2, [&](const Vec3& pp, const Vec3& q, std::vector<double>& acc) {
        const FourMomentum P1 = mass_shell_lift(pp), Q1 = mass_shell_lift(q);
        const Vec3 pxq = cross(pp, q);
        const double cr = norm(pxq);
        const double gt = relative_g_raw(P1, Q1);
        if (gt < 1e-12 || cr < 1e-12 * P1.p0 * Q1.p0) return;  // measure zero
        const double st = gt * gt + 4.0, rst = std::sqrt(st);
        const Vec3 n = pxq / cr;
        const Vec3 L1 = (2.0 / (gt * rst)) * cross(n, P1.p0 * q - Q1.p0 * pp);
        const double l = 0.25 * (P1.p0 + Q1.p0), j = cr / (2.0 * gt);
        const double hp = t.h(pp, P1.p0);
        const double phiT = phi(gt, ker);
        double a = 0;
        for (std::size_t i = 0; i < ar.size(); ++i) {
            const double th = ar.th[i];
            const double c2 = std::cos(0.5 * th), tn = std::tan(0.5 * th);
            const double tt = tn * tn;
            const double Zm1 = 2.0 * gt * gt * tt / st;
            const double Z = 1.0 + Zm1;
            const double zr = std::sqrt(Zm1 * (Z + 1.0));
            const double gl2 = gt * gt * (1.0 + tt);
            const double sL = gl2 + 4.0;
            // W already carries sin(theta) sigma0(theta) dtheta.
            const double jac = 2.0 * gt * gt / st * tn / (c2 * c2) / std::sin(th);
            const double kern = sL * phi(std::sqrt(gl2), ker);
            const double ratio = st * phiT * gt * gt * gt * gt / (sL * phi(std::sqrt(gl2), ker) * gl2 * gl2);
            double inner = 0;
            for (int m = 0; m < nphi; ++m) {
                const double z1 = zr * cph[m], z2 = zr * sph[m];
                const Vec3 A = (0.5 * Zm1) * (pp + q) + (0.5 * rst * z1) * L1 + (0.5 * rst * z2) * n;
                const double A0 = 2.0 * l * Zm1 - 2.0 * j * z1;
                const Vec3 pn = pp + A;
                inner += t.h(pn, P1.p0 + A0) * std::exp(-0.5 * A0) - ratio * hp;
            }
            a += ar.W[i] * jac * kern * dphi * inner;
        }
        const double base = (rst / gt) / (P1.p0 * Q1.p0) * sqrt_juttner_p0(Q1.p0) * t.f(q, Q1.p0) * t.eta(pp, P1.p0) * a;
        acc[0] = base;
        acc[1] = base * P1.p0 * P1.p0;
    });
}

inline std::vector<FormValue> trilinear_dual(const Triple& t, const KernelSpec& ker, const QuadratureSpec& quad,
                                             double Rp = 8.0, double Rq = 10.0, double refine = 0.0) {
    const Symmetry sym = common_symmetry({&t.f, &t.h, &t.eta});
    return with_refinement(quad, refine, [&](const QuadratureSpec& q) {
        OuterSpec o = outer_from(q, sym, Rp, Rq);
        return std::make_pair(trilinear_dual_raw(t, ker, q, Rp, Rq),
                              count_pairs(o) * std::size_t(q.planarOrder) * q.planarOrder);
    });
}

// The norm-type term 1/2 int dp eta(p) int dq dw vM sigma (f(p') - f(p)) sqrt(J(q') J(q))
// in the omega representation (weights l = 0, 1 on eta).
inline std::vector<double> nterm_omega_raw(const TestFunction& f, const TestFunction& eta, const KernelSpec& ker,
                                           const QuadratureSpec& quad, double Rp, double Rq) {
    OuterSpec o = outer_from(quad, common_symmetry({&f, &eta}), Rp, Rq);
    AngularRule ar = angular_rule(ker, quad.planarOrder);
    const int nphi = quad.planarOrder;
    return integrate_pairs(o, 2, [&](const Vec3& p, const Vec3& q, std::vector<double>& acc) {
        PairFrame fr(p, q);
        if (fr.g <= 0) return;
        const double fp = f(p, fr.p0);
        double a = 0;
        for_each_omega(fr, ar, nphi, [&](double w, double, const Vec3& pp, double pp0, const Vec3&, double qq0) {
            a += w * (f(pp, pp0) - fp) * sqrt_juttner_p0(qq0);
        });
        const double base = 0.5 * fr.vM * phi(fr.g, ker) * sqrt_juttner_p0(fr.q0) * eta(p, fr.p0) * a;
        acc[0] = base;
        acc[1] = base * fr.p0 * fr.p0;
    });
}

// Carleman surface E^q_{p'-p}: q with (p'-p).(p+q) = 0 in the Minkowski sense.
// With k = p - p', k0 = p0 - p'0 and polar axis along k, the delta fixes
// cos(phi*) = (q0 k0 - gbar^2/2) / (r |k|); the surviving measure is
// dpi_q / q0 = gbar r dr dpsi / (|k| q0) and the outer dp' carries 1/gbar.
struct CarlemanSurface {
    Vec3 p, pp, k, kh, e1, e2;
    double p0, pp0, k0, kn, gbar, c;
    double a1, a3;  // p in the (e1, kh) frame

    CarlemanSurface(const Vec3& p_, const Vec3& pp_) : p(p_), pp(pp_) {
        const FourMomentum P = mass_shell_lift(p), PP = mass_shell_lift(pp);
        p0 = P.p0;
        pp0 = PP.p0;
        k = p - pp;
        kn = norm(k);
        k0 = energy_gap(P, PP);
        gbar = relative_g_raw(P, PP);
        c = 0.5 * gbar * gbar;
        kh = kn > 0 ? k / kn : Vec3(0, 0, 1);
        a3 = dot(p, kh);
        Vec3 perp = p - a3 * kh;
        a1 = norm(perp);
        if (a1 > 1e-14 * (1.0 + norm(p))) {
            e1 = perp / a1;
            e2 = cross(kh, e1);
        } else {
            a1 = 0;
            orthonormal_frame(kh, e1, e2);
        }
    }

    // cos(phi*) at |q| = r (may fall outside [-1, 1]).
    double cphi(double r) const { return (std::sqrt(1.0 + r * r) * k0 - c) / (r * kn); }

    // Smallest admissible r: the relevant branch of |q0 k0 - c| = r |k|.
    double rmin() const {
        auto f = [&](double r) { return std::abs(std::sqrt(1.0 + r * r) * k0 - c) - r * kn; };
        if (f(0.0) <= 0) return 0.0;
        double lo = 0.0, hi = 1.0;
        while (f(hi) > 0) {
            hi *= 2.0;
            if (hi > 1e8) throw EmptySurface("no admissible radius on the Carleman surface");
        }
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            (f(mid) > 0 ? lo : hi) = mid;
        }
        return hi;
    }

    // g^2(p, q) as an affine function of cos(psi) at radius r: g2 = A + B cos(psi).
    void g2_affine(double r, double& A, double& B) const {
        const double cp = std::clamp(cphi(r), -1.0, 1.0);
        const double sp = std::sqrt(std::max(0.0, 1.0 - cp * cp));
        const double q0 = std::sqrt(1.0 + r * r);
        // g^2 = 2 (p0 q0 - p.q - 1), p.q = r (a3 cphi + a1 sphi cos psi)
        A = 2.0 * (p0 * q0 - r * a3 * cp - 1.0);
        B = -2.0 * r * a1 * sp;
    }

    Vec3 point(double r, double psi) const {
        const double cp = std::clamp(cphi(r), -1.0, 1.0);
        const double sp = std::sqrt(std::max(0.0, 1.0 - cp * cp));
        return (r * cp) * kh + (r * sp * std::cos(psi)) * e1 + (r * sp * std::sin(psi)) * e2;
    }
};

// int_{E} dpi_q s sigma G(q) / (gbar q0) evaluated on the surface of (p, p').
// G receives q and q'.
template <class G>
double carleman_surface_integral(const CarlemanSurface& S, const KernelSpec& ker, int nr, int npsi, double Rq, G&& Gf) {
    if (S.kn <= 0 || S.gbar <= 0) throw DomainError("p' must differ from p");
    const double r0 = S.rmin();
    if (r0 >= Rq) return 0.0;
    // admissible g-window from the angular support: sin(theta/2) = gbar / g
    const double se = ker.epsilon > 0 ? std::sin(0.5 * ker.epsilon) : 0.0;
    const double g2lo = 2.0 * S.gbar * S.gbar;
    const double g2hi = se > 0 ? S.gbar * S.gbar / (se * se) : INFINITY;
    // r-breakpoints where an end of the g-window crosses cos(psi) = +-1.
    std::vector<double> brk{r0};
    {
        const int nscan = 400;
        auto edge = [&](double r, int which) {
            double A, B;
            S.g2_affine(r, A, B);
            const double lim = which < 2 ? g2lo : g2hi;
            const double cs = (which % 2 == 0) ? 1.0 : -1.0;
            return A + B * cs - lim;
        };
        for (int which = 0; which < 4; ++which) {
            if (which >= 2 && !std::isfinite(g2hi)) break;
            double ra = r0, fa = edge(ra, which);
            for (int i = 1; i <= nscan; ++i) {
                const double rb = r0 + (Rq - r0) * std::pow(double(i) / nscan, 2.0);
                const double fb = edge(rb, which);
                if ((fa < 0) != (fb < 0)) {
                    double lo = ra, hi = rb, flo = fa;
                    for (int it = 0; it < 100; ++it) {
                        double mid = 0.5 * (lo + hi), fm = edge(mid, which);
                        if ((fm < 0) == (flo < 0)) { lo = mid; flo = fm; }
                        else hi = mid;
                    }
                    brk.push_back(0.5 * (lo + hi));
                }
                ra = rb;
                fa = fb;
            }
        }
    }
    brk.push_back(Rq);
    std::sort(brk.begin(), brk.end());
    // extra panels keep the exponential tail resolved
    std::vector<double> full;
    for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
        const double a = brk[i], b = brk[i + 1];
        const int sub = std::max(1, int(std::ceil((b - a) / 3.0)));
        for (int s = 0; s < sub; ++s) full.push_back(a + (b - a) * s / sub);
    }
    full.push_back(Rq);

    const Rule& gl = gauss_legendre(nr);
    const Rule& gp = gauss_legendre(npsi);
    NeumaierSum tot;
    for (std::size_t seg = 0; seg + 1 < full.size(); ++seg) {
        const double a = full[seg], b = full[seg + 1];
        if (!(b > a)) continue;
        for (std::size_t i = 0; i < gl.size(); ++i) {
            // cosine map clusters nodes at both ends, where the arcs open like square roots
            const double t = 0.5 * std::numbers::pi * (gl.x[i] + 1.0) * 0.5;
            const double x = 0.5 * (1.0 - std::cos(2.0 * t));
            const double dx = std::sin(2.0 * t) * 0.5 * std::numbers::pi * 0.5;
            const double r = a + (b - a) * x;
            const double wr = gl.w[i] * (b - a) * dx;
            if (r <= 0) continue;
            const double cp = S.cphi(r);
            if (cp < -1.0 || cp > 1.0) continue;
            double A, B;
            S.g2_affine(r, A, B);
            // cos(psi) interval where g2lo <= A + B cos(psi) <= g2hi
            double clo = -1.0, chi = 1.0;
            if (std::abs(B) < 1e-300) {
                if (A < g2lo || A > g2hi) continue;
            } else {
                double u1 = (g2lo - A) / B, u2 = (g2hi - A) / B;
                if (u1 > u2) std::swap(u1, u2);
                clo = std::max(clo, u1);
                chi = std::min(chi, u2);
                if (!(chi > clo)) continue;
            }
            const double psiA = std::acos(chi), psiB = std::acos(clo);
            const double q0 = std::sqrt(1.0 + r * r);
            if (q0 + S.k0 <= 0.0) continue;  // q'0 = p0 + q0 - p'0 must be positive
            NeumaierSum arc;
            for (int side = 0; side < 2; ++side) {
                for (std::size_t m = 0; m < gp.size(); ++m) {
                    double psi = 0.5 * (psiA + psiB) + 0.5 * (psiB - psiA) * gp.x[m];
                    const double wpsi = 0.5 * (psiB - psiA) * gp.w[m];
                    if (side == 1) psi = 2.0 * std::numbers::pi - psi;
                    const Vec3 q = S.point(r, psi);
                    const double g2 = std::max(A + B * std::cos(psi), 0.0);
                    const double g = std::sqrt(g2);
                    const double sh = std::clamp(S.gbar / g, 0.0, 1.0);
                    const double th = 2.0 * std::asin(sh);
                    const double sg = sigma(g, th, ker);
                    if (sg == 0.0) continue;
                    const Vec3 qq = S.p + q - S.pp;
                    arc.add(wpsi * (g2 + 4.0) * sg * Gf(q, q0, qq));
                }
            }
            tot.add(wr * r / (S.kn * q0) * arc.value());
        }
    }
    return tot.value();
}

// Carleman form of the norm-type term:
// int dp/p0 eta(p) int dp'/p'0 (f(p') - f(p)) sqrt(J(p))/sqrt(J(p')) int dpi_q s sigma J(q)/(gbar q0).
// The outer p' integral is taken in spherical coordinates about p.
inline std::vector<double> nterm_carleman_raw(const TestFunction& f, const TestFunction& eta, const KernelSpec& ker,
                                              const QuadratureSpec& quad, double Rp, double Rk, double Rq) {
    OuterSpec o = outer_from(quad, common_symmetry({&f, &eta}), Rp, Rk);
    const int nr = quad.planarOrder, npsi = quad.planarOrder;
    const auto P = p_nodes(o);
    return parallel_sum_vec(
        P.size(), 2,
        [&](std::size_t i, std::vector<double>& acc) {
            const Vec3 p = P[i].p;
            const double p0 = std::sqrt(1.0 + norm2(p));
            const double fp = f(p, p0), ep = eta(p, p0);
            NeumaierSum s;
            // |p' - p| <= Rk; for_each_q centres the radial range at |p| + Rq, so
            // use a direct product here.
            OuterSpec ok = o;
            const double pr = norm(p);
            Vec3 a = pr > 0 ? (-1.0 / pr) * p : Vec3(0, 0, 1), b1, b2;
            orthonormal_frame(a, b1, b2);
            Rule ur = radial_panels(Rk, o.panel, o.nRad);
            const Rule& c = gauss_legendre(o.nCos);
            const bool dropPhi = o.sym == Symmetry::Radial;
            Rule ph = dropPhi ? Rule{{0.0}, {2.0 * std::numbers::pi}} : periodic(o.nPhi);
            (void)ok;
            for (std::size_t iu = 0; iu < ur.size(); ++iu) {
                const double u = ur.x[iu], wu = ur.w[iu] * u * u;
                for (std::size_t j = 0; j < c.size(); ++j) {
                    const double ct = c.x[j], st = std::sqrt(1.0 - ct * ct);
                    for (std::size_t kk = 0; kk < ph.size(); ++kk) {
                        const Vec3 d = ct * a + (st * std::cos(ph.x[kk])) * b1 + (st * std::sin(ph.x[kk])) * b2;
                        const Vec3 pp = p + u * d;
                        const double pp0 = std::sqrt(1.0 + norm2(pp));
                        const double df = f(pp, pp0) - fp;
                        if (df == 0.0) continue;
                        CarlemanSurface S(p, pp);
                        const double B = carleman_surface_integral(S, ker, nr, npsi, Rq,
                                                                   [&](const Vec3&, double q0, const Vec3&) {
                                                                       return juttner_p0(q0);
                                                                   });
                        s.add(wu * c.w[j] * ph.w[kk] * df * std::exp(-0.5 * (p0 - pp0)) * B / pp0);
                    }
                }
            }
            const double base = P[i].w * ep / p0 * s.value();
            acc[0] += base;
            acc[1] += base * p0 * p0;
        },
        o.threads, 1);
}

// Centre-of-momentum reduction: returns (lifted side, sphere side).
// Lifted side: int dp'/p'0 dq'/q'0 s sigma delta^4 G, evaluated in the frame
// of com_transform(p,q) where p'* = (sqrt s/2, (g/2) n) and the delta
// reduction leaves |p'*| / (2 p'*0) = g / (2 sqrt s) per unit solid angle.
// Sphere side: (1/2) g sqrt(s) int dw sigma G with the lab parametrization.
template <class G>
std::pair<double, double> com_reduction_check(const FourMomentum& p, const FourMomentum& q, const KernelSpec& ker,
                                              int nTheta, int nPhi, G&& Gf) {
    if (!(ker.epsilon > 0) && ker.angularModel == AngularModel::Canonical)
        throw DomainError("the reduction check needs an integrable angular kernel");
    const LorentzMatrix L = com_transform(p, q);
    const LorentzMatrix Li = invert_lorentz(L);
    const auto c = invariants(p, q);
    const double g = c.g, rs = std::sqrt(c.s);
    AngularRule ar = angular_rule(ker, nTheta);
    // Lambda p = (sqrt s/2, 0, 0, -g/2): in that frame p points along -e3
    const Vec3 ax(0, 0, -1), f1(1, 0, 0), f2(0, -1, 0);
    const double dphi = 2.0 * std::numbers::pi / nPhi;
    NeumaierSum lhs;
    for (std::size_t i = 0; i < ar.size(); ++i)
        for (int m = 0; m < nPhi; ++m) {
            const double ph = dphi * (m + 0.5);
            const Vec3 n = std::cos(ar.th[i]) * ax + (std::sin(ar.th[i]) * std::cos(ph)) * f1 + (std::sin(ar.th[i]) * std::sin(ph)) * f2;
            const Vec4 a = apply(Li, {0.5 * rs, 0.5 * g * n[0], 0.5 * g * n[1], 0.5 * g * n[2]});
            const Vec4 b = apply(Li, {0.5 * rs, -0.5 * g * n[0], -0.5 * g * n[1], -0.5 * g * n[2]});
            const FourMomentum pp{Vec3(a[1], a[2], a[3]), a[0]}, qq{Vec3(b[1], b[2], b[3]), b[0]};
            const double jac = (0.5 * g) / (2.0 * (0.5 * rs));
            lhs.add(ar.W[i] * dphi * jac * c.s * phi(g, ker) * Gf(p, q, pp, qq));
        }
    PairFrame fr(p.p, q.p);
    NeumaierSum rhs;
    for_each_omega(fr, ar, nPhi, [&](double w, double, const Vec3& pp, double pp0, const Vec3& qq, double qq0) {
        rhs.add(w * Gf(p, q, FourMomentum{pp, pp0}, FourMomentum{qq, qq0}));
    });
    return {lhs.value(), 0.5 * g * rs * phi(g, ker) * rhs.value()};
}

// zeta~(p) = int dq dw vM sigma (sqrt J(q) - sqrt J(q')) sqrt J(q).
inline double zeta_weight(const Vec3& p, const KernelSpec& ker, const QuadratureSpec& quad, double Rq = 30.0) {
    OuterSpec o = outer_from(quad, Symmetry::Radial, 0.0, Rq);
    o.sym = Symmetry::Radial;  // the integrand is invariant about the p axis
    AngularRule ar = angular_rule(ker, quad.planarOrder);
    NeumaierSum sum;
    const double pr = norm(p);
    const Vec3 pa(0, 0, pr);
    for_each_q(o, pa, [&](const Vec3& q, double wq) {
        PairFrame fr(pa, q);
        if (fr.g <= 0) return;
        const double sq = sqrt_juttner_p0(fr.q0);
        double a = 0;
        for_each_omega(fr, ar, quad.planarOrder, [&](double w, double, const Vec3&, double, const Vec3&, double qq0) {
            a += w * (sq - sqrt_juttner_p0(qq0));
        });
        sum.add(wq * fr.vM * phi(fr.g, ker) * sq * a);
    });
    return sum.value();
}

// int dw sigma0 chi_k(g sin(theta/2)) restricted to the support of chi_k, as
// (theta, weight) nodes.
inline AngularRule dyadic_angular_rule(const KernelSpec& ker, int k, double g, int n) {
    AngularRule r;
    if (!(g > 0)) return r;
    const double smax = std::sin(std::numbers::pi / 4);
    const double slo = dyadic_lo(k) / g, shi = dyadic_hi(k) / g;
    if (slo >= smax) return r;
    const double tlo = std::max(2.0 * std::asin(std::min(slo, 1.0)), ker.epsilon);
    const double thi = 2.0 * std::asin(std::min(shi, smax));
    if (!(thi > tlo)) return r;
    // the transitions of chi_k are smooth but steep; split at their centres
    std::vector<double> brk{tlo};
    for (double x : {dyadic_lo(k) * std::exp2(2 * kDyadicBlend), dyadic_hi(k) * std::exp2(-2 * kDyadicBlend)}) {
        const double sx = x / g;
        if (sx < smax) {
            const double t = 2.0 * std::asin(sx);
            if (t > tlo && t < thi) brk.push_back(t);
        }
    }
    brk.push_back(thi);
    std::sort(brk.begin(), brk.end());
    for (std::size_t b = 0; b + 1 < brk.size(); ++b) {
        const double L = std::log(brk[b + 1] / brk[b]);
        Rule gl = gl_interval(n, 0.0, 1.0);
        for (std::size_t i = 0; i < gl.size(); ++i) {
            const double th = brk[b] * std::exp(L * gl.x[i]);
            const double w = gl.w[i] * L * th * std::sin(th) * sigma0_raw(th, ker) * dyadic_chi(k, g * std::sin(0.5 * th));
            if (w != 0.0) {
                r.th.push_back(th);
                r.W.push_back(w);
            }
        }
    }
    return r;
}

// T^{k,l}_- and T^{k,l}_+ (l = 0 and 1 in the two slots).
inline std::vector<double> dyadic_T_raw(int k, int sign, const Triple& t, const KernelSpec& ker,
                                        const QuadratureSpec& quad, double Rp, double Rq) {
    OuterSpec o = outer_from(quad, common_symmetry({&t.f, &t.h, &t.eta}), Rp, Rq);
    const int nphi = quad.planarOrder;
    return integrate_pairs(o, 2, [&](const Vec3& p, const Vec3& q, std::vector<double>& acc) {
        PairFrame fr(p, q);
        if (fr.g <= 0) return;
        AngularRule ar = dyadic_angular_rule(ker, k, fr.g, quad.planarOrder);
        if (ar.size() == 0) return;
        double a = 0;
        if (sign < 0) {
            for (double w : ar.W) a += w;
            a *= 2.0 * std::numbers::pi * t.f(q, fr.q0) * t.h(p, fr.p0);
        } else {
            for_each_omega(fr, ar, nphi, [&](double w, double, const Vec3& pp, double pp0, const Vec3& qq, double qq0) {
                a += w * t.f(qq, qq0) * t.h(pp, pp0);
            });
        }
        const double base = fr.vM * phi(fr.g, ker) * sqrt_juttner_p0(fr.q0) * t.eta(p, fr.p0) * a;
        acc[0] = base;
        acc[1] = base * fr.p0 * fr.p0;
    });
}

// T^{k,l}_- for a radial triple in absolute (|p|, |q|, cos) coordinates. The
// q weight sqrt J(q) keeps |q| small while h and eta may be spread out to
// |p| ~ 10^3, which is what the low-k pieces need (their angular support is
// empty unless g > 2^{-k} / sin(pi/4)).
inline std::vector<double> dyadic_T_minus_wide(int k, const Triple& t, const KernelSpec& ker, const QuadratureSpec& quad,
                                               double Rp, double Rq = 40.0) {
    if (common_symmetry({&t.f, &t.h, &t.eta}) != Symmetry::Radial)
        throw DomainError("dyadic_T_minus_wide needs a radial triple");
    std::vector<double> pb{0.0};
    for (double b = 0.5; b < Rp; b *= 1.5) pb.push_back(b);
    pb.push_back(Rp);
    Rule pr = gl_composite(quad.radialOrder, pb);
    std::vector<double> qb;
    for (double b : {0.0, 0.5, 1.0, 2.0, 3.0, 4.5, 6.0, 8.0, 11.0, 16.0, 23.0, 32.0, 44.0, 60.0, 80.0})
        if (b < Rq) qb.push_back(b);
    qb.push_back(Rq);
    Rule qr = gl_composite(quad.radialOrder, qb);
    // the cone q parallel to p is where g is smallest; cluster there
    Rule cr = gl_composite(quad.sphereOrder, {-1.0, 0.0, 0.9, 0.99, 1.0});
    const double pi = std::numbers::pi;
    return parallel_sum_vec(
        pr.size(), 2,
        [&](std::size_t i, std::vector<double>& acc) {
            const Vec3 p(0, 0, pr.x[i]);
            const double p0 = std::sqrt(1.0 + norm2(p));
            const double hp = t.h(p, p0) * t.eta(p, p0);
            if (hp == 0.0) return;
            NeumaierSum s;
            for (std::size_t a = 0; a < qr.size(); ++a) {
                const double r = qr.x[a];
                for (std::size_t b = 0; b < cr.size(); ++b) {
                    const double ct = cr.x[b], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
                    const Vec3 q(r * st, 0, r * ct);
                    PairFrame fr(p, q);
                    if (fr.g <= 0) continue;
                    AngularRule ar = dyadic_angular_rule(ker, k, fr.g, quad.planarOrder);
                    double m = 0;
                    for (double w : ar.W) m += w;
                    if (m == 0.0) continue;
                    s.add(qr.w[a] * r * r * cr.w[b] * 2.0 * pi * fr.vM * phi(fr.g, ker) * sqrt_juttner_p0(fr.q0) *
                          t.f(q, fr.q0) * 2.0 * pi * m);
                }
            }
            const double base = pr.w[i] * pr.x[i] * pr.x[i] * 4.0 * pi * hp * s.value();
            acc[0] += base;
            acc[1] += base * p0 * p0;
        },
        quad.threads, 1);
}

// Moments int Q(F,F) psi dp for psi in {1, p1, p2, p3, p0, 1 + log F}, plus the
// loss-term magnitudes used as scale.
struct CollisionMoments {
    std::array<double, 6> value{};
    std::array<double, 6> scale{};
};

inline CollisionMoments collision_moments(const TestFunction& F, const KernelSpec& ker, const OuterSpec& o,
                                          int planarOrder) {
    AngularRule ar = angular_rule(ker, planarOrder);
    const int nphi = planarOrder;
    auto r = integrate_pairs(o, 12, [&](const Vec3& p, const Vec3& q, std::vector<double>& acc) {
        PairFrame fr(p, q);
        if (fr.g <= 0) return;
        const double Fp = F(p, fr.p0), Fq = F(q, fr.q0);
        const double pre = fr.vM * phi(fr.g, ker);
        double gain = 0, loss = 0;
        for_each_omega(fr, ar, nphi, [&](double w, double, const Vec3& pp, double pp0, const Vec3& qq, double qq0) {
            gain += w * F(pp, pp0) * F(qq, qq0);
            loss += w * Fp * Fq;
        });
        const double d = pre * (gain - loss), L = pre * loss;
        const double psi[6] = {1.0, p[0], p[1], p[2], fr.p0, 1.0 + std::log(Fp)};
        for (int i = 0; i < 6; ++i) {
            acc[i] = d * psi[i];
            acc[6 + i] = L * std::abs(psi[i]);
        }
    });
    CollisionMoments m;
    for (int i = 0; i < 6; ++i) {
        m.value[i] = r[i];
        m.scale[i] = r[6 + i];
    }
    return m;
}

inline CollisionMoments collision_moments(const TestFunction& F, const KernelSpec& ker, const QuadratureSpec& quad,
                                          double Rp, double Rq) {
    return collision_moments(F, ker, outer_from(quad, F.symmetry(), Rp, Rq), quad.planarOrder);
}

} // namespace relkin
