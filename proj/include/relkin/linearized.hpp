#pragma once

#include <relkin/equilibrium.hpp>
#include <relkin/operator.hpp>
#include <relkin/volume.hpp>

#include <map>
#include <string>
#include <vector>

namespace relkin {

struct HydroCoefficients {
    double A = 0;
    Vec3 B;
    double C = 0;
};

// Coefficients of the projection onto span{sqrt J, p_i sqrt J, p0 sqrt J}.
// Components that vanish by symmetry are set to exactly zero so that Pf keeps
// the symmetry of f (and the cheaper quadrature that goes with it).
inline HydroCoefficients project_P(const TestFunction& f, const VolumeSpec& v = {}) {
    const auto& m = moments();
    const Symmetry sym = f.symmetry();
    auto mom = [&](Symmetry s, auto&& w) {
        VolumeSpec vs = v;
        vs.sym = s;
        return volume_integral(vs, [&](const Vec3& p) {
            const double p0 = std::sqrt(1.0 + norm2(p));
            return f(p, p0) * sqrt_juttner_p0(p0) * w(p, p0);
        });
    };
    const double I1 = mom(sym, [](const Vec3&, double) { return 1.0; });
    const double I0 = mom(sym, [](const Vec3&, double p0) { return p0; });
    HydroCoefficients h;
    h.C = (I0 - m.lambda0 * I1) / (m.lambda00 - m.lambda0 * m.lambda0);
    h.A = I1 - m.lambda0 * h.C;
    for (int i = 0; i < 3; ++i) {
        if (sym == Symmetry::Radial || (sym == Symmetry::Axial && i < 2)) continue;
        h.B[i] = mom(sym, [i](const Vec3& p, double) { return p[i]; }) / m.lambda11;
    }
    return h;
}

inline TestFunction hydro_function(const HydroCoefficients& h) {
    TestFunction f = TestFunction::juttner_poly(0, 0, 0, 0, h.A);
    if (h.B[0] != 0.0) f += TestFunction::juttner_poly(1, 0, 0, 0, h.B[0]);
    if (h.B[1] != 0.0) f += TestFunction::juttner_poly(0, 1, 0, 0, h.B[1]);
    if (h.B[2] != 0.0) f += TestFunction::juttner_poly(0, 0, 1, 0, h.B[2]);
    f += TestFunction::juttner_poly(0, 0, 0, 1, h.C);
    return f.named("Pf");
}

// (I - P) f, exactly representable in the test-function class.
inline TestFunction micro_part(const TestFunction& f, const VolumeSpec& v = {}) {
    TestFunction m = f - hydro_function(project_P(f, v));
    return m.named("(I-P)" + f.name());
}

inline double l2_inner(const TestFunction& a, const TestFunction& b, const VolumeSpec& v = {}) {
    return volume_integral(v, [&](const Vec3& p) { return a(p) * b(p); });
}

// <Lf, f> = -<Gamma(f, sqrt J) + Gamma(sqrt J, f), f>. value[0] is that form,
// value[1] the symmetrized square (1/4) int vM sigma (sum of four terms)^2 as
// a cross-check, value[2] the loss-side magnitude used as a scale.
inline std::vector<double> dirichlet_raw(const TestFunction& f, const KernelSpec& ker, const QuadratureSpec& quad,
                                         double Rp, double Rq) {
    OuterSpec o = outer_from(quad, f.symmetry(), Rp, Rq);
    AngularRule ar = angular_rule(ker, quad.planarOrder);
    const int nphi = quad.planarOrder;
    return integrate_pairs(o, 3, [&](const Vec3& p, const Vec3& q, std::vector<double>& acc) {
        PairFrame fr(p, q);
        if (fr.g <= 0) return;
        const double fp = f(p, fr.p0), fq = f(q, fr.q0);
        const double sp = sqrt_juttner_p0(fr.p0), sq = sqrt_juttner_p0(fr.q0);
        const double H0 = fq * sp + sq * fp;
        double lin = 0, sym = 0, mass = 0;
        for_each_omega(fr, ar, nphi, [&](double w, double, const Vec3& pp, double pp0, const Vec3& qq, double qq0) {
            const double H1 = f(qq, qq0) * sqrt_juttner_p0(pp0) + sqrt_juttner_p0(qq0) * f(pp, pp0);
            lin += w * (H1 - H0);
            sym += w * (H1 - H0) * (H1 - H0);
            mass += w;
        });
        const double pre = fr.vM * phi(fr.g, ker);
        acc[0] = -pre * fp * sq * lin;
        acc[1] = 0.25 * pre * sym;
        acc[2] = ar.singular ? 0.0 : pre * std::abs(fp) * sq * std::abs(H0) * mass;
    });
}

struct DirichletValue {
    double value = 0;      // -<Gamma(f,sqrtJ) + Gamma(sqrtJ,f), f>
    double symmetric = 0;  // (1/4) int vM sigma (...)^2
    double scale = 0;      // |f|^2 weighted by the collision frequency, for relative tolerances
};

inline DirichletValue dirichlet_form(const TestFunction& f, const KernelSpec& ker, const QuadratureSpec& quad,
                                     double Rp = 8.0, double Rq = 24.0) {
    auto r = dirichlet_raw(f, ker, quad, Rp, Rq);
    DirichletValue d{r[0], r[1], r[2]};
    if (d.scale == 0.0) d.scale = std::abs(d.symmetric);
    return d;
}

// zeta~ tabulated lazily by radius: the weight depends on |p| only.
class ZetaTable {
public:
    ZetaTable(const KernelSpec& k, const QuadratureSpec& q, double Rq = 24.0) : ker_(k), quad_(q), Rq_(Rq) {}
    double operator()(double r) {
        auto it = cache_.find(r);
        if (it != cache_.end()) return it->second;
        const double z = zeta_weight(Vec3(0, 0, r), ker_, quad_, Rq_);
        cache_.emplace(r, z);
        return z;
    }

private:
    KernelSpec ker_;
    QuadratureSpec quad_;
    double Rq_;
    std::map<double, double> cache_;
};

struct NFormValue {
    double seminorm = 0;  // (1/2) int vM sigma (f(p') - f(p))^2 sqrt(J(q) J(q')) w^{2l}(p)
    double zetaPart = 0;  // int zeta~ w^{2l} f^2
    double total() const { return seminorm + zetaPart; }
};

inline std::vector<double> bseminorm_raw(const TestFunction& f, const KernelSpec& ker, const QuadratureSpec& quad,
                                         double Rp, double Rq) {
    OuterSpec o = outer_from(quad, f.symmetry(), Rp, Rq);
    AngularRule ar = angular_rule(ker, quad.planarOrder);
    const int nphi = quad.planarOrder;
    return integrate_pairs(o, 2, [&](const Vec3& p, const Vec3& q, std::vector<double>& acc) {
        PairFrame fr(p, q);
        if (fr.g <= 0) return;
        const double fp = f(p, fr.p0);
        double a = 0;
        for_each_omega(fr, ar, nphi, [&](double w, double, const Vec3& pp, double pp0, const Vec3&, double qq0) {
            const double d = f(pp, pp0) - fp;
            a += w * d * d * sqrt_juttner_p0(qq0);
        });
        const double base = 0.5 * fr.vM * phi(fr.g, ker) * sqrt_juttner_p0(fr.q0) * a;
        acc[0] = base;
        acc[1] = base * fr.p0 * fr.p0;
    });
}

inline NFormValue n_form(const TestFunction& f, int l, const KernelSpec& ker, const QuadratureSpec& quad,
                         double Rp = 8.0, double Rq = 24.0) {
    NFormValue n;
    auto b = bseminorm_raw(f, ker, quad, Rp, Rq);
    n.seminorm = b[std::min(l, 1)];
    if (l > 1) throw DomainError("n_form is implemented for l = 0 and l = 1");
    ZetaTable zt(ker, quad);
    VolumeSpec v;
    v.radialOrder = quad.radialOrder;
    v.sphereOrder = quad.sphereOrder;
    v.R = Rp;
    v.sym = f.symmetry();
    n.zetaPart = volume_integral(v, [&](const Vec3& p) {
        const double p0 = std::sqrt(1.0 + norm2(p));
        const double fv = f(p, p0);
        return zt(norm(p)) * weight_w2l(p0, l) * fv * fv;
    });
    return n;
}

struct ConservationConstants {
    double mu1, mu2, mu3, mu4;
};

inline ConservationConstants conservation_constants(const EquilibriumMoments& m = moments()) {
    ConservationConstants c;
    c.mu1 = 1.0 - m.lambda0 * m.lambda0 / m.lambda00;
    c.mu2 = m.lambda11_0 - m.lambda0 * m.lambda11 / m.lambda00;
    c.mu3 = m.lambda0 - m.lambda00 / m.lambda0;
    c.mu4 = m.lambda11_0 - m.lambda11 / m.lambda0;
    return c;
}

struct IdentityCheck {
    std::string name;
    double residual;
};

// Integration identities behind the local conservation laws: orthogonality of
// (I - P) f to the collision invariants and to sqrt(J) p_j, and the moment
// matrix of P f in the (A, B, C) coordinates against its lambda expression.
inline std::vector<IdentityCheck> microscopic_identity_check(const TestFunction& f, const VolumeSpec& v = {}) {
    std::vector<IdentityCheck> out;
    const TestFunction m = micro_part(f, v);
    auto mom = [&](const TestFunction& g, auto&& w) {
        return volume_integral(v, [&](const Vec3& p) {
            const double p0 = std::sqrt(1.0 + norm2(p));
            return g(p, p0) * sqrt_juttner_p0(p0) * w(p, p0);
        });
    };
    const double sc = std::max(1.0, std::sqrt(l2_inner(f, f, v)));
    out.push_back({"micro.1", mom(m, [](const Vec3&, double) { return 1.0; }) / sc});
    out.push_back({"micro.p0", mom(m, [](const Vec3&, double p0) { return p0; }) / sc});
    for (int i = 0; i < 3; ++i)
        out.push_back({"micro.p" + std::to_string(i + 1), mom(m, [i](const Vec3& p, double) { return p[i]; }) / sc});

    // Basis b in {1, p1, p2, p3, p0}; psi in the same list.
    const auto& lm = moments();
    auto basis = [](int k, const Vec3& p, double p0) { return k == 0 ? 1.0 : (k == 4 ? p0 : p[k - 1]); };
    auto jmom = [&](auto&& w) {
        return volume_integral(v, [&](const Vec3& p) {
            const double p0 = std::sqrt(1.0 + norm2(p));
            return juttner_p0(p0) * w(p, p0);
        });
    };
    // Time part: int psi b J.
    double expectT[5][5] = {};
    expectT[0][0] = 1.0;
    expectT[0][4] = expectT[4][0] = lm.lambda0;
    expectT[4][4] = lm.lambda00;
    for (int i = 1; i <= 3; ++i) expectT[i][i] = lm.lambda11;
    double worst = 0;
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) {
            const double val = jmom([&](const Vec3& p, double p0) { return basis(a, p, p0) * basis(b, p, p0); });
            worst = std::max(worst, std::abs(val - expectT[a][b]));
        }
    out.push_back({"moment.time", worst});
    // Flux part: int (p_j/p0) psi b J.
    worst = 0;
    for (int j = 0; j < 3; ++j)
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b) {
                double e = 0;
                if (a == 0 && b == j + 1) e = lm.lambda11_0;              // A-row: lambda11_0 div B
                if (a == j + 1 && b == 0) e = lm.lambda11_0;              // B-row: lambda11_0 d_i A
                if (a == j + 1 && b == 4) e = lm.lambda11;                // B-row: lambda11 d_i C
                if (a == 4 && b == j + 1) e = lm.lambda11;                // C-row: lambda11 div B
                const double val = jmom([&](const Vec3& p, double p0) {
                    return p[j] / p0 * basis(a, p, p0) * basis(b, p, p0);
                });
                worst = std::max(worst, std::abs(val - e));
            }
    out.push_back({"moment.flux", worst});
    return out;
}

} // namespace relkin
