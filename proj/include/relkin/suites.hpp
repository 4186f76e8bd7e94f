#pragma once

// Check groups shared by the relkin CLI and the acceptance driver. Each group
// appends named checks and free-form data to a Report; nothing here reads a
// clock, so a report is a pure function of its inputs.

#include <relkin/diagnostics.hpp>
#include <relkin/equilibrium.hpp>
#include <relkin/geometry.hpp>
#include <relkin/linearized.hpp>
#include <relkin/norms.hpp>
#include <relkin/operator.hpp>
#include <relkin/report.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace relkin::suites {

namespace detail {

inline Vec3 in_ball(std::mt19937_64& rng, double R) {
    std::uniform_real_distribution<double> u(-R, R);
    for (;;) {
        Vec3 v(u(rng), u(rng), u(rng));
        if (norm2(v) <= R * R) return v;
    }
}

inline Vec3 unit(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0, 1);
    for (;;) {
        Vec3 w(n(rng), n(rng), n(rng));
        const double r = norm(w);
        if (r > 1e-8) return w / r;
    }
}

inline double rel_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); }

} // namespace detail

// ---------------------------------------------------------------- geometry

inline void conservation_laws(Report& rep, std::uint64_t seed, std::size_t n, double pmax = 10.0) {
    std::mt19937_64 rng(seed);
    double mom = 0, en = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = mass_shell_lift(detail::in_ball(rng, pmax)), q = mass_shell_lift(detail::in_ball(rng, pmax));
        auto [pp, qq] = post_collision(p, q, detail::unit(rng));
        const double E = p.p0 + q.p0;
        mom = std::max(mom, max_abs((pp.p + qq.p) - (p.p + q.p)) / E);
        en = std::max(en, std::abs(pp.p0 + qq.p0 - E) / E);
    }
    rep.data()["conservation"] = {{"samples", n}, {"pmax", pmax}};
    rep.check("conservation.momentum", mom, "<=", 1e-12);
    rep.check("conservation.energy", en, "<=", 1e-12);
}

inline void lorentz_frame(Report& rep, std::uint64_t seed, std::size_t n, double pmax = 10.0) {
    std::mt19937_64 rng(seed + 1);
    double cond = 0, iso = 0, det = 0;
    std::size_t used = 0;
    while (used < n) {
        const auto p = mass_shell_lift(detail::in_ball(rng, pmax)), q = mass_shell_lift(detail::in_ball(rng, pmax));
        const double cr = norm(cross(p.p, q.p));
        if (cr < 1e-6 * p.p0 * q.p0) continue;
        ++used;
        const LorentzMatrix L = com_transform(p, q);
        const auto c = invariants(p, q);
        const double rs = std::sqrt(c.s);
        const Vec4 a = apply(L, {p.p0 + q.p0, p.p[0] + q.p[0], p.p[1] + q.p[1], p.p[2] + q.p[2]});
        const Vec4 b = apply(L, {p.p0 - q.p0, p.p[0] - q.p[0], p.p[1] - q.p[1], p.p[2] - q.p[2]});
        double r = std::max({std::abs(a[0] - rs), std::abs(a[1]), std::abs(a[2]), std::abs(a[3])});
        r = std::max({r, std::abs(b[0]), std::abs(b[1]), std::abs(b[2]), std::abs(b[3] + c.g)});
        cond = std::max(cond, r / rs);
        const auto v = validate(L);
        iso = std::max(iso, v.isometry);
        det = std::max(det, std::abs(v.det - 1.0));
    }
    rep.data()["lorentz"] = {{"pairs", n}, {"maxDetDefect", det}};
    rep.check("lorentz.condition_over_sqrt_s", cond, "<=", 1e-10);
    rep.check("lorentz.isometry", iso, "<=", 1e-12);
}

inline void jacobian_agreement(Report& rep, std::uint64_t seed, std::size_t n, double pmax = 5.0) {
    std::mt19937_64 rng(seed + 2);
    double worst = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = mass_shell_lift(detail::in_ball(rng, pmax)), q = mass_shell_lift(detail::in_ball(rng, pmax));
        const Vec3 w = detail::unit(rng);
        const double a = prepost_jacobian_analytic(p, q, w), d = prepost_jacobian_numeric(p, q, w);
        worst = std::max(worst, detail::rel_gap(a, d));
    }
    rep.data()["jacobian"] = {{"triples", n}, {"pmax", pmax}};
    rep.check("jacobian.analytic_vs_fd", worst, "<=", 1e-6);
}

inline void pointwise(Report& rep, std::uint64_t seed, std::size_t n, double pmax = 10.0) {
    std::mt19937_64 rng(seed + 3);
    std::uniform_real_distribution<double> z(-3, 3);
    std::size_t bad = 0;
    nlohmann::ordered_json byLabel = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = mass_shell_lift(detail::in_ball(rng, pmax)), q = mass_shell_lift(detail::in_ball(rng, pmax));
        auto [pp, qq] = post_collision(p, q, detail::unit(rng));
        const double z1 = z(rng), z2 = z(rng);
        const auto v = pointwise_inequality_suite(p, q, pp, qq, z1, z2);
        if (v.empty()) continue;
        ++bad;
        for (const auto& s : v) byLabel[s] = byLabel.value(s, 0) + 1;
    }
    rep.data()["pointwise"] = {{"tuples", n}, {"violationsByLabel", byLabel}};
    rep.check("pointwise.violations", double(bad), "==", 0.0);
}

// ------------------------------------------------------------- equilibrium

// K2(z) = int_0^inf exp(-z cosh t) cosh 2t dt, summed independently of Boost.
inline double k2_oracle(double z) {
    const double T = std::acosh(1.0 + 60.0 / z) + 1.0;
    std::vector<double> brk;
    for (int i = 0; i <= 24; ++i) brk.push_back(T * i / 24.0);
    Rule r = gl_composite(40, brk);
    NeumaierSum s;
    for (std::size_t i = 0; i < r.size(); ++i) s.add(r.w[i] * std::exp(-z * std::cosh(r.x[i])) * std::cosh(2 * r.x[i]));
    return s.value();
}

inline void equilibrium(Report& rep) {
    const double mass = juttner_mass(Normalization::UnitMass, 48);
    const double k2 = bessel_k2(1.0), k2o = k2_oracle(1.0);
    rep.check("equilibrium.unit_mass", std::abs(mass - 1.0), "<=", 1e-8);
    rep.check("equilibrium.k2_at_1", detail::rel_gap(k2o, k2), "<=", 1e-8);
    auto& band = rep.data()["band"] = nlohmann::ordered_json::array();
    for (int k : {-1, 0, 1, 2}) {
        double lo = INFINITY, hi = 0;
        for (int i = 0; i <= 98; ++i) {
            const double p0 = 1.0 + 0.5 * i;
            const double r = juttner_band_integral(std::sqrt(p0 * p0 - 1.0), k) / std::pow(p0, k);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        band.push_back({{"k", k}, {"c", lo}, {"C", hi}});
        rep.check("equilibrium.band_lower_k" + std::to_string(k), lo, ">", 0.0);
        rep.check("equilibrium.band_spread_k" + std::to_string(k), hi / lo, "<", 100.0);
    }
}

// -------------------------------------------------- invariants and entropy

// Radial F: mass, energy and the entropy sign. Its momentum moments vanish by
// symmetry of the reduced rule, so they are only logged.
inline void collision_invariants(Report& rep, const KernelSpec& ker, const QuadratureSpec& quad, double alpha = 0.8,
                                 double Rp = 7.0, double Rq = 9.0) {
    const auto m = collision_moments(TestFunction::gaussian(alpha), ker, quad, Rp, Rq);
    static const char* names[6] = {"1", "p1", "p2", "p3", "p0", "entropy"};
    auto& d = rep.data()["moments"] = nlohmann::ordered_json::array();
    for (int i = 0; i < 6; ++i) d.push_back({{"F", "radial"}, {"psi", names[i]}, {"value", m.value[i]}, {"scale", m.scale[i]}});
    rep.check("invariants.1", std::abs(m.value[0]) / m.scale[0], "<=", 1e-6);
    rep.check("invariants.p0", std::abs(m.value[4]) / m.scale[4], "<=", 1e-6);
    rep.check("invariants.entropy", m.value[5] / m.scale[5], "<=", 1e-6);
}

// Off-centre F = exp(-alpha |p - c e3|^2) on the axial rule, where the p3
// moment is a genuine test. p nodes need fewer polar points than the q
// sphere, which carries the accuracy.
struct MomentumSettings {
    double alpha = 2.0, centre = 0.4, Rp = 4.0, Rq = 5.0;
    int radial = 12, qPolar = 24, pPolar = 8, qAzimuth = 12, planar = 12;
};

inline void momentum_invariant(Report& rep, const KernelSpec& ker, const MomentumSettings& s = {}, int threads = 1) {
    const auto F = TestFunction::gaussian(s.alpha, Vec3(0, 0, s.centre));
    OuterSpec o;
    o.Rp = s.Rp;
    o.Rq = s.Rq;
    o.nRad = s.radial;
    o.nCos = s.qPolar;
    o.nCosP = s.pPolar;
    o.nPhi = s.qAzimuth;
    o.sym = F.symmetry();
    o.threads = threads;
    const auto m = collision_moments(F, ker, o, s.planar);
    static const char* names[6] = {"1", "p1", "p2", "p3", "p0", "entropy"};
    auto& d = rep.data()["moments"];
    if (!d.is_array()) d = nlohmann::ordered_json::array();
    for (int i = 0; i < 6; ++i) d.push_back({{"F", "axial"}, {"psi", names[i]}, {"value", m.value[i]}, {"scale", m.scale[i]}});
    rep.check("invariants.axial.1", std::abs(m.value[0]) / m.scale[0], "<=", 1e-6);
    rep.check("invariants.axial.p3", std::abs(m.value[3]) / m.scale[3], "<=", 1e-6);
    rep.check("invariants.axial.p0", std::abs(m.value[4]) / m.scale[4], "<=", 1e-6);
    rep.check("invariants.axial.entropy", m.value[5] / m.scale[5], "<=", 1e-6);
}

// ---------------------------------------------------------- hydrodynamics

inline void hydrodynamics(Report& rep) {
    const auto a = project_P(TestFunction::sqrt_juttner());
    const auto b = project_P(TestFunction::juttner_poly(0, 0, 1, 0));
    const auto c = project_P(TestFunction::juttner_poly(0, 0, 0, 1));
    const double ea = std::max({std::abs(a.A - 1.0), norm(a.B), std::abs(a.C)});
    const double eb = std::max({std::abs(b.A), std::abs(b.B[0]), std::abs(b.B[1]), std::abs(b.B[2] - 1.0), std::abs(b.C)});
    const double ec = std::max({std::abs(c.A), norm(c.B), std::abs(c.C - 1.0)});
    rep.check("hydro.basis_sqrtJ", ea, "<=", 1e-10);
    rep.check("hydro.basis_p3_sqrtJ", eb, "<=", 1e-10);
    rep.check("hydro.basis_p0_sqrtJ", ec, "<=", 1e-10);
    const auto mu = conservation_constants();
    rep.data()["mu"] = {{"mu1", mu.mu1}, {"mu2", mu.mu2}, {"mu3", mu.mu3}, {"mu4", mu.mu4}};
    rep.check("hydro.mu1", mu.mu1, ">", 0.0);
    rep.check("hydro.mu3", mu.mu3, "<", 0.0);
    double worst = 0;
    for (const auto& f : {TestFunction::gaussian(0.5, Vec3(0.2, 0.1, -0.3)), TestFunction::juttner_poly(1, 1, 0, 2),
                          TestFunction::gaussian(1.0)})
        for (const auto& r : microscopic_identity_check(f)) worst = std::max(worst, std::abs(r.residual));
    rep.check("hydro.identities", worst, "<=", 1e-6);
}

// -------------------------------------------------------- representations

// Three radial Schwartz triples; one has a sign change in f.
inline std::vector<Triple> representation_triples() {
    return {
        {TestFunction::gaussian(0.5), TestFunction::gaussian(0.7), TestFunction::gaussian(0.3), "g0.5/g0.7/g0.3"},
        {TestFunction::gaussian(1.0), TestFunction::gaussian(0.4), TestFunction::gaussian(0.6), "g1/g0.4/g0.6"},
        {TestFunction::gaussian(0.6) - 0.5 * TestFunction::gaussian(1.5), TestFunction::gaussian(0.8),
         TestFunction::gaussian(0.35), "g0.6-g1.5/2/g0.8/g0.35"},
    };
}

struct RepresentationSettings {
    QuadratureSpec trilinear;      // omega and dual
    QuadratureSpec nterm;          // omega and Carleman
    double Rp = 8.0, Rq = 10.0;    // trilinear truncations
    double nRp = 8.0, nRk = 30.0, nRq = 40.0;
    double coarse = 0.75;          // self-consistency rule is quad.scaled(coarse)
    double tol = 1e-4;
    int comTheta = 32, comPhi = 32;
};

inline RepresentationSettings default_representation_settings(QuadratureSpec base) {
    RepresentationSettings s;
    s.trilinear = base;
    s.trilinear.radialOrder = 16;
    s.trilinear.sphereOrder = 24;
    s.trilinear.planarOrder = 24;
    s.nterm = base;
    s.nterm.radialOrder = s.nterm.sphereOrder = s.nterm.planarOrder = 12;
    return s;
}

inline void representations(Report& rep, const KernelSpec& ker, const RepresentationSettings& s,
                            const std::vector<Triple>& triples, std::uint64_t seed) {
    auto& rows = rep.data()["forms"] = nlohmann::ordered_json::array();
    auto eval = [&](const std::string& form, const std::string& r, const QuadratureSpec& q, auto&& raw,
                    std::size_t nodes) {
        const auto fine = raw(q);
        const auto coarse = raw(q.scaled(s.coarse));
        for (int l = 0; l < 2; ++l)
            rows.push_back({{"form", form + ".l" + std::to_string(l)},
                            {"representation", r},
                            {"value", fine[l]},
                            {"selfConsistencyGap", detail::rel_gap(fine[l], coarse[l])},
                            {"nodes", nodes},
                            {"seed", seed}});
        return fine;
    };
    for (const auto& t : triples) {
        const Symmetry sym = common_symmetry({&t.f, &t.h, &t.eta});
        const auto& qt = s.trilinear;
        const std::size_t nt = count_pairs(outer_from(qt, sym, s.Rp, s.Rq)) * std::size_t(qt.planarOrder) * qt.planarOrder;
        const auto om = eval("trilinear." + t.name, "omega", qt,
                             [&](const QuadratureSpec& q) { return trilinear_omega_raw(t, ker, q, s.Rp, s.Rq); }, nt);
        const auto du = eval("trilinear." + t.name, "dual", qt,
                             [&](const QuadratureSpec& q) { return trilinear_dual_raw(t, ker, q, s.Rp, s.Rq); }, nt);
        const auto& qn = s.nterm;
        const Symmetry ns = common_symmetry({&t.f, &t.eta});
        const std::size_t nn = count_pairs(outer_from(qn, ns, s.nRp, s.nRq)) * std::size_t(qn.planarOrder) * qn.planarOrder;
        const auto no = eval("nterm." + t.name, "omega", qn,
                             [&](const QuadratureSpec& q) { return nterm_omega_raw(t.f, t.eta, ker, q, s.nRp, s.nRq); }, nn);
        const auto nc = eval("nterm." + t.name, "carleman", qn,
                             [&](const QuadratureSpec& q) {
                                 return nterm_carleman_raw(t.f, t.eta, ker, q, s.nRp, s.nRk, s.nRq);
                             },
                             nn);
        for (int l = 0; l < 2; ++l) {
            const std::string sfx = "." + t.name + ".l" + std::to_string(l);
            rep.check("representations.omega_vs_dual" + sfx, detail::rel_gap(om[l], du[l]), "<=", s.tol);
            rep.check("representations.omega_vs_carleman" + sfx, detail::rel_gap(no[l], nc[l]), "<=", s.tol);
        }
    }
    // centre-of-momentum reduction at a few pairs
    std::mt19937_64 rng(seed + 5);
    double worst = 0;
    for (int i = 0; i < 4; ++i) {
        const auto P = mass_shell_lift(detail::in_ball(rng, 2.0)), Q = mass_shell_lift(detail::in_ball(rng, 2.0));
        const auto r = com_reduction_check(P, Q, ker, s.comTheta, s.comPhi,
                                           [](const FourMomentum&, const FourMomentum&, const FourMomentum& pp,
                                              const FourMomentum& qq) { return juttner_p0(qq.p0) * (1.0 + pp.p[0]); });
        worst = std::max(worst, detail::rel_gap(r.second, r.first));
    }
    rep.check("representations.com_reduction", worst, "<=", 1e-6);
}

// ---------------------------------------------------------------- dyadic

inline void dyadic_scaling(Report& rep, const KernelSpec& ker, int order = 8, double width = 400.0) {
    QuadratureSpec q;
    q.radialOrder = q.sphereOrder = q.planarOrder = order;
    const double a = 1.0 / (width * width);
    const Triple t{TestFunction::gaussian(0.5), TestFunction::gaussian(a), TestFunction::gaussian(a), "wide"};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    auto& d = rep.data()["dyadic"] = nlohmann::ordered_json::array();
    for (int k = -3; k <= 3; ++k) {
        const double v = dyadic_T_minus_wide(k, t, ker, q, 4.0 * width)[0];
        const double y = std::log2(std::abs(v));
        d.push_back({{"k", k}, {"T", v}});
        sx += k;
        sy += y;
        sxx += k * k;
        sxy += k * y;
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.data()["dyadicSlope"] = slope;
    rep.check("dyadic.slope_minus_gamma", std::abs(slope - ker.gamma), "<=", 0.15);

    double C = 0;
    std::mt19937_64 rng(11);
    for (int k = -5; k <= 5; ++k)
        for (int i = 0; i < 4; ++i) {
            const auto pp = mass_shell_lift(detail::in_ball(rng, 5.0)), qq = mass_shell_lift(detail::in_ball(rng, 5.0));
            C = std::max(C, reduced_k2_bound(pp, qq, k, ker.gamma).ratio());
        }
    rep.data()["reducedK2Constant"] = C;
    rep.check("dyadic.reduced_k2_constant", C, "<=", 10.0);
}

// --------------------------------------------------------- counterexample

inline void counterexample(Report& rep, const Vec3& p, const std::vector<double>& Rs, const KernelSpec& ker,
                           int order = 16) {
    const auto r = zetaB_split(p, ker, Rs, order);
    rep.data()["counterexample"] = {{"p", {p[0], p[1], p[2]}},
                                    {"R", r.truncations},
                                    {"zetaB1", r.zetaB1},
                                    {"zetaB2", r.zetaB2}};
    // the settled piece is compared across the R = 10 -> 20 doubling when present
    double b1 = r.b1LastChange;
    for (std::size_t i = 1; i < Rs.size(); ++i)
        if (Rs[i - 1] == 10.0 && Rs[i] == 20.0) b1 = detail::rel_gap(r.zetaB1[i], r.zetaB1[i - 1]);
    rep.check("counterexample.zetaB1_change", b1, "<", 0.01);
    rep.check("counterexample.zetaB2_growth", r.growthFactor, ">=", 1.9);
}

// -------------------------------------------------------------- coercivity

inline void coercivity(Report& rep, const KernelSpec& ker, const QuadratureSpec& quad, double R = 30.0) {
    VolumeSpec v;
    v.R = 60.0;
    double lo = INFINITY, hi = 0, delta = INFINITY, worstNeg = 0;
    auto& rows = rep.data()["coercivity"] = nlohmann::ordered_json::array();
    for (const auto& f : default_family()) {
        // <Lf,f> = <Lm,m> with m = (I-P)f; evaluating on m avoids the
        // cancellation of the large hydrodynamic component
        const TestFunction m = micro_part(f, v);
        const auto D = dirichlet_form(m, ker, quad, R, R);
        const double nf = n_form(f, 0, ker, quad, R, R).total();
        const double nm = n_form(m, 0, ker, quad, R, R).total();
        const double fr = fractional_norm(f, ker.rho, ker.gamma, 0, v);
        const double ratio = nf / (fr * fr);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        delta = std::min(delta, D.value / nm);
        worstNeg = std::min(worstNeg, D.value / nf);
        rows.push_back({{"fId", f.name()}, {"dirichlet", D.value}, {"nForm", nf}, {"fractionalSq", fr * fr},
                        {"ratio", ratio}, {"dirichletSymmetric", D.symmetric}, {"nFormMicro", nm}});
    }
    rep.data()["band"] = {{"c", lo}, {"C", hi}};
    rep.data()["delta"] = delta;
    rep.check("coercivity.band_lower", lo, ">", 0.0);
    rep.check("coercivity.band_spread", hi / lo, "<", 100.0);
    rep.check("coercivity.dirichlet_nonnegative", worstNeg, ">=", -1e-8);
    rep.check("coercivity.delta", delta, ">", 0.0);
}

// ------------------------------------------------------ Littlewood-Paley

inline void littlewood_paley(Report& rep, const KernelSpec& ker, int J = 3, double R = 6.0,
                             const std::vector<TestFunction>& family = default_family()) {
    VolumeSpec v;
    v.R = 60.0;
    double C = 0, Cg = 0, drift = 0;
    auto& rows = rep.data()["lp"] = nlohmann::ordered_json::array();
    for (const auto& f : family) {
        RadialGrid g;
        g.R = R;
        const auto a = lp_inequality_ratio(f, ker.rho, ker.gamma, J, 1, g, v);
        const auto b = lp_inequality_ratio(f, ker.rho, ker.gamma, J + 2, 1, g, v);
        C = std::max({C, a.ratio(), b.ratio()});
        Cg = std::max({Cg, a.ratioGrad(), b.ratioGrad()});
        drift = std::max({drift, detail::rel_gap(a.ratio(), b.ratio()), detail::rel_gap(a.ratioGrad(), b.ratioGrad())});
        rows.push_back({{"fId", f.name()}, {"jmax", J}, {"ratio", a.ratio()}, {"ratioGrad", a.ratioGrad()},
                        {"ratioJ2", b.ratio()}, {"ratioGradJ2", b.ratioGrad()}});
    }
    rep.data()["lpConstant"] = C;
    rep.data()["lpGradConstant"] = Cg;
    rep.check("lp.constant_finite", std::max(C, Cg), "<", 1e3);
    rep.check("lp.stability", drift, "<=", 0.2);
}

} // namespace relkin::suites
