// Acceptance driver: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Wall-clock limits are enforced here and kept out of the
// reports so that the reports stay reproducible.

#include <relkin/suites.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

using namespace relkin;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string failures(const Report& r) {
    std::string s;
    for (const auto& c : r.checks())
        if (!c.pass) {
            char buf[160];
            std::snprintf(buf, sizeof buf, " [%s=%.3g %s %.3g]", c.name.c_str(), c.value, c.relation.c_str(), c.threshold);
            s += buf;
        }
    return s;
}

struct Tally {
    int pass = 0, fail = 0;
};

// Runs one criterion. `limit` is a wall-clock budget in seconds (0 = none).
void criterion(Tally& t, int id, const std::string& title, double limit, const std::function<void(Report&)>& body,
               const std::function<std::string(const Report&)>& note = {}) {
    RunConfig cfg;
    Report r(title, cfg);
    const auto t0 = std::chrono::steady_clock::now();
    std::string err;
    try {
        body(r);
    } catch (const std::exception& e) {
        err = std::string(" [exception: ") + e.what() + "]";
    }
    const double dt = seconds_since(t0);
    const bool timeOk = limit <= 0 || dt < limit;
    const bool ok = err.empty() && r.passed() && timeOk && !r.checks().empty();
    std::printf("%s %2d %-34s %7.1fs%s%s%s%s\n", ok ? "PASS" : "FAIL", id, title.c_str(), dt,
                note && err.empty() ? (" " + note(r)).c_str() : "", failures(r).c_str(), err.c_str(),
                timeOk ? "" : " [over time budget]");
    std::fflush(stdout);
    (ok ? t.pass : t.fail)++;
}

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt2(const char* f, double a, double b) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

double check_value(const Report& r, const std::string& name) {
    for (const auto& c : r.checks())
        if (c.name == name) return c.value;
    return NAN;
}

} // namespace

int main() {
    constexpr std::uint64_t seed = 7;
    Tally t;

    criterion(t, 1, "geometry conservation", 10.0, [&](Report& r) { suites::conservation_laws(r, seed, 1000000); },
              [](const Report& r) {
                  return fmt2("mom=%.2e en=%.2e", check_value(r, "conservation.momentum"),
                              check_value(r, "conservation.energy"));
              });

    criterion(t, 2, "lorentz frame", 0, [&](Report& r) { suites::lorentz_frame(r, seed, 100000); },
              [](const Report& r) {
                  return fmt2("cond=%.2e iso=%.2e", check_value(r, "lorentz.condition_over_sqrt_s"),
                              check_value(r, "lorentz.isometry"));
              });

    criterion(t, 3, "jacobian analytic vs fd", 0, [&](Report& r) { suites::jacobian_agreement(r, seed, 1000); },
              [](const Report& r) { return fmt("rel=%.2e", check_value(r, "jacobian.analytic_vs_fd")); });

    criterion(t, 4, "pointwise inequality suite", 0, [&](Report& r) { suites::pointwise(r, seed, 1000000); },
              [](const Report& r) { return fmt("violations=%.0f", check_value(r, "pointwise.violations")); });

    criterion(t, 5, "equilibrium", 0, [&](Report& r) { suites::equilibrium(r); },
              [](const Report& r) {
                  return fmt2("mass=%.1e k2=%.1e", check_value(r, "equilibrium.unit_mass"),
                              check_value(r, "equilibrium.k2_at_1"));
              });

    // default quadrature, cutoff 0.1
    criterion(t, 6, "collision invariants and entropy", 300.0,
              [&](Report& r) {
                  const auto k = KernelSpec::hard(0.0, 0.5, 0.1);
                  suites::collision_invariants(r, k, QuadratureSpec{});
                  suites::momentum_invariant(r, k);
              },
              [](const Report& r) {
                  return fmt2("energy=%.1e p3=%.1e", check_value(r, "invariants.p0"),
                              check_value(r, "invariants.axial.p3")) +
                         fmt(" entropy=%.2e", check_value(r, "invariants.entropy"));
              });

    criterion(t, 7, "representation equivalence", 900.0,
              [&](Report& r) {
                  const auto s = suites::default_representation_settings(QuadratureSpec{});
                  suites::representations(r, KernelSpec::hard(0.0, 0.5, 0.2), s, suites::representation_triples(), seed);
              },
              [](const Report& r) {
                  double w = 0;
                  for (const auto& c : r.checks()) w = std::max(w, c.value);
                  return fmt("worstGap=%.2e", w);
              });

    criterion(t, 8, "dyadic scaling", 0, [&](Report& r) { suites::dyadic_scaling(r, KernelSpec::hard(0.0, 0.5)); },
              [](Report r) {
                  return fmt2("slope=%.4f C=%.4f", r.data()["dyadicSlope"].get<double>(),
                              r.data()["reducedK2Constant"].get<double>());
              });

    criterion(t, 9, "counterexample", 0,
              [&](Report& r) { suites::counterexample(r, Vec3(0, 0, 0), {5, 10, 20, 40}, KernelSpec::soft(1.5, 0.25)); },
              [](const Report& r) {
                  return fmt2("b1change=%.2e growth=%.3f", check_value(r, "counterexample.zetaB1_change"),
                              check_value(r, "counterexample.zetaB2_growth"));
              });

    criterion(t, 10, "coercivity", 0,
              [&](Report& r) {
                  QuadratureSpec q;
                  q.radialOrder = q.sphereOrder = q.planarOrder = 12;
                  suites::coercivity(r, KernelSpec::hard(0.0, 0.5), q);
              },
              [](Report r) {
                  return fmt2("spread=%.2f delta=%.4f", check_value(r, "coercivity.band_spread"),
                              r.data()["delta"].get<double>());
              });

    criterion(t, 11, "littlewood-paley", 0, [&](Report& r) { suites::littlewood_paley(r, KernelSpec::hard(0.0, 0.5), 3); },
              [](Report r) {
                  return fmt2("C=%.4f drift=%.2e", std::max(r.data()["lpConstant"].get<double>(),
                                                            r.data()["lpGradConstant"].get<double>()),
                              check_value(r, "lp.stability"));
              });

    criterion(t, 12, "hydrodynamics", 0, [&](Report& r) { suites::hydrodynamics(r); },
              [](Report r) {
                  return fmt2("mu1=%.4f mu3=%.4f", r.data()["mu"]["mu1"].get<double>(), r.data()["mu"]["mu3"].get<double>());
              });

    // Two identical runs of a mixed suite, compared byte for byte without the
    // timestamp. The collision moments go through the threaded reduction.
    criterion(t, 13, "determinism", 0, [&](Report& r) {
        auto once = [&](int threads) {
            RunConfig cfg;
            cfg.seed = seed;
            cfg.threads = threads;
            cfg.quad.threads = threads;
            cfg.quad.radialOrder = cfg.quad.sphereOrder = cfg.quad.planarOrder = 8;
            Report x("determinism", cfg);
            suites::conservation_laws(x, seed, 20000);
            suites::pointwise(x, seed, 20000);
            suites::collision_invariants(x, KernelSpec::hard(0.0, 0.5, 0.1), cfg.quad, 0.8, 5.0, 6.0);
            suites::lorentz_frame(x, seed, 2000);
            return x.to_json(false).dump();
        };
        for (int threads : {1, 2}) {
            const std::string a = once(threads), b = once(threads);
            r.check("determinism.identical_threads" + std::to_string(threads), a == b ? 1.0 : 0.0, "==", 1.0);
        }
    });

    std::printf("%d passed, %d failed\n", t.pass, t.fail);
    return t.fail == 0 ? 0 : 1;
}
