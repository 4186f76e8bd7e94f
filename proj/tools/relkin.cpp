#include <relkin/config.hpp>
#include <relkin/suites.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace relkin;
namespace fs = std::filesystem;

namespace {

// Settings shared by every subcommand. --kernel and --quad accept either a
// config file path or an inline list such as "hard,a=0,gamma=0.5".
struct Common {
    std::string config, kernel, quad, out, format;
    std::uint64_t seed = 7;
    int threads = 1;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "INI-style run configuration");
    app->add_option("--kernel", c.kernel, "kernel config file or inline list");
    app->add_option("--quad", c.quad, "quadrature config file or inline list");
    app->add_option("--seed", c.seed, "RNG seed");
    app->add_option("--threads", c.threads, "worker threads");
    app->add_option("--out", c.out, "report path");
    app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void apply_source(RunConfig& rc, const std::string& section, const std::string& v) {
    if (v.empty()) return;
    if (fs::is_regular_file(v)) rc = load_config(v, rc);
    else apply_list(rc, section, v);
}

RunConfig resolve(const Common& c, const CLI::App* app, const RunConfig& defaults) {
    RunConfig rc = defaults;
    if (!c.config.empty()) rc = load_config(c.config, rc);
    apply_source(rc, "kernel", c.kernel);
    apply_source(rc, "quad", c.quad);
    if (app->count("--seed")) apply_key(rc, "run.seed", std::to_string(c.seed));
    if (app->count("--threads")) apply_key(rc, "run.threads", std::to_string(c.threads));
    if (!c.out.empty()) rc.out = c.out;
    if (!c.format.empty()) rc.format = c.format;
    else if (rc.out.size() > 4 && rc.out.substr(rc.out.size() - 4) == ".csv") rc.format = "csv";
    rc.quad.seed = rc.seed;
    rc.quad.threads = rc.threads;
    rc.kernel.validate();
    return rc;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(relkin::detail::to_double(what, relkin::detail::trim(item)));
    return v;
}

Vec3 parse_vec3(const std::string& s, const char* what) {
    const auto v = parse_list(s, what);
    if (v.size() != 3) throw ConfigError(std::string(what) + " needs three comma-separated components");
    return Vec3(v[0], v[1], v[2]);
}

GridSpec parse_grid(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) v.push_back(relkin::detail::to_double("--grid", item));
    if (v.size() != 3 || !(v[2] > 0) || !(v[1] >= v[0])) throw ConfigError("--grid expects lo:hi:step with step > 0");
    return {v[0], v[1], v[2]};
}

std::string table_csv(const nlohmann::ordered_json& rows) {
    std::ostringstream o;
    if (rows.empty()) return "";
    bool first = true;
    for (const auto& [k, _] : rows.front().items()) {
        o << (first ? "" : ",") << k;
        first = false;
    }
    o << "\n";
    for (const auto& r : rows) {
        first = true;
        for (const auto& [_, v] : r.items()) {
            o << (first ? "" : ",") << (v.is_string() ? v.get<std::string>() : v.dump());
            first = false;
        }
        o << "\n";
    }
    return o.str();
}

// Writes the report (a table when one is given and CSV is requested) and
// returns the exit status.
int finish(const Report& rep, const RunConfig& rc, const std::string& suite, const nlohmann::ordered_json* table = nullptr) {
    const std::string path = rc.out.empty() ? suite + "." + rc.format : rc.out;
    if (rc.format == "csv" && table) {
        std::ofstream f(path);
        if (!f) throw ConfigError("cannot write report to '" + path + "'");
        f << table_csv(*table);
    } else {
        rep.write(path, rc.format);
    }
    for (const auto& c : rep.checks())
        std::cout << (c.pass ? "ok   " : "FAIL ") << c.name << " = " << c.value << " (" << c.relation << " "
                  << c.threshold << ")\n";
    std::cout << "report: " << path << "\n";
    return rep.passed() ? 0 : 1;
}

int aggregate(const std::string& dir, const std::vector<std::string>& files, const std::string& out) {
    std::vector<fs::path> paths;
    if (files.empty()) {
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_regular_file() && e.path().extension() == ".json") paths.push_back(e.path());
    } else {
        for (const auto& f : files) paths.emplace_back(f);
    }
    std::sort(paths.begin(), paths.end());
    nlohmann::ordered_json sum;
    sum["schemaVersion"] = kSchemaVersion;
    sum["suite"] = "report";
    auto& arr = sum["reports"] = nlohmann::ordered_json::array();
    bool all = true;
    for (const auto& p : paths) {
        if (fs::weakly_canonical(p) == fs::weakly_canonical(fs::path(out))) continue;
        std::ifstream f(p);
        nlohmann::ordered_json j;
        try {
            f >> j;
        } catch (const std::exception&) {
            continue;
        }
        if (!j.is_object() || !j.contains("schemaVersion") || !j.contains("suite") || j["suite"] == "report") continue;
        int nFail = 0;
        for (const auto& c : j["checks"])
            if (!c["pass"].get<bool>()) ++nFail;
        const bool ok = j.value("passed", false);
        all = all && ok;
        arr.push_back({{"file", p.filename().string()}, {"suite", j["suite"]}, {"passed", ok},
                       {"checks", j["checks"].size()}, {"failures", nFail}});
        std::cout << (ok ? "PASS " : "FAIL ") << j["suite"].get<std::string>() << "  " << p.filename().string() << "\n";
    }
    if (arr.empty()) throw ConfigError("no JSON reports found to aggregate");
    sum["passed"] = all;
    std::ofstream f(out);
    if (!f) throw ConfigError("cannot write summary to '" + out + "'");
    f << sum.dump(2) << "\n";
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"relkin: numerics for the relativistic Boltzmann collision operator"};
    app.require_subcommand(1);

    Common cg, cr, cc, co, cn, cj, cx;

    auto* geo = app.add_subcommand("geometry", "conservation, Lorentz frame, Jacobian and pointwise suites");
    add_common(geo, cg);
    double nGeo = 1e6;
    geo->add_option("--n", nGeo, "random samples");

    auto* rep = app.add_subcommand("representations", "omega, dual and Carleman forms side by side");
    add_common(rep, cr);
    double eps = 0.2, repTol = 1e-4;
    int nTriples = 3;
    bool withDyadic = false;
    rep->add_option("--eps", eps, "angular cutoff");
    rep->add_option("--triples", nTriples, "how many of the built-in triples to run")->check(CLI::Range(1, 3));
    rep->add_option("--tol", repTol, "relative agreement threshold");
    rep->add_flag("--dyadic", withDyadic, "also run the dyadic scaling checks");

    auto* con = app.add_subcommand("conservation", "equilibrium, collision invariants, entropy and hydrodynamics");
    add_common(con, cc);
    double alpha = 0.8, conEps = 0.1;
    con->add_option("--alpha", alpha, "Gaussian exponent of F");
    con->add_option("--eps", conEps, "angular cutoff");
    bool skipMomentum = false;
    con->add_flag("--skip-momentum", skipMomentum, "skip the off-centre momentum check (about 100 s)");

    auto* coe = app.add_subcommand("coercivity", "Dirichlet form against the norm over a test family");
    add_common(coe, co);
    std::string family = "default10";
    coe->add_option("--family", family)->check(CLI::IsMember({"default10"}));

    auto* nor = app.add_subcommand("norms", "Littlewood-Paley ratios against the fractional norm");
    add_common(nor, cn);
    std::string fId = "default10";
    double rho = 0.0, gamma = 0.5;
    int jmax = 3;
    nor->add_option("--f", fId, "default10 or a member name");
    nor->add_option("--rho", rho);
    nor->add_option("--gamma", gamma);
    nor->add_option("--jmax", jmax);

    auto* jac = app.add_subcommand("jacobian-scan", "|dp'/dp| over a cubic grid");
    add_common(jac, cj);
    std::string qS = "0.5,-0.2,0.1", wS = "0,0,1", gridS = "-5:5:0.5";
    bool extended = false;
    jac->add_option("--q", qS);
    jac->add_option("--omega", wS);
    jac->add_option("--grid", gridS, "lo:hi:step");
    jac->add_flag("--extended", extended, "long double finite differences");

    auto* cex = app.add_subcommand("counterexample", "split of the zeta weight under truncation");
    add_common(cex, cx);
    std::string pS = "0,0,0", RS = "5,10,20,40";
    int cxOrder = 16;
    cex->add_option("--p", pS);
    cex->add_option("--R", RS);
    cex->add_option("--order", cxOrder);

    auto* agg = app.add_subcommand("report", "aggregate JSON reports");
    bool all = false;
    std::string dir = ".", aggOut = "summary.json";
    std::vector<std::string> files;
    agg->add_flag("--all", all, "aggregate every JSON report in --dir");
    agg->add_option("--dir", dir);
    agg->add_option("--out", aggOut);
    agg->add_option("files", files);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*geo) {
            RunConfig rc = resolve(cg, geo, {});
            Report r("geometry", rc);
            const auto n = std::size_t(nGeo);
            suites::conservation_laws(r, rc.seed, n);
            suites::lorentz_frame(r, rc.seed, std::max<std::size_t>(1, n / 10));
            suites::jacobian_agreement(r, rc.seed, std::max<std::size_t>(1, n / 1000));
            suites::pointwise(r, rc.seed, n);
            return finish(r, rc, "geometry");
        }
        if (*rep) {
            RunConfig d;
            d.kernel = KernelSpec::hard(0.0, 0.5);
            RunConfig rc = resolve(cr, rep, d);
            rc.kernel.epsilon = eps;
            rc.kernel.validate();
            auto s = suites::default_representation_settings(rc.quad);
            if (rep->count("--quad")) s.trilinear = s.nterm = rc.quad;
            s.tol = repTol;
            auto triples = suites::representation_triples();
            triples.resize(std::size_t(nTriples));
            Report r("representations", rc);
            suites::representations(r, rc.kernel, s, triples, rc.seed);
            if (withDyadic) {
                KernelSpec k = rc.kernel;
                k.epsilon = 0.0;
                suites::dyadic_scaling(r, k);
            }
            return finish(r, rc, "representations", &r.data()["forms"]);
        }
        if (*con) {
            RunConfig d;
            d.kernel = KernelSpec::hard(0.0, 0.5);
            RunConfig rc = resolve(cc, con, d);
            rc.kernel.epsilon = conEps;
            rc.kernel.validate();
            Report r("conservation", rc);
            suites::equilibrium(r);
            suites::collision_invariants(r, rc.kernel, rc.quad, alpha);
            if (!skipMomentum) suites::momentum_invariant(r, rc.kernel, {}, rc.threads);
            suites::hydrodynamics(r);
            return finish(r, rc, "conservation", &r.data()["moments"]);
        }
        if (*coe) {
            RunConfig d;
            d.kernel = KernelSpec::hard(0.0, 0.5);
            d.quad.radialOrder = d.quad.sphereOrder = d.quad.planarOrder = 12;
            RunConfig rc = resolve(co, coe, d);
            Report r("coercivity", rc);
            suites::coercivity(r, rc.kernel, rc.quad);
            return finish(r, rc, "coercivity", &r.data()["coercivity"]);
        }
        if (*nor) {
            RunConfig d;
            d.kernel = KernelSpec::hard(rho, gamma);
            RunConfig rc = resolve(cn, nor, d);
            if (nor->count("--rho")) rc.kernel.rho = rho;
            if (nor->count("--gamma")) rc.kernel.gamma = gamma;
            rc.kernel.validate();
            std::vector<TestFunction> fam;
            for (const auto& f : default_family())
                if (fId == "default10" || f.name() == fId) fam.push_back(f);
            if (fam.empty()) throw ConfigError("unknown family member '" + fId + "'");
            Report r("norms", rc);
            suites::littlewood_paley(r, rc.kernel, jmax, 6.0, fam);
            return finish(r, rc, "norms", &r.data()["lp"]);
        }
        if (*jac) {
            RunConfig d;
            d.format = "csv";
            RunConfig rc = resolve(cj, jac, d);
            const Vec3 q = parse_vec3(qS, "--q"), w = parse_vec3(wS, "--omega");
            if (!(norm(w) > 0)) throw ConfigError("--omega must be nonzero");
            const auto s = jacobian_scan(q, w, parse_grid(gridS), extended);
            Report r("jacobian-scan", rc);
            auto& rows = r.data()["rows"] = nlohmann::ordered_json::array();
            for (const auto& row : s.rows) rows.push_back({{"p1", row.p[0]}, {"p2", row.p[1]}, {"p3", row.p[2]}, {"det", row.det}});
            r.data()["minAbsDet"] = s.minAbs;
            r.data()["argmin"] = {s.argmin[0], s.argmin[1], s.argmin[2]};
            r.data()["belowThreshold"] = s.belowThreshold;
            r.data()["skipped"] = s.skipped;
            std::size_t finite = 0;
            for (const auto& row : s.rows) finite += std::isfinite(row.det) ? 1 : 0;
            r.check("jacobian_scan.nonfinite", double(s.rows.size() - finite), "==", 0.0);
            return finish(r, rc, "jacobian-scan", &r.data()["rows"]);
        }
        if (*cex) {
            RunConfig d;
            d.kernel = KernelSpec::soft(1.5, 0.25);
            RunConfig rc = resolve(cx, cex, d);
            Report r("counterexample", rc);
            suites::counterexample(r, parse_vec3(pS, "--p"), parse_list(RS, "--R"), rc.kernel, cxOrder);
            return finish(r, rc, "counterexample");
        }
        if (*agg) {
            if (!all && files.empty()) throw ConfigError("report needs --all or a list of JSON files");
            return aggregate(dir, all ? std::vector<std::string>{} : files, aggOut);
        }
    } catch (const ConfigError& e) {
        std::cerr << "relkin: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "relkin: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
