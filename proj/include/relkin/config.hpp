#pragma once

#include <relkin/errors.hpp>
#include <relkin/kernels.hpp>
#include <relkin/quadrature.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace relkin {

// Flat key/value configuration. Keys are "section.name"; a file may group
// them under [section] headers. Anything after '#' or ';' is a comment.
struct RunConfig {
    KernelSpec kernel;
    QuadratureSpec quad;
    std::string suite;
    std::string out;
    std::string format = "json";
    std::uint64_t seed = 7;
    int threads = 1;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad number for " + key + ": '" + v + "'");
    }
}

inline long long to_int(const std::string& key, const std::string& v) {
    // accept 1e6 style counts as long as they are integral
    const double x = to_double(key, v);
    if (x != std::floor(x)) throw ConfigError("expected an integer for " + key + ": '" + v + "'");
    return static_cast<long long>(x);
}

inline std::string fmt(double x) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

} // namespace detail

inline void apply_key(RunConfig& c, const std::string& rawKey, const std::string& rawVal) {
    const std::string key = detail::trim(rawKey), v = detail::trim(rawVal);
    auto& k = c.kernel;
    auto& q = c.quad;
    if (key == "kernel.family") {
        if (v == "hard") k.family = Family::Hard;
        else if (v == "soft") k.family = Family::Soft;
        else throw ConfigError("kernel.family must be hard or soft, got '" + v + "'");
    } else if (key == "kernel.rho") k.rho = detail::to_double(key, v);
    else if (key == "kernel.a") k.rho = detail::to_double(key, v);
    else if (key == "kernel.b") k.rho = -detail::to_double(key, v);
    else if (key == "kernel.gamma") k.gamma = detail::to_double(key, v);
    else if (key == "kernel.cphi") k.cPhi = detail::to_double(key, v);
    else if (key == "kernel.epsilon") k.epsilon = detail::to_double(key, v);
    else if (key == "kernel.angular") {
        if (v == "canonical") k.angularModel = AngularModel::Canonical;
        else if (v == "constant") k.angularModel = AngularModel::Constant;
        else throw ConfigError("kernel.angular must be canonical or constant, got '" + v + "'");
    } else if (key == "kernel.kmin") k.kMin = int(detail::to_int(key, v));
    else if (key == "kernel.kmax") k.kMax = int(detail::to_int(key, v));
    else if (key == "quad.radial") q.radialOrder = int(detail::to_int(key, v));
    else if (key == "quad.sphere") q.sphereOrder = int(detail::to_int(key, v));
    else if (key == "quad.planar") q.planarOrder = int(detail::to_int(key, v));
    else if (key == "quad.R") q.truncationR = detail::to_double(key, v);
    else if (key == "quad.mc") q.mcSamples = detail::to_int(key, v);
    else if (key == "quad.tol") q.tol = detail::to_double(key, v);
    else if (key == "run.suite") c.suite = v;
    else if (key == "run.out") c.out = v;
    else if (key == "run.format") {
        if (v != "json" && v != "csv") throw ConfigError("run.format must be json or csv");
        c.format = v;
    } else if (key == "run.seed") c.seed = std::uint64_t(detail::to_int(key, v));
    else if (key == "run.threads") c.threads = int(detail::to_int(key, v));
    else throw ConfigError("unknown configuration key '" + key + "'");
    if (key == "run.seed") q.seed = c.seed;
    if (key == "run.threads") q.threads = c.threads;
}

// "rho=0,gamma=0.5" applied under a section prefix.
inline void apply_list(RunConfig& c, const std::string& section, const std::string& list) {
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = detail::trim(item);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            // bare "hard"/"soft" selects the family
            if (section == "kernel") apply_key(c, "kernel.family", item);
            else throw ConfigError("expected key=value in '" + item + "'");
            continue;
        }
        apply_key(c, section + "." + item.substr(0, eq), item.substr(eq + 1));
    }
}

inline RunConfig parse_config_text(const std::string& text, RunConfig c = {}) {
    std::istringstream in(text);
    std::string line, section;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(n) + ": unterminated section");
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(n) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
        apply_key(c, key, line.substr(eq + 1));
    }
    return c;
}

inline RunConfig load_config(const std::string& path, RunConfig c = {}) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), c);
}

inline std::string to_config_text(const RunConfig& c) {
    using detail::fmt;
    const auto& k = c.kernel;
    const auto& q = c.quad;
    std::ostringstream o;
    o << "[kernel]\n"
      << "family = " << (k.family == Family::Hard ? "hard" : "soft") << "\n"
      << "rho = " << fmt(k.rho) << "\n"
      << "gamma = " << fmt(k.gamma) << "\n"
      << "cphi = " << fmt(k.cPhi) << "\n"
      << "epsilon = " << fmt(k.epsilon) << "\n"
      << "angular = " << (k.angularModel == AngularModel::Canonical ? "canonical" : "constant") << "\n"
      << "kmin = " << k.kMin << "\n"
      << "kmax = " << k.kMax << "\n"
      << "[quad]\n"
      << "radial = " << q.radialOrder << "\n"
      << "sphere = " << q.sphereOrder << "\n"
      << "planar = " << q.planarOrder << "\n"
      << "R = " << fmt(q.truncationR) << "\n"
      << "mc = " << q.mcSamples << "\n"
      << "tol = " << fmt(q.tol) << "\n"
      << "[run]\n";
    if (!c.suite.empty()) o << "suite = " << c.suite << "\n";
    if (!c.out.empty()) o << "out = " << c.out << "\n";
    o << "format = " << c.format << "\n"
      << "seed = " << c.seed << "\n"
      << "threads = " << c.threads << "\n";
    return o.str();
}

inline bool operator==(const KernelSpec& a, const KernelSpec& b) {
    return a.family == b.family && a.rho == b.rho && a.gamma == b.gamma && a.cPhi == b.cPhi && a.epsilon == b.epsilon &&
           a.angularModel == b.angularModel && a.kMin == b.kMin && a.kMax == b.kMax;
}

inline bool operator==(const QuadratureSpec& a, const QuadratureSpec& b) {
    return a.radialOrder == b.radialOrder && a.sphereOrder == b.sphereOrder && a.planarOrder == b.planarOrder &&
           a.truncationR == b.truncationR && a.mcSamples == b.mcSamples && a.seed == b.seed && a.tol == b.tol &&
           a.threads == b.threads;
}

inline bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.kernel == b.kernel && a.quad == b.quad && a.suite == b.suite && a.out == b.out && a.format == b.format &&
           a.seed == b.seed && a.threads == b.threads;
}

} // namespace relkin
