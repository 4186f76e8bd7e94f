#pragma once

#include <relkin/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>
#include <vector>

namespace relkin {

struct QuadratureSpec {
    int radialOrder = 24;
    int sphereOrder = 24;
    int planarOrder = 16;
    double truncationR = 12.0;
    std::int64_t mcSamples = 0;
    std::uint64_t seed = 7;
    double tol = 1e-6;
    int threads = 1;

    QuadratureSpec doubled() const {
        QuadratureSpec q = *this;
        q.radialOrder *= 2;
        q.sphereOrder *= 2;
        q.planarOrder *= 2;
        return q;
    }
    QuadratureSpec scaled(double f) const {
        QuadratureSpec q = *this;
        auto up = [f](int n) { return std::max(2, int(std::lround(n * f))); };
        q.radialOrder = up(radialOrder);
        q.sphereOrder = up(sphereOrder);
        q.planarOrder = up(planarOrder);
        return q;
    }
};

// Compensated (Neumaier) accumulator.
struct NeumaierSum {
    double s = 0, c = 0;
    void add(double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x)) c += (s - t) + x;
        else c += (x - t) + s;
        s = t;
    }
    NeumaierSum& operator+=(double x) { add(x); return *this; }
    double value() const { return s + c; }
};

struct Rule {
    std::vector<double> x, w;
    std::size_t size() const { return x.size(); }
};

namespace detail {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights come from
// the first eigenvector components.
inline Rule golub_welsch(const std::vector<double>& a, const std::vector<double>& b, double mu0) {
    const int n = int(a.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) T(i, i) = a[i];
    for (int i = 0; i + 1 < n; ++i) T(i, i + 1) = T(i + 1, i) = b[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        r.x[i] = es.eigenvalues()(i);
        double v = es.eigenvectors()(0, i);
        r.w[i] = mu0 * v * v;
    }
    return r;
}

// Newton polish of Legendre nodes; weights from the derivative.
inline void legendre_polish(Rule& r) {
    const int n = int(r.x.size());
    for (int i = 0; i < n; ++i) {
        double x = r.x[i], dp = 0;
        for (int it = 0; it < 4; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) { p1 = x; p0 = 1; }
            dp = n * (x * p1 - p0) / (x * x - 1);
            x -= p1 / dp;
        }
        r.x[i] = x;
        r.w[i] = 2.0 / ((1 - x * x) * dp * dp);
    }
}

} // namespace detail

// Gauss-Legendre on [-1, 1]; cached per order.
inline const Rule& gauss_legendre(int n) {
    static std::mutex m;
    static std::map<int, Rule> cache;
    std::lock_guard<std::mutex> lk(m);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> a(n, 0.0), b(std::max(0, n - 1));
    for (int k = 1; k < n; ++k) b[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
    Rule r = detail::golub_welsch(a, b, 2.0);
    if (n > 1) detail::legendre_polish(r);
    return cache.emplace(n, std::move(r)).first->second;
}

// Gauss-Jacobi for the weight x^alpha on [0, 1], alpha > -1.
inline const Rule& gauss_jacobi01(int n, double alpha) {
    static std::mutex m;
    static std::map<std::pair<int, double>, Rule> cache;
    std::lock_guard<std::mutex> lk(m);
    auto key = std::make_pair(n, alpha);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    // Jacobi weight (1-t)^0 (1+t)^alpha on [-1,1], then x = (1+t)/2.
    const double A = 0.0, B = alpha;
    std::vector<double> a(n), b(std::max(0, n - 1));
    for (int k = 0; k < n; ++k) {
        double d = 2.0 * k + A + B;
        a[k] = k == 0 ? (B - A) / (A + B + 2.0) : (B * B - A * A) / (d * (d + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        double d = 2.0 * k + A + B;
        b[k - 1] = std::sqrt(4.0 * k * (k + A) * (k + B) * (k + A + B) / (d * d * (d + 1.0) * (d - 1.0)));
    }
    const double mu0 = std::pow(2.0, A + B + 1.0) * std::tgamma(A + 1.0) * std::tgamma(B + 1.0) / std::tgamma(A + B + 2.0);
    Rule r = detail::golub_welsch(a, b, mu0);
    const double scale = std::pow(0.5, 1.0 + alpha);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r.x[i] = 0.5 * (1.0 + r.x[i]);
        r.w[i] *= scale;
    }
    return cache.emplace(key, std::move(r)).first->second;
}

// Gauss-Legendre mapped to [a, b].
inline Rule gl_interval(int n, double a, double b) {
    const Rule& r = gauss_legendre(n);
    Rule o;
    o.x.resize(n);
    o.w.resize(n);
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        o.x[i] = c + h * r.x[i];
        o.w[i] = h * r.w[i];
    }
    return o;
}

// Composite Gauss-Legendre over consecutive breakpoints.
inline Rule gl_composite(int n, const std::vector<double>& brk) {
    Rule o;
    for (std::size_t k = 0; k + 1 < brk.size(); ++k) {
        if (!(brk[k + 1] > brk[k])) continue;
        Rule r = gl_interval(n, brk[k], brk[k + 1]);
        o.x.insert(o.x.end(), r.x.begin(), r.x.end());
        o.w.insert(o.w.end(), r.w.begin(), r.w.end());
    }
    return o;
}

// Uniform trapezoid on a full period; spectrally accurate for periodic integrands.
inline Rule periodic(int n, double period = 2.0 * std::numbers::pi, double offset = 0.0) {
    Rule o;
    o.x.resize(n);
    o.w.assign(n, period / n);
    for (int i = 0; i < n; ++i) o.x[i] = offset + period * (i + 0.5) / n;
    return o;
}

// Deterministic parallel sum of f(i), i in [0, n). Chunks are fixed, each is
// accumulated with a compensated sum and chunk totals are combined in index
// order, so the result does not depend on the worker count.
template <class F>
double parallel_sum(std::size_t n, F&& f, int threads = 1, std::size_t chunk = 64) {
    const std::size_t nch = (n + chunk - 1) / chunk;
    std::vector<double> part(nch, 0.0);
    auto work = [&](std::size_t c) {
        NeumaierSum s;
        const std::size_t e = std::min(n, (c + 1) * chunk);
        for (std::size_t i = c * chunk; i < e; ++i) s.add(f(i));
        part[c] = s.value();
    };
    if (threads <= 1 || nch <= 1) {
        for (std::size_t c = 0; c < nch; ++c) work(c);
    } else {
        std::vector<std::thread> pool;
        const int T = std::min<int>(threads, int(nch));
        for (int t = 0; t < T; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t c = t; c < nch; c += T) work(c);
            });
        for (auto& th : pool) th.join();
    }
    NeumaierSum tot;
    for (double v : part) tot.add(v);
    return tot.value();
}

// Vector-valued variant: f(i, acc) adds into acc (size m).
template <class F>
std::vector<double> parallel_sum_vec(std::size_t n, std::size_t m, F&& f, int threads = 1, std::size_t chunk = 64) {
    const std::size_t nch = (n + chunk - 1) / chunk;
    std::vector<std::vector<double>> part(nch, std::vector<double>(m, 0.0));
    auto work = [&](std::size_t c) {
        std::vector<NeumaierSum> s(m);
        std::vector<double> acc(m);
        const std::size_t e = std::min(n, (c + 1) * chunk);
        for (std::size_t i = c * chunk; i < e; ++i) {
            std::fill(acc.begin(), acc.end(), 0.0);
            f(i, acc);
            for (std::size_t k = 0; k < m; ++k) s[k].add(acc[k]);
        }
        for (std::size_t k = 0; k < m; ++k) part[c][k] = s[k].value();
    };
    if (threads <= 1 || nch <= 1) {
        for (std::size_t c = 0; c < nch; ++c) work(c);
    } else {
        std::vector<std::thread> pool;
        const int T = std::min<int>(threads, int(nch));
        for (int t = 0; t < T; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t c = t; c < nch; c += T) work(c);
            });
        for (auto& th : pool) th.join();
    }
    std::vector<NeumaierSum> tot(m);
    for (auto& p : part)
        for (std::size_t k = 0; k < m; ++k) tot[k].add(p[k]);
    std::vector<double> out(m);
    for (std::size_t k = 0; k < m; ++k) out[k] = tot[k].value();
    return out;
}

inline int default_threads() {
    unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1 : int(h);
}

} // namespace relkin
