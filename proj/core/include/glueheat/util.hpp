#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace glueheat {

inline constexpr double pi = 3.14159265358979323846;
// surface measure of the unit sphere S^5 in R^6
inline constexpr double s5_area = pi * pi * pi;

inline double sq(double x) { return x * x; }

// <y> = sqrt(1+|y|^2)
inline double jbracket(double y) { return std::sqrt(1.0 + y * y); }

// Worker cap from GLUEHEAT_THREADS (default: hardware concurrency).
inline unsigned max_workers() {
    if (const char* env = std::getenv("GLUEHEAT_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1u;
}

// Index-space parallel for. Results must be written to preallocated
// per-index slots so output order is deterministic.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    unsigned workers = std::min<std::size_t>(max_workers(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

inline std::vector<double> geomspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(llo + (lhi - llo) * double(i) / double(n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * double(i) / double(n - 1);
    return out;
}

// Least-squares slope of y vs x with rms residual.
struct line_fit {
    double slope = 0, intercept = 0, resid_rms = 0;
};

inline line_fit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    line_fit f;
    double det = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i)
        ss += sq(y[i] - f.slope * x[i] - f.intercept);
    f.resid_rms = std::sqrt(ss / n);
    return f;
}

} // namespace glueheat
