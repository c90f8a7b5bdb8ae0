#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "latwave/errors.hpp"

namespace latwave {

inline bool finite(double x) { return std::isfinite(x); }

/// max_i |a_i - b_i|
inline double sup_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double sup_abs(std::span<const double> a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

/// Euclidean-style modulo into [0, p).
inline double wrap(double x, double p) {
    double r = std::fmod(x, p);
    return r < 0 ? r + p : r;
}

inline long wrap_index(long j, long p) {
    long r = j % p;
    return r < 0 ? r + p : r;
}

/// Piecewise-linear sample of a uniformly gridded function (clamped ends).
inline double lerp_grid(std::span<const double> values, double x0, double dx, double x) {
    if (values.empty()) throw DomainError("lerp_grid: empty table");
    double s = (x - x0) / dx;
    if (s <= 0.0) return values.front();
    double smax = static_cast<double>(values.size() - 1);
    if (s >= smax) return values.back();
    auto k = static_cast<std::size_t>(s);
    double f = s - static_cast<double>(k);
    return values[k] * (1.0 - f) + values[k + 1] * f;
}

/// Trapezoid cumulative integral of samples with uniform spacing dx; out[0] = 0.
inline std::vector<double> cumtrapz(std::span<const double> samples, double dx) {
    std::vector<double> out(samples.size(), 0.0);
    for (std::size_t i = 1; i < samples.size(); ++i)
        out[i] = out[i - 1] + 0.5 * dx * (samples[i - 1] + samples[i]);
    return out;
}

struct WindowAverageStats {
    double min_avg;
    double max_avg;
};

/// Extremal window averages (1/(t-s)) * int_s^t g over all windows of length >= min_len
/// inside [t_lo, t_hi], sampled with trapezoid quadrature at step dt.
/// `stride` coarsens the set of window endpoints, not the quadrature.
inline WindowAverageStats window_average_stats(const std::function<double(double)>& g,
                                               double t_lo, double t_hi, double min_len,
                                               double dt, std::size_t max_endpoints = 4000) {
    if (!(t_hi - t_lo >= min_len) || min_len <= 0.0)
        throw InsufficientGridError("window_average_stats: horizon shorter than minimum window");
    auto n = static_cast<std::size_t>(std::ceil((t_hi - t_lo) / dt));
    dt = (t_hi - t_lo) / static_cast<double>(n);
    std::vector<double> samples(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        samples[i] = g(t_lo + dt * static_cast<double>(i));
        if (!finite(samples[i])) throw MalformedFieldError("window_average_stats: non-finite sample");
    }
    auto prefix = cumtrapz(samples, dt);
    std::size_t stride = std::max<std::size_t>(1, (n + 1) / max_endpoints);
    auto min_steps = static_cast<std::size_t>(std::llround(min_len / dt));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t s = 0; s + min_steps <= n; s += stride) {
        for (std::size_t t = s + min_steps; t <= n; t += stride) {
            double avg = (prefix[t] - prefix[s]) / (dt * static_cast<double>(t - s));
            lo = std::min(lo, avg);
            hi = std::max(hi, avg);
        }
        // always include the full right endpoint
        double avg = (prefix[n] - prefix[s]) / (dt * static_cast<double>(n - s));
        lo = std::min(lo, avg);
        hi = std::max(hi, avg);
    }
    return {lo, hi};
}

}  // namespace latwave
