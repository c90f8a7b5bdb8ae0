#pragma once

#include <cmath>
#include <functional>

#include "latwave/errors.hpp"

namespace latwave {

struct GoldenResult {
    double x = 0.0;
    double value = 0.0;
    long evaluations = 0;
};

/// Golden-section minimization of a unimodal function on [a, b] to |b-a| < xtol.
inline GoldenResult golden_minimize(const std::function<double(double)>& f, double a, double b,
                                    double xtol, long max_iter = 200) {
    if (!(b > a) || xtol <= 0.0) throw ParameterError("golden_minimize: bad bracket");
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    long evals = 2;
    for (long it = 0; it < max_iter && (b - a) > xtol; ++it) {
        if (f1 <= f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
        ++evals;
    }
    GoldenResult r;
    r.x = f1 <= f2 ? x1 : x2;
    r.value = std::min(f1, f2);
    r.evaluations = evals;
    return r;
}

}  // namespace latwave
