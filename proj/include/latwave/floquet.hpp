#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "latwave/coeffs.hpp"
#include "latwave/errors.hpp"
#include "latwave/golden.hpp"
#include "latwave/util.hpp"

namespace latwave {

namespace detail {

// RHS of the tilted linearization at 0, reduced to the J-periodic cell:
//   v'_j = d(t,j-1)(e^mu v_{j-1} - v_j) + d(t,j+1)(e^{-mu} v_{j+1} - v_j) + f(t,j,0) v_j
inline void tilted_rhs(const CoefficientField& field, double mu, double t,
                       const std::vector<double>& v, std::vector<double>& out) {
    const long J = static_cast<long>(v.size());
    const double ep = std::exp(mu), em = std::exp(-mu);
    for (long j = 0; j < J; ++j) {
        const double vm = v[static_cast<std::size_t>(wrap_index(j - 1, J))];
        const double vp = v[static_cast<std::size_t>(wrap_index(j + 1, J))];
        const double vc = v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(j)] = field.d(t, j - 1) * (ep * vm - vc) +
                                           field.d(t, j + 1) * (em * vp - vc) +
                                           field.f0(t, j) * vc;
    }
}

// RK4 over [0, T] in n steps; optional per-step sink receives (t, v) after each step.
inline std::vector<double> tilted_evolve(const CoefficientField& field, double mu,
                                         std::vector<double> v, long n_steps,
                                         const std::function<void(double, const std::vector<double>&)>& sink = nullptr) {
    const double T = field.T();
    const double h = T / static_cast<double>(n_steps);
    const std::size_t n = v.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    if (sink) sink(0.0, v);
    for (long s = 0; s < n_steps; ++s) {
        const double t = h * static_cast<double>(s);
        tilted_rhs(field, mu, t, v, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = v[i] + 0.5 * h * k1[i];
        tilted_rhs(field, mu, t + 0.5 * h, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = v[i] + 0.5 * h * k2[i];
        tilted_rhs(field, mu, t + 0.5 * h, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = v[i] + h * k3[i];
        tilted_rhs(field, mu, t + h, tmp, k4);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!finite(v[i]))
                throw BlowUpError("tilted_evolve: non-finite value", t + h);
        }
        if (sink) sink(t + h, v);
    }
    return v;
}

inline long default_steps(const CoefficientField& field, double mu, long floor_steps) {
    // linear rate scale of the tilted system; keep rate*dt small for 4th-order accuracy
    double rate = field.d_max() * (std::exp(std::abs(mu)) + 1.0) + 2.0 * field.d_max() +
                  std::abs(field.uf_lipschitz());
    auto n = static_cast<long>(std::ceil(field.T() * rate / 0.01));
    return std::max(n, floor_steps);
}

}  // namespace detail

/// Monodromy matrix of the tilted linearization over one period, reduced to the
/// J-site periodic cell. Column k is the time-T image of the k-th unit sequence.
inline std::vector<std::vector<double>> monodromy(const CoefficientField& field, double mu,
                                                  long n_steps = 0) {
    if (!field.time_periodic())
        throw ParameterError("monodromy: field must be time/space periodic");
    const long J = field.J();
    if (J < 1) throw ParameterError("monodromy: J must be >= 1");
    if (n_steps <= 0) n_steps = detail::default_steps(field, mu, 2000);
    std::vector<std::vector<double>> M(static_cast<std::size_t>(J),
                                       std::vector<double>(static_cast<std::size_t>(J), 0.0));
    for (long k = 0; k < J; ++k) {
        std::vector<double> v(static_cast<std::size_t>(J), 0.0);
        v[static_cast<std::size_t>(k)] = 1.0;
        v = detail::tilted_evolve(field, mu, std::move(v), n_steps);
        for (long j = 0; j < J; ++j)
            M[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = v[static_cast<std::size_t>(j)];
    }
    return M;
}

struct FloquetResult {
    double mu = 0.0;
    double lambda = 0.0;
    double T = 1.0;
    long J = 1;
    double dt = 0.0;
    std::vector<std::vector<double>> psi_samples;  // psi_samples[k][j], t_k = k*dt in [0,T]
    double residual = 0.0;                         // period defect of e^{-lambda T} Phi(T) psi(0)
    double psi_min = 0.0, psi_max = 0.0;

    /// psi^mu(t, j), T-periodic in t and J-periodic in j, linear in t between samples.
    double psi(double t, long j) const {
        double tt = wrap(t, T);
        double s = tt / dt;
        auto k = static_cast<std::size_t>(s);
        if (k >= psi_samples.size() - 1) k = psi_samples.size() - 2;
        double fr = s - static_cast<double>(k);
        auto jj = static_cast<std::size_t>(wrap_index(j, J));
        return psi_samples[k][jj] * (1.0 - fr) + psi_samples[k + 1][jj] * fr;
    }
};

/// Floquet exponent lambda(mu) = ln(Perron root of the monodromy)/T, with the
/// periodic eigenfunction psi^mu recovered along one period.
inline FloquetResult lambda_of_mu(const CoefficientField& field, double mu, long n_steps = 0,
                                  bool with_psi = true) {
    if (n_steps <= 0) n_steps = detail::default_steps(field, mu, 2000);
    auto M = monodromy(field, mu, n_steps);
    const long J = field.J();

    // power iteration (Perron root dominates for a positive matrix)
    std::vector<double> x(static_cast<std::size_t>(J), 1.0), y(static_cast<std::size_t>(J));
    double rho = 0.0;
    bool converged = false;
    double last_delta = 0.0;
    for (long it = 0; it < 100000; ++it) {
        double nrm = 0.0;
        for (long j = 0; j < J; ++j) {
            double s = 0.0;
            for (long k = 0; k < J; ++k)
                s += M[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] *
                     x[static_cast<std::size_t>(k)];
            y[static_cast<std::size_t>(j)] = s;
            nrm = std::max(nrm, std::abs(s));
        }
        if (!(nrm > 0.0)) throw SpectralError("lambda_of_mu: monodromy annihilated the iterate", 0.0);
        double delta = 0.0;
        for (long j = 0; j < J; ++j) {
            y[static_cast<std::size_t>(j)] /= nrm;
            delta = std::max(delta, std::abs(y[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(j)]));
        }
        x.swap(y);
        rho = nrm;
        last_delta = delta;
        if (delta < 1e-12) { converged = true; break; }
    }
    if (!converged)
        throw SpectralError("lambda_of_mu: power iteration stagnated; eigenvalue gap too small",
                            last_delta);
    for (double v : x)
        if (!(v > 0.0)) throw SpectralError("lambda_of_mu: Perron vector not strictly positive", rho);

    FloquetResult res;
    res.mu = mu;
    res.T = field.T();
    res.J = J;
    res.lambda = std::log(rho) / field.T();
    res.dt = field.T() / static_cast<double>(n_steps);
    if (!with_psi) return res;

    // psi(t) = e^{-lambda t} * v(t) with v solving the tilted system from the Perron vector
    double nrm0 = 0.0;
    for (double v : x) nrm0 = std::max(nrm0, std::abs(v));
    for (double& v : x) v /= nrm0;
    res.psi_samples.reserve(static_cast<std::size_t>(n_steps) + 1);
    auto lam = res.lambda;
    auto fin = detail::tilted_evolve(field, mu, x, n_steps,
                                     [&](double t, const std::vector<double>& v) {
                                         std::vector<double> row(v.size());
                                         for (std::size_t i = 0; i < v.size(); ++i)
                                             row[i] = std::exp(-lam * t) * v[i];
                                         res.psi_samples.push_back(std::move(row));
                                     });
    double defect = 0.0;
    for (long j = 0; j < J; ++j)
        defect = std::max(defect, std::abs(std::exp(-lam * field.T()) * fin[static_cast<std::size_t>(j)] -
                                           x[static_cast<std::size_t>(j)]));
    res.residual = defect;
    res.psi_min = std::numeric_limits<double>::infinity();
    res.psi_max = 0.0;
    for (const auto& row : res.psi_samples)
        for (double v : row) {
            if (!(v > 0.0)) throw SpectralError("lambda_of_mu: psi lost positivity", v);
            res.psi_min = std::min(res.psi_min, v);
            res.psi_max = std::max(res.psi_max, v);
        }
    return res;
}

struct SpeedResult {
    double mu_star = 0.0;
    double c_star = 0.0;
    std::vector<double> scan_mu;
    std::vector<double> scan_c;  // lambda(mu)/mu at scan_mu
};

/// Critical speed c* = inf_{mu>0} lambda(mu)/mu by coarse bracket scan plus
/// golden-section refinement; cross-checked against a dense grid scan.
inline SpeedResult find_mu_star(const CoefficientField& field, double mu_lo = 0.05,
                                double mu_hi = 5.0, long scan_points = 10000) {
    if (!(mu_hi > mu_lo) || mu_lo <= 0.0) throw ParameterError("find_mu_star: bad bracket");
    // cheap step count for the dense scan; full accuracy for the refinement
    auto lam_coarse = [&](double mu) {
        return lambda_of_mu(field, mu, detail::default_steps(field, mu, 1000) / 4, false).lambda;
    };
    auto lam_fine = [&](double mu) { return lambda_of_mu(field, mu).lambda; };

    SpeedResult res;
    res.scan_mu.reserve(static_cast<std::size_t>(scan_points));
    res.scan_c.reserve(static_cast<std::size_t>(scan_points));
    std::size_t best = 0;
    for (long k = 0; k < scan_points; ++k) {
        double mu = mu_lo + (mu_hi - mu_lo) * static_cast<double>(k) /
                                static_cast<double>(scan_points - 1);
        double c = lam_coarse(mu) / mu;
        res.scan_mu.push_back(mu);
        res.scan_c.push_back(c);
        if (c < res.scan_c[best]) best = res.scan_mu.size() - 1;
    }
    if (best == 0 || best + 1 == res.scan_mu.size())
        throw BracketError("find_mu_star: minimum at scan edge; widen [mu_lo, mu_hi]");

    auto g = golden_minimize([&](double mu) { return lam_fine(mu) / mu; },
                             res.scan_mu[best - 1], res.scan_mu[best + 1], 1e-8);
    res.mu_star = g.x;
    res.c_star = g.value;
    if (res.scan_c[best] < res.c_star - 1e-6)
        throw BracketError("find_mu_star: grid scan disagrees with refined minimum");
    return res;
}

/// Auxiliary tilt mu' in (mu, min(2mu, mu*)) with lambda(mu)/mu > lambda(mu')/mu' > c*
/// holding with margin >= 1e-6; starts at the midpoint and bisects toward mu.
inline double select_mu_prime(const CoefficientField& field, const SpeedResult& speed, double mu) {
    if (!(mu > 0.0) || !(mu < speed.mu_star))
        throw ParameterError("select_mu_prime: need 0 < mu < mu*");
    const double hi = std::min(2.0 * mu, speed.mu_star);
    const double c_mu = lambda_of_mu(field, mu).lambda / mu;
    double lo = mu;
    double cand = 0.5 * (lo + hi);
    for (int it = 0; it < 50; ++it) {
        double c_cand = lambda_of_mu(field, cand).lambda / cand;
        if (c_mu - c_cand >= 1e-6 && c_cand - speed.c_star >= 1e-6) return cand;
        // too close to mu* on the right (c_cand ~ c*): pull toward mu;
        // too close to mu on the left (c_cand ~ c_mu): push toward hi
        if (c_cand - speed.c_star < 1e-6)
            cand = 0.5 * (lo + cand);
        else
            cand = 0.5 * (cand + hi);
        if (hi - lo < 1e-10) break;
    }
    throw MarginError("select_mu_prime: no admissible mu' with margin; choose a smaller mu");
}

/// Smaller root of lambda(mu)/mu = c on (0, mu*); exists for c > c*.
inline double mu_from_speed(const CoefficientField& field, const SpeedResult& speed, double c) {
    if (!(c > speed.c_star))
        throw ParameterError("mu_from_speed: speed must exceed c*");
    auto g = [&](double mu) { return lambda_of_mu(field, mu).lambda / mu - c; };
    double lo = speed.mu_star;
    // march left until g > 0 (the curve diverges as mu -> 0+)
    double hi_val = g(lo);
    if (!(hi_val < 0.0)) throw BracketError("mu_from_speed: c* inconsistent with lambda curve");
    double left = lo;
    for (int it = 0; it < 60; ++it) {
        left *= 0.5;
        if (g(left) > 0.0) break;
        if (left < 1e-8) throw BracketError("mu_from_speed: no sign change found");
    }
    double a = left, b = lo;
    for (int it = 0; it < 80 && b - a > 1e-10; ++it) {
        double m = 0.5 * (a + b);
        (g(m) > 0.0 ? a : b) = m;
    }
    return 0.5 * (a + b);
}

}  // namespace latwave
