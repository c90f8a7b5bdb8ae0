#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "latwave/coeffs.hpp"
#include "latwave/errors.hpp"
#include "latwave/golden.hpp"
#include "latwave/lattice.hpp"
#include "latwave/metrics.hpp"
#include "latwave/util.hpp"
#include "latwave/waves_periodic.hpp"

namespace latwave {

// ---------------------------------------------------------------------------
// Asymptotic window averages of the growth rate at zero
// ---------------------------------------------------------------------------

struct FBarStats {
    double f_bar_inf = 0.0;
    double f_bar_sup = 0.0;
    double f_bar_inf_plus = 0.0;
    double f_bar_sup_plus = 0.0;
    double f_mean = 0.0;  // full-horizon average, used for the mean-speed condition
    double horizon = 0.0;
    std::string window_policy;
};

/// Window-average statistics of f(t, 0, 0) over [-horizon, horizon] (and
/// [0, horizon] for the plus-variants), windows of length >= horizon/4.
inline FBarStats estimate_fbar(const CoefficientField& field, double horizon, double dt = 0.01) {
    if (horizon < 50.0)
        throw ParameterError("estimate_fbar: horizon must be >= 50 time units");
    auto g = [&](double t) { return field.f0(t, 0); };
    auto full = window_average_stats(g, -horizon, horizon, horizon / 4.0, dt);
    auto plus = window_average_stats(g, 0.0, horizon, horizon / 4.0, dt);
    auto mean = window_average_stats(g, -horizon, horizon, 2.0 * horizon - 1e-9, dt);
    FBarStats s;
    s.f_bar_inf = full.min_avg;
    s.f_bar_sup = full.max_avg;
    s.f_bar_inf_plus = plus.min_avg;
    s.f_bar_sup_plus = plus.max_avg;
    s.f_mean = mean.min_avg;
    s.horizon = horizon;
    s.window_policy = "window length >= horizon/4";
    return s;
}

// ---------------------------------------------------------------------------
// Critical mean speed and tilt roots of the explicit speed function
// ---------------------------------------------------------------------------

/// gamma_curve(mu; r) = (e^{-mu} + e^{mu} - 2 + r)/mu
inline double gamma_curve(double mu, double r) {
    return (std::exp(-mu) + std::exp(mu) - 2.0 + r) / mu;
}

struct C0Tilde {
    double c0 = 0.0;
    double mu_star = 0.0;
};

/// inf_{mu>0} gamma_curve(mu, f_bar_inf) with its unique minimizer.
inline C0Tilde c0_tilde(const FBarStats& stats) {
    if (!(stats.f_bar_inf > 0.0))
        throw AdmissibilityError("c0_tilde: f_bar_inf <= 0; averaged growth condition fails");
    double r = stats.f_bar_inf;
    auto g = golden_minimize([r](double mu) { return gamma_curve(mu, r); }, 1e-4, 20.0, 1e-10);
    return {g.value, g.x};
}

/// Smaller positive root of gamma_curve(mu, r) = gamma; the curve is strictly
/// decreasing left of its minimizer, so bisection on (0, argmin] suffices.
inline double mu_from_gamma(double gamma, double r) {
    auto g = golden_minimize([r](double mu) { return gamma_curve(mu, r); }, 1e-4, 20.0, 1e-10);
    if (!(gamma > g.value))
        throw ParameterError("mu_from_gamma: gamma must exceed the curve minimum");
    double lo = 1e-8, hi = g.x;
    if (gamma_curve(lo, r) < gamma)
        throw BracketError("mu_from_gamma: no left branch crossing");
    for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
        double mid = 0.5 * (lo + hi);
        (gamma_curve(mid, r) > gamma ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Auxiliary exponent A(t)
// ---------------------------------------------------------------------------

struct AExponent {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> A;
    std::vector<double> B;
    double delta = 0.0;
    double margin = 0.0;  // min sampled (dA/dt + B)
    double sup_A = 0.0;

    double value(double t) const { return lerp_grid(A, t0, dt, t); }
};

/// c(t; mu) = (e^{-mu} + e^{mu} - 2 + f(t,0))/mu; requires unit dispersal.
inline std::function<double(double)> speed_function(const CoefficientField& field, double mu) {
    if (std::abs(field.d_max() - 1.0) > 1e-12 || std::abs(field.d_min() - 1.0) > 1e-12)
        throw ParameterError("speed_function: requires d == 1");
    return [&field, mu](double t) { return gamma_curve(mu, field.f0(t, 0)); };
}

/// Running-reflection construction A(t) = max(0, G(t) - min_{s<=t} G(s)) with
/// G = int (delta - B), B(t) = -(e^{-mu~}+e^{mu~}-2) + c(t;mu) mu~ - f(t,0).
inline AExponent build_A(const CoefficientField& field, double mu, double mu_tilde, double delta,
                         double t_lo, double t_hi, double dt = 0.01) {
    if (!(mu_tilde > mu) || !(mu_tilde < 2.0 * mu))
        throw ParameterError("build_A: need mu < mu_tilde < 2 mu");
    auto c_of_t = speed_function(field, mu);
    auto B_of_t = [&](double t) {
        return -(std::exp(-mu_tilde) + std::exp(mu_tilde) - 2.0) + c_of_t(t) * mu_tilde -
               field.f0(t, 0);
    };
    double horizon = t_hi - t_lo;
    auto b_stats = window_average_stats(B_of_t, t_lo, t_hi, horizon / 4.0, dt);
    if (!(b_stats.min_avg > 0.0))
        throw ConstructionError("build_A: averaged B not positive; mu_tilde inadmissible");
    if (!(delta > 0.0) || !(delta < 0.5 * b_stats.min_avg))
        throw ParameterError("build_A: need 0 < delta < B_bar_inf / 2");

    auto n = static_cast<std::size_t>(std::ceil(horizon / dt));
    dt = horizon / static_cast<double>(n);
    AExponent ax;
    ax.t0 = t_lo;
    ax.dt = dt;
    ax.delta = delta;
    ax.B.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) ax.B[i] = B_of_t(t_lo + dt * static_cast<double>(i));
    std::vector<double> integrand(n + 1);
    for (std::size_t i = 0; i <= n; ++i) integrand[i] = delta - ax.B[i];
    auto G = cumtrapz(integrand, dt);
    ax.A.resize(n + 1);
    double running_min = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        running_min = std::min(running_min, G[i]);
        ax.A[i] = std::max(0.0, G[i] - running_min);
        ax.sup_A = std::max(ax.sup_A, ax.A[i]);
    }
    if (ax.sup_A > 10.0 * horizon * delta)
        throw ConstructionError("build_A: A grows unboundedly; decrease delta");
    ax.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double slope = (ax.A[i + 1] - ax.A[i]) / dt;
        ax.margin = std::min(ax.margin, slope + 0.5 * (ax.B[i] + ax.B[i + 1]));
    }
    return ax;
}

// ---------------------------------------------------------------------------
// Transition wave by pullback between the moving envelopes
// ---------------------------------------------------------------------------

struct TimeHetOptions {
    double horizon = 200.0;   // averaging horizon for the f statistics
    double t_out = 50.0;      // output window [0, t_out]
    double tol = 1e-6;        // pullback convergence tolerance at t = 0
    long n_max = 120;         // pullback depth budget (h_step = 1)
    double dt = 0.0;          // 0: auto
    double mu_tilde = 0.0;    // 0: midpoint of (mu, min(2 mu, mu*))
    double uplus_tol = 1e-8;
};

struct TimeHetWave {
    double mu = 0.0;
    double gamma = 0.0;
    double mu_tilde = 0.0;
    double delta = 0.0;
    double d1_star = 0.0;
    FBarStats stats;
    C0Tilde c0;
    AExponent A;
    // speed trace on the sample grid
    double t0_trace = 0.0, dt_trace = 0.0;
    std::vector<double> c_samples;   // c(t; mu)
    std::vector<double> C_samples;   // int_0^t c
    // wave samples on [0, t_out]
    long j_lo = 0;
    double dt_out = 0.0;
    std::vector<std::vector<double>> U_samples;
    FrontTrace trace;
    EntireSolution uplus;
    long pullback_depth = 0;
    std::vector<double> pullback_deltas;
    double envelope_violation = 0.0;

    double C(double t) const { return lerp_grid(C_samples, t0_trace, dt_trace, t); }
    double phi(double t, long j) const { return std::exp(-mu * (static_cast<double>(j) - C(t))); }
    double phi1(double t, long j) const {
        return std::exp(A.value(t) - mu_tilde * (static_cast<double>(j) - C(t)));
    }
    double U(double t, long j) const {
        auto k = static_cast<std::size_t>(std::min(std::max(t / dt_out, 0.0),
                                                   static_cast<double>(U_samples.size() - 1)));
        if (k >= U_samples.size() - 1) k = U_samples.size() - 2;
        double fr = t / dt_out - static_cast<double>(k);
        auto i = static_cast<std::size_t>(j - j_lo);
        return U_samples[k][i] * (1.0 - fr) + U_samples[k + 1][i] * fr;
    }
};

namespace detail {

struct PullbackRun {
    std::vector<std::vector<double>> samples;  // on [0, t_out]
    double worst_violation = 0.0;
};

}  // namespace detail

/// Transition-wave construction for a time-heterogeneous field with unit
/// dispersal: picks the tilt from the mean-speed condition, builds A(t) and the
/// moving envelopes phi, phi1, then pulls back from ever earlier starting times
/// with envelope-trapped initial data until the output window stabilizes.
inline TimeHetWave build_transition_wave(const CoefficientField& field, double gamma,
                                         const TimeHetOptions& opt = {}) {
    if (field.structure() != FieldStructure::time_only_general &&
        field.structure() != FieldStructure::homogeneous &&
        field.structure() != FieldStructure::time_periodic)
        throw ParameterError("build_transition_wave: field must be space-homogeneous");

    TimeHetWave w;
    w.gamma = gamma;
    w.stats = estimate_fbar(field, opt.horizon);
    w.c0 = c0_tilde(w.stats);
    if (!(gamma > w.c0.c0))
        throw ParameterError("build_transition_wave: gamma must exceed c0_tilde");
    w.mu = mu_from_gamma(gamma, w.stats.f_mean);

    double mu_star_mean = golden_minimize(
        [r = w.stats.f_mean](double mu) { return gamma_curve(mu, r); }, 1e-4, 20.0, 1e-10).x;
    double hi = std::min(2.0 * w.mu, mu_star_mean);
    w.mu_tilde = opt.mu_tilde > 0.0 ? opt.mu_tilde : w.mu + 0.5 * (hi - w.mu);

    // time span covering the deepest pullback start through the output window
    const double t_start_min = -static_cast<double>(opt.n_max) - 1.0;
    const double t_hi = opt.t_out + 1.0;

    auto c_of_t = speed_function(field, w.mu);
    auto b_stats_fn = [&](double t) {
        return -(std::exp(-w.mu_tilde) + std::exp(w.mu_tilde) - 2.0) + c_of_t(t) * w.mu_tilde -
               field.f0(t, 0);
    };
    auto b_stats = window_average_stats(b_stats_fn, t_start_min, t_hi, (t_hi - t_start_min) / 4.0, 0.01);
    if (!(b_stats.min_avg > 0.0))
        throw ConstructionError("build_transition_wave: B average not positive for chosen mu_tilde");
    w.delta = 0.25 * b_stats.min_avg;
    w.A = build_A(field, w.mu, w.mu_tilde, w.delta, t_start_min, t_hi);

    // speed trace and its integral, anchored so C(0) = 0
    {
        double dts = 0.01;
        auto n = static_cast<std::size_t>(std::ceil((t_hi - t_start_min) / dts));
        dts = (t_hi - t_start_min) / static_cast<double>(n);
        w.t0_trace = t_start_min;
        w.dt_trace = dts;
        w.c_samples.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            w.c_samples[i] = c_of_t(t_start_min + dts * static_cast<double>(i));
        w.C_samples = cumtrapz(w.c_samples, dts);
        double at0 = lerp_grid(w.C_samples, t_start_min, dts, 0.0);
        for (double& v : w.C_samples) v -= at0;
    }

    // strictly positive entire solution of the space-homogeneous field
    w.uplus = compute_entire_solution_range(field, t_start_min, t_hi, opt.uplus_tol);

    double L = estimate_f_lip(field, std::max(field.M0(), 1.5));
    w.d1_star = std::max(2.0, 2.0 * L / w.delta);

    const long j_lo = static_cast<long>(std::floor(w.C(t_start_min))) - 60;
    const long j_hi = static_cast<long>(std::ceil(w.C(t_hi))) + 80;
    const auto nj = static_cast<std::size_t>(j_hi - j_lo + 1);
    w.j_lo = j_lo;

    double dt_bound = 0.25 / (2.0 * field.d_max() + field.uf_lipschitz());
    double dt = opt.dt > 0.0 ? opt.dt : dt_bound * 0.5;

    auto run_pullback = [&](double t0, double d1) -> detail::PullbackRun {
        detail::PullbackRun out;
        LatticeState st;
        st.offset = j_lo;
        st.time = t0;
        st.values.resize(nj);
        double plateau = w.uplus.value(t0, 0);
        for (std::size_t i = 0; i < nj; ++i) {
            long j = j_lo + static_cast<long>(i);
            double cap = w.phi(t0, j) + d1 * w.phi1(t0, j);
            st.values[i] = std::min(cap, plateau);
        }
        st.boundary = Boundary::front([&w](double t, long) { return w.uplus.value(t, 0); }, w.mu);

        long check_every = std::max<long>(1, static_cast<long>(std::llround(0.5 / dt)));
        long step_count = 0;
        auto check_envelopes = [&](const LatticeState& s) {
            if (step_count++ % check_every != 0) return;
            for (std::size_t i = 0; i < nj; ++i) {
                long j = j_lo + static_cast<long>(i);
                double lo = w.phi(s.time, j) - d1 * w.phi1(s.time, j);
                double hic = w.phi(s.time, j) + d1 * w.phi1(s.time, j);
                double v = s.values[i];
                double viol = std::max(lo - v, v - hic);
                out.worst_violation = std::max(out.worst_violation, viol);
            }
        };
        LatticeObserver obs = [&](const LatticeState& s) {
            out.samples.push_back(s.values);
            check_envelopes(s);
        };
        // land exactly on t = 0, then sample [0, t_out] uniformly
        SimOptions so{dt, 1};
        st = integrate(std::move(st), field, 0.0, so, check_envelopes);
        long n_out = static_cast<long>(std::ceil(opt.t_out / dt));
        double dt_out = opt.t_out / static_cast<double>(n_out);
        w.dt_out = dt_out;
        SimOptions so_out{dt_out, 1};
        integrate(std::move(st), field, opt.t_out, so_out, obs);
        return out;
    };

    double d1 = w.d1_star;
    for (int attempt = 0; attempt < 2; ++attempt) {
        w.pullback_deltas.clear();
        std::vector<double> prev_t0;
        bool converged = false;
        detail::PullbackRun last;
        long depth = 0;
        bool failed_envelope = false;
        for (long n = 4; n <= opt.n_max; n += 4) {
            auto run = run_pullback(-static_cast<double>(n), d1);
            if (run.worst_violation > 1e-8) {
                w.envelope_violation = run.worst_violation;
                failed_envelope = true;
                break;
            }
            const auto& snap0 = run.samples.front();
            if (!prev_t0.empty()) {
                double delta = sup_diff(snap0, prev_t0);
                w.pullback_deltas.push_back(delta);
                if (delta < opt.tol) {
                    converged = true;
                    last = std::move(run);
                    depth = n;
                    break;
                }
            }
            prev_t0 = snap0;
        }
        if (failed_envelope) {
            if (attempt == 0) { d1 *= 4.0; continue; }
            throw EnvelopeError("build_transition_wave: envelope ordering violated by " +
                                std::to_string(w.envelope_violation) + "; d1 too small");
        }
        if (!converged)
            throw ConvergenceError("build_transition_wave: pullback did not stabilize",
                                   w.pullback_deltas);
        w.d1_star = d1;
        w.pullback_depth = depth;
        w.U_samples = std::move(last.samples);
        break;
    }

    // front trace on the output samples
    w.trace.theta = 0.5;
    for (std::size_t k = 0; k < w.U_samples.size(); k += 20) {
        double t = w.dt_out * static_cast<double>(k);
        double thr = 0.5 * w.uplus.value(t, 0);
        long X = j_lo - 1;
        for (long i = static_cast<long>(nj) - 1; i >= 0; --i)
            if (w.U_samples[k][static_cast<std::size_t>(i)] >= thr) { X = j_lo + i; break; }
        if (X < j_lo) throw WindowExitError("build_transition_wave: front left the window", t);
        w.trace.times.push_back(t);
        w.trace.X.push_back(X);
    }
    return w;
}

}  // namespace latwave
