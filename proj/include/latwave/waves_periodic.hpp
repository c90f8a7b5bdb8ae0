#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "latwave/coeffs.hpp"
#include "latwave/errors.hpp"
#include "latwave/floquet.hpp"
#include "latwave/lattice.hpp"
#include "latwave/metrics.hpp"
#include "latwave/util.hpp"

namespace latwave {

// ---------------------------------------------------------------------------
// Continuum extension: coefficients frozen on unit cells, couplings at x +- 1
// ---------------------------------------------------------------------------

struct ContinuumField {
    const CoefficientField* base = nullptr;
    long m = 8;       // cells per unit length
    double h = 0.125;

    // tiny bias keeps exact-integer abscissas (computed as j + s - s) in cell j
    static long cell(double x) { return static_cast<long>(std::floor(x + 1e-9)); }
    double d(double t, double x) const { return base->d(t, cell(x)); }
    double f(double t, double x, double u) const { return base->f(t, cell(x), u); }
};

inline ContinuumField continuum_extend(const CoefficientField& field, long m = 8) {
    if (m < 4) throw ResolutionError("continuum_extend: need at least 4 cells per unit");
    return ContinuumField{&field, m, 1.0 / static_cast<double>(m)};
}

// ---------------------------------------------------------------------------
// Explicit sub/super-solutions
// ---------------------------------------------------------------------------

struct SubSuperParams {
    double d = 1.0;      // leading amplitude
    double d1 = 0.0;     // correction amplitude
    double b = 0.0;      // plateau amplitude
    double M = 0.0;      // plateau/tail matching abscissa (moving frame)
    double N = 0.0;      // lower crossing abscissa
    double mu = 0.0;
    double mu_prime = 0.0;
    double c = 0.0;
};

/// Lipschitz bound of u |-> f(t,j,u) - f(t,j,0) on [0, m_bar], sampled.
inline double estimate_f_lip(const CoefficientField& field, double m_bar) {
    double L = 0.0;
    double T = field.time_periodic() ? field.T() : 10.0;
    for (int kt = 0; kt <= 16; ++kt)
        for (long j = 0; j < std::max<long>(field.J(), 1); ++j)
            for (int ku = 1; ku <= 16; ++ku) {
                double t = T * static_cast<double>(kt) / 16.0;
                double u = m_bar * static_cast<double>(ku) / 16.0;
                L = std::max(L, std::abs(field.f(t, j, u) - field.f0(t, j)) / u);
            }
    return L;
}

/// The explicit constant governing the size of the correction term: max of
/// max psi^mu / min psi^mu' and L (max psi^mu)^2 / ((mu' c - lambda(mu')) min psi^mu').
inline double compute_d0(const CoefficientField& field, const FloquetResult& fl_mu,
                         const FloquetResult& fl_mup, double c, double d = 1.0) {
    double gap = fl_mup.mu * c - fl_mup.lambda;
    if (gap <= 0.0)
        throw InadmissibleTiltError("compute_d0: mu' c - lambda(mu') <= 0; mu' out of contract");
    double L = estimate_f_lip(field, d * fl_mu.psi_max);
    double q1 = fl_mu.psi_max / fl_mup.psi_min;
    double q2 = L * fl_mu.psi_max * fl_mu.psi_max / (gap * fl_mup.psi_min);
    return std::max(q1, q2);
}

/// Sub/super-solution pair as moving-frame evaluators (t, x, z) -> value,
/// where x is the fixed-frame continuum coordinate and z the coefficient shift.
struct SubSuper {
    SubSuperParams params;
    std::function<double(double, double, double)> lower;    // \underline u
    std::function<double(double, double, double)> upper;    // \bar u
    std::function<double(double, double, double)> v_lower;  // \underline v
    std::function<double(double, double, double)> v_upper;  // \bar v
    std::function<double(double, double, double)> phi;      // d e^{-mu(x-ct)} psi^mu(t,x+z)
    std::function<double(double, double, double)> phi1;     // d1 e^{-mu'(x-ct)} psi^mu'(t,x+z)
};

/// Builds the explicit pair. The plateau amplitude b is found by a downward
/// scan from 0.1 subject to the sub-solution margin b <= lambda(0)/(2 L max psi^0)
/// and the crossing condition b max psi^0 <= worst-case lower tail at x = M.
inline SubSuper build_sub_super(const CoefficientField& field, SubSuperParams params,
                                const FloquetResult& fl_mu, const FloquetResult& fl_mup,
                                const FloquetResult& fl_zero, const EntireSolution& uplus) {
    if (!(params.mu > 0.0) || !(params.mu_prime > params.mu))
        throw ParameterError("build_sub_super: need 0 < mu < mu'");
    if (!(params.d1 > 0.0)) throw ParameterError("build_sub_super: d1 must be set");

    const double mu = params.mu, mup = params.mu_prime, d = params.d, d1 = params.d1;
    // worst-case lower tail over all coefficient phases
    auto wmin = [&](double x) {
        return d * std::exp(-mu * x) * fl_mu.psi_min - d1 * std::exp(-mup * x) * fl_mup.psi_max;
    };
    // crossing of the two exponentials; wmin > 0 to the right of x0
    double x0 = std::log(d1 * fl_mup.psi_max / (d * fl_mu.psi_min)) / (mup - mu);
    // peak of wmin
    double x_peak = std::log(d1 * mup * fl_mup.psi_max / (d * mu * fl_mu.psi_min)) / (mup - mu);
    params.M = x_peak;
    double ceiling = wmin(x_peak);
    if (!(ceiling > 0.0))
        throw GeometryError("build_sub_super: lower tail never positive; d1 too large");

    double L = estimate_f_lip(field, d * fl_mu.psi_max + d1 * fl_mup.psi_max);
    double b_sub_cap = fl_zero.lambda / (2.0 * L * fl_zero.psi_max);
    double b = 0.1;
    bool found = false;
    for (int it = 0; it < 60; ++it) {
        if (b <= b_sub_cap && b * fl_zero.psi_max <= 0.5 * ceiling && b * fl_zero.psi_min > 0.0) {
            found = true;
            break;
        }
        b *= 0.5;
    }
    if (!found)
        throw GeometryError("build_sub_super: no admissible plateau amplitude in scan from 0.1");
    params.b = b;
    // leftmost abscissa where the worst-case tail clears the plateau
    {
        double lo = x0, hi = x_peak;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            (wmin(mid) >= b * fl_zero.psi_max ? hi : lo) = mid;
        }
        params.N = hi;
    }

    SubSuper ss;
    ss.params = params;
    const double c = params.c;
    auto psi_mu = [fl_mu](double t, double y) { return fl_mu.psi(t, ContinuumField::cell(y)); };
    auto psi_mup = [fl_mup](double t, double y) { return fl_mup.psi(t, ContinuumField::cell(y)); };
    auto psi0 = [fl_zero](double t, double y) { return fl_zero.psi(t, ContinuumField::cell(y)); };
    auto up = [uplus](double t, double y) { return uplus.value(t, ContinuumField::cell(y)); };

    ss.phi = [=](double t, double x, double z) {
        return d * std::exp(-mu * (x - c * t)) * psi_mu(t, x + z);
    };
    ss.phi1 = [=](double t, double x, double z) {
        return d1 * std::exp(-mup * (x - c * t)) * psi_mup(t, x + z);
    };
    ss.v_upper = [phi = ss.phi, phi1 = ss.phi1](double t, double x, double z) {
        return phi(t, x, z) + phi1(t, x, z);
    };
    ss.v_lower = [phi = ss.phi, phi1 = ss.phi1](double t, double x, double z) {
        return phi(t, x, z) - phi1(t, x, z);
    };
    ss.upper = [vu = ss.v_upper, up](double t, double x, double z) {
        return std::min(vu(t, x, z), up(t, x + z));
    };
    double M = params.M;
    ss.lower = [vl = ss.v_lower, psi0, b, c, M](double t, double x, double z) {
        double v = vl(t, x, z);
        if (x - c * t <= M) v = std::max(v, b * psi0(t, x + z));
        return std::max(v, 0.0);
    };
    return ss;
}

// ---------------------------------------------------------------------------
// Monotone iteration
// ---------------------------------------------------------------------------

enum class ProfileSide { upper, lower };

struct WaveProfile {
    ProfileSide side = ProfileSide::upper;
    double x_lo = -40.0;
    double h = 1.0;                      // profile sampled on integer sites
    std::vector<double> values;          // converged W(x, z=0) on the x-window
    std::vector<double> iterates_delta;  // ||w^{n+1} - w^n||_inf at z = 0
    double monotone_violation = 0.0;     // worst wrong-way change across depths
    double envelope_violation = 0.0;     // worst escape from [lower, upper] at period ends
    double plateau_floor = 0.0;          // min over x <= 0 of the final profile
    long depth = 0;

    double x_at(std::size_t i) const { return x_lo + h * static_cast<double>(i); }
};

struct IterateOptions {
    double x_lo = -40.0;   // moving-frame window (integers)
    double x_hi = 80.0;
    long n_max = 80;
    double tol = 1e-6;
    double dt = 0.0;       // 0: auto from the stability bound
    long check_stride = 1; // envelope checks every k-th period
};

/// Monotone iteration for the wave profile at shift z = 0. The depth-n
/// iterate u^n(0, x, 0) equals the original lattice equation evolved over
/// [0, nT] from the explicit sub/super-solution translated right by n c T
/// (change of variables y -> y - n c T straightens the shift sequence), read
/// on the fixed window [x_lo, x_hi]. Everything lives on integer sites, so
/// the cT translation is an exact relabeling and no interpolation is needed;
/// psi and u+ are only ever evaluated at integer arguments.
inline WaveProfile iterate_profile(const CoefficientField& field, double c,
                                   const SubSuper& ss, ProfileSide side,
                                   const FloquetResult& fl_mu, const EntireSolution& uplus,
                                   const IterateOptions& opt = {}) {
    if (!(c > 0.0)) throw ParameterError("iterate_profile: speed must be positive");
    const double T = field.T();
    const double cT = c * T;
    const long jx_lo = static_cast<long>(std::llround(opt.x_lo));
    const long jx_hi = static_cast<long>(std::llround(opt.x_hi));
    if (jx_hi <= jx_lo) throw ParameterError("iterate_profile: empty x-window");
    const auto& init = (side == ProfileSide::upper) ? ss.upper : ss.lower;

    double dt_bound = 0.25 / (2.0 * field.d_max() + field.uf_lipschitz());
    double dt = opt.dt > 0.0 ? opt.dt : std::min(0.8 * dt_bound, T / 32.0);
    const auto steps_per_period = static_cast<long>(std::ceil(T / dt - 1e-12));
    dt = T / static_cast<double>(steps_per_period);

    Boundary bdry = Boundary::front(uplus.evaluator(), fl_mu.mu,
                                    [fl_mu](double t, long j) { return fl_mu.psi(t, j); });

    WaveProfile prof;
    prof.side = side;
    prof.x_lo = static_cast<double>(jx_lo);
    prof.h = 1.0;

    std::vector<double> prev;
    for (long depth = 1; depth <= opt.n_max; ++depth) {
        const double shift = cT * static_cast<double>(depth);
        // window wide enough to hold the whole orbit: front starts near -n c T
        const long j_lo = jx_lo - static_cast<long>(std::ceil(shift)) - 2;
        LatticeState st;
        st.offset = j_lo;
        st.time = 0.0;
        st.boundary = bdry;
        st.values.resize(static_cast<std::size_t>(jx_hi - j_lo + 1));
        for (std::size_t i = 0; i < st.values.size(); ++i) {
            double y = static_cast<double>(j_lo + static_cast<long>(i));
            st.values[i] = init(0.0, y + shift, -shift);
        }
        for (long k = 0; k < depth; ++k) {
            st = integrate(st, field, st.time + T, SimOptions{dt, steps_per_period});
            if ((depth - 1 - k) % opt.check_stride == 0) {
                double t = st.time;
                for (std::size_t i = 0; i < st.values.size(); ++i) {
                    double y = static_cast<double>(j_lo + static_cast<long>(i));
                    double over = st.values[i] - ss.upper(t, y + shift, -shift);
                    double under = ss.lower(t, y + shift, -shift) - st.values[i];
                    prof.envelope_violation = std::max({prof.envelope_violation, over, under});
                }
            }
        }
        std::vector<double> w(static_cast<std::size_t>(jx_hi - jx_lo + 1));
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = st.values[static_cast<std::size_t>(jx_lo - j_lo) + i];
        if (!prev.empty()) {
            double delta = sup_diff(w, prev);
            prof.iterates_delta.push_back(delta);
            // Lemma-style monotonicity across depths at z = 0
            double wrong = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                double change = w[i] - prev[i];
                if (side == ProfileSide::upper) wrong = std::max(wrong, change);
                else wrong = std::max(wrong, -change);
            }
            prof.monotone_violation = std::max(prof.monotone_violation, wrong);
            if (prof.monotone_violation > 1e-8)
                throw IterationIntegrityError(
                    "iterate_profile: monotonicity violated by " +
                    std::to_string(prof.monotone_violation) + " at depth " + std::to_string(depth));
            if (delta < opt.tol) {
                prof.values = std::move(w);
                prof.depth = depth;
                prof.plateau_floor = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < prof.values.size() && prof.x_at(i) <= 0.0; ++i)
                    prof.plateau_floor = std::min(prof.plateau_floor, prof.values[i]);
                return prof;
            }
        }
        prev = std::move(w);
    }
    throw ConvergenceError("iterate_profile: no convergence within depth budget",
                           prof.iterates_delta);
}

// ---------------------------------------------------------------------------
// Wave assembly and diagnostics
// ---------------------------------------------------------------------------

struct WaveDiagnostic {
    std::string name;
    double value = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct PeriodicWave {
    double c = 0.0;
    double mu = 0.0, mu_prime = 0.0;
    double d_star = 1.0, d1_star = 0.0;
    double x_lo = 0.0, h = 0.0;
    std::vector<double> profile_upper, profile_lower;  // W(x, 0)
    double gap = 0.0;                                  // sup |upper - lower|
    // reconstructed entire solution U(t, j) on integer sites over [0, t_end]
    long j_lo = 0;
    double t_end = 0.0, dt_samples = 0.0;
    std::vector<std::vector<double>> U_samples;  // [k][i] = U(k dt, j_lo + i)
    std::vector<WaveDiagnostic> diagnostics;
    FrontTrace trace;
    bool passed = true;

    double U(double t, long j) const {
        auto k = static_cast<std::size_t>(std::min(std::max(t / dt_samples, 0.0),
                                                   static_cast<double>(U_samples.size() - 1)));
        if (k >= U_samples.size() - 1) k = U_samples.size() - 2;
        double fr = t / dt_samples - static_cast<double>(k);
        auto i = static_cast<std::size_t>(j - j_lo);
        return U_samples[k][i] * (1.0 - fr) + U_samples[k + 1][i] * fr;
    }
};

/// Reconstructs U(t,j) from the converged upper profile at z = 0 by direct
/// lattice integration and evaluates the envelope, decay, left-limit, residual,
/// periodicity, and uniqueness-gap diagnostics.
inline PeriodicWave assemble_wave(const WaveProfile& upper, const WaveProfile& lower,
                                  const CoefficientField& field, const SubSuper& ss,
                                  const FloquetResult& fl_mu, const FloquetResult& fl_mup,
                                  const EntireSolution& uplus, double conv_tol) {
    if (upper.values.empty() || lower.values.empty())
        throw ParameterError("assemble_wave: profiles not converged");
    PeriodicWave wave;
    wave.c = ss.params.c;
    wave.mu = ss.params.mu;
    wave.mu_prime = ss.params.mu_prime;
    wave.d_star = ss.params.d;
    wave.d1_star = ss.params.d1;
    wave.x_lo = upper.x_lo;
    wave.h = upper.h;
    wave.profile_upper = upper.values;
    wave.profile_lower = lower.values;
    wave.gap = sup_diff(upper.values, lower.values);

    const double T = field.T();
    const double c = wave.c;
    auto add = [&](const std::string& name, double value, double tol, bool pass) {
        wave.diagnostics.push_back({name, value, tol, pass});
        wave.passed = wave.passed && pass;
    };

    // U(0, j) = W(j, 0): integer x sit exactly on the grid when x_lo is integral
    const auto m = static_cast<long>(std::llround(1.0 / upper.h));
    wave.j_lo = static_cast<long>(std::llround(upper.x_lo));
    const long nj = static_cast<long>(upper.values.size() - 1) / m + 1;
    LatticeState st;
    st.offset = wave.j_lo;
    st.time = 0.0;
    st.values.resize(static_cast<std::size_t>(nj));
    for (long i = 0; i < nj; ++i)
        st.values[static_cast<std::size_t>(i)] = upper.values[static_cast<std::size_t>(i * m)];
    st.boundary = Boundary::front(uplus.evaluator(), fl_mu.mu,
                                  [fl_mu](double t, long j) { return fl_mu.psi(t, j); });

    wave.t_end = 5.0 * T;
    double dt_bound = 0.25 / (2.0 * field.d_max() + field.uf_lipschitz());
    double dt = std::min(dt_bound * 0.5, 0.004);
    long n_steps = static_cast<long>(std::ceil(wave.t_end / dt));
    n_steps = ((n_steps + 19) / 20) * 20;  // align samples with the diagnostic time grid
    dt = wave.t_end / static_cast<double>(n_steps);
    wave.dt_samples = dt;
    SimOptions opts{dt, 1};
    wave.U_samples.reserve(static_cast<std::size_t>(n_steps) + 1);
    LatticeObserver obs = [&](const LatticeState& s) { wave.U_samples.push_back(s.values); };
    integrate(st, field, wave.t_end, opts, obs);

    auto phi = [&](double t, long j) {
        return ss.params.d * std::exp(-ss.params.mu * (static_cast<double>(j) - c * t)) *
               fl_mu.psi(t, j);
    };
    auto phi1 = [&](double t, long j) {
        return ss.params.d1 * std::exp(-ss.params.mu_prime * (static_cast<double>(j) - c * t)) *
               fl_mup.psi(t, j);
    };

    // (a) envelope bound phi - d1* phi1 <= U <= phi + d1* phi1 (upper side also
    // capped by u+); read at exact sample rows so no interpolation error enters
    {
        double worst = 0.0;
        for (int kt = 0; kt <= 20; ++kt) {
            auto ks = static_cast<std::size_t>(n_steps / 20 * kt);
            double t = dt * static_cast<double>(ks);
            for (long j = wave.j_lo + 1; j < wave.j_lo + nj - 1; ++j) {
                double u = wave.U_samples[ks][static_cast<std::size_t>(j - wave.j_lo)];
                double lo = phi(t, j) - phi1(t, j);
                double hi = std::min(phi(t, j) + phi1(t, j), uplus.value(t, j));
                worst = std::max({worst, lo - u, u - hi});
            }
        }
        add("envelope-bound", worst, 1e-6, worst <= 1e-6);
    }
    // (b) decay ratio U / phi -> 1 where phi1/phi < 1e-3; the last few sites
    // sit in the boundary layer of the exponential right ghost and are skipped
    {
        double t = 0.0;
        double worst = 0.0;
        bool seen = false;
        for (long j = wave.j_lo + 1; j < wave.j_lo + nj - 10; ++j) {
            if (phi1(t, j) / phi(t, j) < 1e-3 && phi(t, j) > 1e-250) {
                double r = wave.U(t, j) / phi(t, j);
                worst = std::max(worst, std::abs(r - 1.0));
                seen = true;
            }
        }
        add("decay-ratio", worst, 0.05, seen && worst < 0.05);
    }
    // (c) left limit U -> u+
    {
        double worst = 0.0;
        for (int kt = 0; kt <= 10; ++kt) {
            double t = wave.t_end * static_cast<double>(kt) / 10.0;
            for (long j = wave.j_lo + 1; j <= wave.j_lo + 5; ++j)
                worst = std::max(worst, std::abs(wave.U(t, j) / uplus.value(t, j) - 1.0));
        }
        add("left-limit", worst, 1e-2, worst < 1e-2);
    }
    // (d) ODE residual along the lattice equation via 4th-order time differences
    {
        double worst = 0.0;
        const long stride = 25;  // keep the check affordable
        for (std::size_t k = 2; k + 2 < wave.U_samples.size(); k += stride) {
            double t = dt * static_cast<double>(k);
            const auto& um2 = wave.U_samples[k - 2];
            const auto& um1 = wave.U_samples[k - 1];
            const auto& u0 = wave.U_samples[k];
            const auto& up1 = wave.U_samples[k + 1];
            const auto& up2 = wave.U_samples[k + 2];
            for (long i = 1; i + 1 < nj; ++i) {
                auto ii = static_cast<std::size_t>(i);
                double ut = (um2[ii] - 8.0 * um1[ii] + 8.0 * up1[ii] - up2[ii]) / (12.0 * dt);
                long j = wave.j_lo + i;
                double f = field.d(t, j + 1) * (u0[ii + 1] - u0[ii]) +
                           field.d(t, j - 1) * (u0[ii - 1] - u0[ii]) + u0[ii] * field.f(t, j, u0[ii]);
                worst = std::max(worst, std::abs(ut - f));
            }
        }
        add("ode-residual", worst, 1e-6, worst < 1e-6);
    }
    // (e) periodicity defects: fixed-point residuals of the converged chains
    {
        double defect = std::max(upper.iterates_delta.back(), lower.iterates_delta.back());
        add("time-periodicity", defect, 10.0 * conv_tol, defect < 10.0 * conv_tol);
    }
    // uniqueness gap
    add("upper-lower-gap", wave.gap, 1e-4, wave.gap < 1e-4);

    // front trace on the reconstructed solution
    {
        LatticeState s0;
        s0.offset = wave.j_lo;
        s0.time = 0.0;
        s0.values = wave.U_samples.front();
        s0.boundary = st.boundary;
        wave.trace = front_location(s0, field, wave.t_end, uplus.evaluator(), 0.5,
                                    SimOptions{dt, std::max<long>(1, n_steps / 100)});
    }
    return wave;
}

// ---------------------------------------------------------------------------
// End-to-end pipeline
// ---------------------------------------------------------------------------

struct PeriodicWaveBundle {
    SpeedResult speed;
    FloquetResult fl_mu, fl_mup, fl_zero;
    EntireSolution uplus;
    SubSuper ss;
    WaveProfile upper, lower;
    PeriodicWave wave;
};

/// Full construction for a given supercritical speed c > c*: entire solution,
/// tilts, explicit sub/super pair, both monotone iterations, and assembly.
inline PeriodicWaveBundle build_periodic_wave(const CoefficientField& field, double c,
                                              const IterateOptions& opt = {},
                                              double uplus_tol = 1e-8, long scan_points = 10000) {
    PeriodicWaveBundle bundle;
    bundle.uplus = compute_entire_solution(field, 2.0 * field.T(), uplus_tol);
    bundle.speed = find_mu_star(field, 0.05, 5.0, scan_points);
    double mu = mu_from_speed(field, bundle.speed, c);
    double mup = select_mu_prime(field, bundle.speed, mu);
    bundle.fl_mu = lambda_of_mu(field, mu);
    bundle.fl_mup = lambda_of_mu(field, mup);
    bundle.fl_zero = lambda_of_mu(field, 0.0);

    SubSuperParams params;
    params.d = 1.0;
    params.mu = mu;
    params.mu_prime = mup;
    params.c = c;
    params.d1 = 2.0 * compute_d0(field, bundle.fl_mu, bundle.fl_mup, c, params.d) * params.d;
    bundle.ss = build_sub_super(field, params, bundle.fl_mu, bundle.fl_mup, bundle.fl_zero,
                                bundle.uplus);
    bundle.upper = iterate_profile(field, c, bundle.ss, ProfileSide::upper, bundle.fl_mu,
                                   bundle.uplus, opt);
    bundle.lower = iterate_profile(field, c, bundle.ss, ProfileSide::lower, bundle.fl_mu,
                                   bundle.uplus, opt);
    bundle.wave = assemble_wave(bundle.upper, bundle.lower, field, bundle.ss, bundle.fl_mu,
                                bundle.fl_mup, bundle.uplus, opt.tol);
    return bundle;
}

}  // namespace latwave
