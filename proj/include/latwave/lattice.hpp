#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "latwave/coeffs.hpp"
#include "latwave/errors.hpp"
#include "latwave/util.hpp"

namespace latwave {

/// Ghost-value policy for the truncated lattice window.
struct Boundary {
    enum class Kind { periodic, clamp_both, front };
    Kind kind = Kind::clamp_both;
    double clamp_value = 0.0;
    // front policy: left ghost from an entire-solution evaluator, right ghost by
    // exponential continuation u_ghost = u_last * e^{-mu} * psi(t, j_ghost)/psi(t, j_last).
    std::function<double(double, long)> left_value;
    double tail_mu = 0.0;
    std::function<double(double, long)> tail_psi;  // defaults to 1

    static Boundary periodic() { return {Kind::periodic, 0.0, nullptr, 0.0, nullptr}; }
    static Boundary clamp(double v) { return {Kind::clamp_both, v, nullptr, 0.0, nullptr}; }
    static Boundary front(std::function<double(double, long)> uplus, double mu,
                          std::function<double(double, long)> psi = nullptr) {
        return {Kind::front, 0.0, std::move(uplus), mu, std::move(psi)};
    }
};

struct LatticeState {
    long offset = 0;                 // leftmost site index
    std::vector<double> values;
    double time = 0.0;
    Boundary boundary;

    long size() const { return static_cast<long>(values.size()); }

    void validate() const {
        if (values.size() < 3) throw ParameterError("LatticeState: window length must be >= 3");
        for (double v : values)
            if (!finite(v)) throw ParameterError("LatticeState: non-finite value");
    }
};

struct SimOptions {
    double dt = 0.005;
    long output_stride = 1;
};

struct IntegrateStats {
    long clamped = 0;   // undershoots in [-1e-12, 0) snapped to zero
    long steps = 0;
};

namespace detail {

inline double ghost_left(const Boundary& b, double t, long j_ghost, double u_first) {
    switch (b.kind) {
        case Boundary::Kind::periodic: return u_first;  // caller overrides with the far end
        case Boundary::Kind::clamp_both: return b.clamp_value;
        case Boundary::Kind::front: return b.left_value(t, j_ghost);
    }
    return 0.0;
}

inline double ghost_right(const Boundary& b, double t, long j_last, double u_last) {
    switch (b.kind) {
        case Boundary::Kind::periodic: return u_last;  // caller overrides with the far end
        case Boundary::Kind::clamp_both: return b.clamp_value;
        case Boundary::Kind::front: {
            double ratio = 1.0;
            if (b.tail_psi) ratio = b.tail_psi(t, j_last + 1) / b.tail_psi(t, j_last);
            return u_last * std::exp(-b.tail_mu) * ratio;
        }
    }
    return 0.0;
}

// One RHS evaluation into `out`; `u` may be a stage vector distinct from state.values.
inline void lattice_rhs(const LatticeState& shape, const CoefficientField& field, double t,
                        const std::vector<double>& u, std::vector<double>& out) {
    const long n = static_cast<long>(u.size());
    const long off = shape.offset;

    // ghost values use the stage vector's endpoints
    double gl, gr;
    if (shape.boundary.kind == Boundary::Kind::periodic) {
        gl = u.back();
        gr = u.front();
    } else {
        gl = ghost_left(shape.boundary, t, off - 1, u.front());
        gr = ghost_right(shape.boundary, t, off + n - 1, u.back());
    }

    if (field.separable()) {
        const auto& sc = *field.separable();
        const double db = sc.d_base(t), dm = sc.d_mod(t);
        const double rb = sc.r_base(t), rm = sc.r_mod(t);
        const double a = sc.a(t);
        if (dm == 0.0 && rm == 0.0) {  // spatially homogeneous: skip site lookups
            for (long i = 0; i < n; ++i) {
                const double uc = u[i];
                const double uL = (i == 0) ? gl : u[i - 1];
                const double uR = (i == n - 1) ? gr : u[i + 1];
                const double f = rb - a * (uc > 0.0 ? uc : 0.0);
                out[i] = db * (uR + uL - 2.0 * uc) + uc * f;
            }
            return;
        }
        for (long i = 0; i < n; ++i) {
            const long j = off + i;
            const double uc = u[i];
            const double uL = (i == 0) ? gl : u[i - 1];
            const double uR = (i == n - 1) ? gr : u[i + 1];
            const double dR = db + dm * sc.site(static_cast<double>(j + 1));
            const double dL = db + dm * sc.site(static_cast<double>(j - 1));
            const double r = rb + rm * sc.site(static_cast<double>(j));
            const double f = r - a * (uc > 0.0 ? uc : 0.0);
            out[i] = dR * (uR - uc) + dL * (uL - uc) + uc * f;
        }
    } else {
        for (long i = 0; i < n; ++i) {
            const long j = off + i;
            const double uc = u[i];
            const double uL = (i == 0) ? gl : u[i - 1];
            const double uR = (i == n - 1) ? gr : u[i + 1];
            out[i] = field.d(t, j + 1) * (uR - uc) + field.d(t, j - 1) * (uL - uc) +
                     uc * field.f(t, j, uc);
        }
    }
}

}  // namespace detail

/// Right-hand side of the lattice equation at the state's current time.
inline std::vector<double> rhs(const LatticeState& state, const CoefficientField& field) {
    state.validate();
    std::vector<double> out(state.values.size());
    detail::lattice_rhs(state, field, state.time, state.values, out);
    return out;
}

using LatticeObserver = std::function<void(const LatticeState&)>;

/// Fixed-step RK4 integration to t1. Preserves nonnegativity up to an absolute
/// undershoot tolerance of 1e-12 (clamped and counted); deeper undershoot or
/// non-finite values abort.
inline LatticeState integrate(LatticeState state, const CoefficientField& field, double t1,
                              const SimOptions& opts, const LatticeObserver& observer = nullptr,
                              IntegrateStats* stats = nullptr) {
    state.validate();
    if (t1 < state.time) throw ParameterError("integrate: t1 must be >= state.time");
    double dt_bound = 0.25 / (2.0 * field.d_max() + field.uf_lipschitz());
    if (opts.dt <= 0.0 || opts.dt > dt_bound)
        throw StabilityError("integrate: dt=" + std::to_string(opts.dt) +
                             " exceeds stability bound " + std::to_string(dt_bound));
    const double span = t1 - state.time;
    if (span == 0.0) {
        if (observer) observer(state);
        return state;
    }
    const auto n_steps = static_cast<long>(std::ceil(span / opts.dt - 1e-12));
    const double h = span / static_cast<double>(n_steps);

    const std::size_t n = state.values.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    IntegrateStats local;
    if (observer) observer(state);
    for (long s = 0; s < n_steps; ++s) {
        const double t = state.time;
        auto& u = state.values;
        detail::lattice_rhs(state, field, t, u, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
        detail::lattice_rhs(state, field, t + 0.5 * h, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
        detail::lattice_rhs(state, field, t + 0.5 * h, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * k3[i];
        detail::lattice_rhs(state, field, t + h, tmp, k4);
        for (std::size_t i = 0; i < n; ++i) {
            u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!finite(u[i]))
                throw BlowUpError("integrate: non-finite value at t=" + std::to_string(t + h), t + h);
            if (u[i] < 0.0) {
                if (u[i] < -1e-12)
                    throw StabilityError("integrate: undershoot " + std::to_string(u[i]) +
                                         " below tolerance at t=" + std::to_string(t + h));
                u[i] = 0.0;
                ++local.clamped;
            }
        }
        state.time = t + h;
        ++local.steps;
        if (observer && ((s + 1) % opts.output_stride == 0 || s + 1 == n_steps)) observer(state);
    }
    state.time = t1;  // avoid drift from repeated addition
    if (stats) *stats = local;
    return state;
}

// ---------------------------------------------------------------------------
// Sub/super-solution residual check
// ---------------------------------------------------------------------------

/// A candidate v(t,j) sampled on a uniform time grid over a site window.
struct TimeGridFunction {
    double t0 = 0.0;
    double dt = 0.0;
    long offset = 0;
    std::vector<std::vector<double>> values;  // values[k][i] = v(t0 + k dt, offset + i)
};

enum class DefectKind { sub, super };

struct ResidualReport {
    double min_defect = 0.0;
    double max_defect = 0.0;
    bool pass = false;
    double tol = 0.0;
};

/// Defect v_t - [d(t,j-1)(v_{j-1}-v_j) + d(t,j+1)(v_{j+1}-v_j) + v f(t,j,v)] over interior
/// samples, with centered differences in time. A sub-solution has defect <= tol,
/// a super-solution defect >= -tol.
inline ResidualReport check_sub_super(const TimeGridFunction& candidate,
                                      const CoefficientField& field, DefectKind kind,
                                      double tol, double dt_max = 0.0) {
    if (candidate.values.size() < 3 || candidate.dt <= 0.0)
        throw ParameterError("check_sub_super: need at least 3 time samples");
    if (dt_max > 0.0 && candidate.dt > dt_max)
        throw ResolutionError("check_sub_super: candidate time step too coarse");
    const long nt = static_cast<long>(candidate.values.size());
    const long n = static_cast<long>(candidate.values[0].size());
    if (n < 3) throw ParameterError("check_sub_super: window too narrow");

    ResidualReport rep;
    rep.tol = tol;
    rep.min_defect = std::numeric_limits<double>::infinity();
    rep.max_defect = -rep.min_defect;
    for (long k = 1; k + 1 < nt; ++k) {
        const double t = candidate.t0 + candidate.dt * static_cast<double>(k);
        const auto& prev = candidate.values[k - 1];
        const auto& cur = candidate.values[k];
        const auto& next = candidate.values[k + 1];
        for (long i = 1; i + 1 < n; ++i) {
            const long j = candidate.offset + i;
            const double vt = (next[i] - prev[i]) / (2.0 * candidate.dt);
            const double lhs = field.d(t, j + 1) * (cur[i + 1] - cur[i]) +
                               field.d(t, j - 1) * (cur[i - 1] - cur[i]) +
                               cur[i] * field.f(t, j, cur[i]);
            const double defect = vt - lhs;
            rep.min_defect = std::min(rep.min_defect, defect);
            rep.max_defect = std::max(rep.max_defect, defect);
        }
    }
    rep.pass = (kind == DefectKind::sub) ? rep.max_defect <= tol : rep.min_defect >= -tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Strictly positive entire solution by pullback
// ---------------------------------------------------------------------------

struct EntireSolution {
    double t_lo = 0.0;     // first sample time
    double dt = 0.0;       // sample spacing
    double T = 0.0;        // period (0 for non-periodic fields)
    long J = 1;
    std::vector<std::vector<double>> samples;  // samples[k][j], j in [0, J)
    std::vector<double> history;               // pullback convergence deltas
    double inf_value = 0.0;

    /// u+_j(t); wraps t modulo T when periodic, clamps to the sampled range otherwise.
    double value(double t, long j) const {
        double tt = t;
        if (T > 0.0) tt = t_lo + wrap(t - t_lo, T);
        double s = (tt - t_lo) / dt;
        auto kmax = static_cast<double>(samples.size() - 1);
        if (s < 0.0) s = 0.0;
        if (s > kmax) s = kmax;
        auto k = static_cast<std::size_t>(s);
        double fr = s - static_cast<double>(k);
        long jj = wrap_index(j, J);
        double a = samples[k][static_cast<std::size_t>(jj)];
        double b = (k + 1 < samples.size()) ? samples[k + 1][static_cast<std::size_t>(jj)] : a;
        return a * (1.0 - fr) + b * fr;
    }

    std::function<double(double, long)> evaluator() const {
        return [self = *this](double t, long j) { return self.value(t, j); };
    }
};

/// Pullback construction of the unique strictly positive entire solution on
/// [t_lo, t_hi]. Periodic fields restrict to the J-site periodic cell and step
/// backwards by whole periods; general time dependence steps back by 1 time unit.
inline EntireSolution compute_entire_solution_range(const CoefficientField& field, double t_lo,
                                                    double t_hi, double tol, long n_max = 200,
                                                    double dt_sim = 0.0) {
    const bool periodic = field.time_periodic();
    const double h_step = periodic ? field.T() : 1.0;
    const long J = field.J();
    const double M = std::max(field.M0(), 1.0) * 1.2;
    if (dt_sim <= 0.0)
        dt_sim = std::min(0.2 / (2.0 * field.d_max() + field.uf_lipschitz()),
                          (periodic ? field.T() : 1.0) / 64.0);
    SimOptions opts{dt_sim, 1};

    EntireSolution sol;
    sol.t_lo = t_lo;
    sol.T = periodic ? field.T() : 0.0;
    sol.J = J;

    std::vector<std::vector<double>> prev_samples;
    double prev_t0 = 0.0;
    for (long n = 1; n <= n_max; ++n) {
        const double start = t_lo - static_cast<double>(n) * h_step;
        LatticeState st;
        st.offset = 0;
        // ring length must be a multiple of J (and >= 3) to keep adjacency right
        long ring = J;
        while (ring < 3) ring += J;
        st.values.assign(static_cast<std::size_t>(ring), M);
        st.time = start;
        st.boundary = Boundary::periodic();

        std::vector<std::vector<double>> samples;
        double sample_dt = 0.0;
        LatticeObserver obs = [&](const LatticeState& s) {
            if (s.time >= t_lo - 1e-12) {
                samples.push_back(std::vector<double>(s.values.begin(),
                                                      s.values.begin() + J));
                if (samples.size() == 1) prev_t0 = s.time;
            }
        };
        // integrate to t_lo first (no recording), then record on [t_lo, t_hi]
        st = integrate(st, field, t_lo, opts);
        st = integrate(st, field, t_hi, opts, obs);
        sample_dt = (t_hi - t_lo) / static_cast<double>(samples.size() - 1);

        if (!prev_samples.empty()) {
            double delta = 0.0;
            for (std::size_t k = 0; k < samples.size(); ++k)
                delta = std::max(delta, sup_diff(samples[k], prev_samples[k]));
            sol.history.push_back(delta);
            if (delta < tol) {
                sol.samples = std::move(samples);
                sol.dt = sample_dt;
                sol.inf_value = std::numeric_limits<double>::infinity();
                for (const auto& row : sol.samples)
                    for (double v : row) sol.inf_value = std::min(sol.inf_value, v);
                if (!(sol.inf_value > 0.0))
                    throw ConvergenceError("compute_entire_solution: limit not strictly positive",
                                           sol.history);
                return sol;
            }
        }
        prev_samples = std::move(samples);
    }
    throw ConvergenceError("compute_entire_solution: no convergence within pullback budget",
                           sol.history);
}

inline EntireSolution compute_entire_solution(const CoefficientField& field, double horizon,
                                              double tol, long n_max = 200) {
    double t_hi = field.time_periodic() ? std::max(horizon, field.T()) : horizon;
    return compute_entire_solution_range(field, 0.0, t_hi, tol, n_max);
}

}  // namespace latwave
