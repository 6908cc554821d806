#pragma once

// Long-time estimates for the Galerkin model.  Everything here is built from
// one differential inequality for the mean energy E(t) = E |u(t)|_H^2:
//
//   dE/dt <= -limit * E + K1 + 2 E (h(t), u(t))
//
// where limit = 2 m lambda_1 (deterministic) or 2 (m lambda_1 - gamma4 - C^2)
// (stochastic).  Splitting the forcing term with Young's inequality at a
// parameter eps in (0,1) gives the working rate = (1-eps) * limit and the
// constants K2 = 1 / (eps * limit), so that
//
//   E(t) <= e^{-rate (t-tau)} E(tau) + K1/rate
//           + K2 * int_tau^t e^{-rate (t-s)} |h(s)|^2 ds.
//
// Sending tau -> -infinity yields the absorbing radius
//
//   R^2(t) = 1 + K1/rate + K2 * int_{-infinity}^t e^{-rate (t-s)} |h(s)|^2 ds,
//
// with a unit of headroom so that entry is reached in finite time.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ensemble.hpp"
#include "errors.hpp"
#include "forcing.hpp"
#include "integrate.hpp"
#include "model.hpp"
#include "spectral.hpp"

namespace mra {

struct DerivedConstants {
    Mode mode = Mode::deterministic;
    double eps = 0.0;            // Young split parameter in (0,1)
    double rate = 0.0;           // decay rate: (1-eps) * admissible_sup
    double admissible_sup = 0.0; // supremum of admissible rates
    double K1 = 0.0;
    double K2 = 0.0;
    bool beyond_stated_range = false;  // rate in the aggressive half (eps < 1/2)
    std::string provenance;
};

enum class RateSpec { by_eps, by_rate };

inline DerivedConstants derive_constants(const ModelParams& p, const Basis& b, double value,
                                         RateSpec spec) {
    DerivedConstants dc;
    dc.mode = p.mode;
    const double lam1 = b.lambda[0];
    if (p.mode == Mode::deterministic) {
        if (!p.f.diss)
            throw ConfigError("derive_constants: reaction law has no polynomial sign certificate");
        dc.admissible_sup = 2.0 * p.a.m * lam1;
        dc.K1 = 2.0 * p.f.diss->beta * b.L;
        dc.provenance = "K1 = 2 beta |O| from the sign certificate; limit = 2 m lambda_1";
    } else {
        if (!p.f.quad)
            throw ConfigError("derive_constants: reaction law has no quadratic sign certificate");
        const double cs = p.sigma.lipschitz;
        const double D = p.a.m * lam1 - p.f.quad->gamma4 - cs * cs;
        if (!(D > 0.0))
            throw RateRangeError("derive_constants: dissipativity gap m lambda_1 - gamma4 - C^2 "
                                 "is not positive");
        dc.admissible_sup = 2.0 * D;
        dc.K1 = 2.0 * p.f.quad->gamma3 * b.L + 2.0 * p.sigma.sigma0_norm_sq(b.L);
        dc.provenance =
            "K1 = 2 gamma3 |O| + 2 |sigma(0)|^2; limit = 2 (m lambda_1 - gamma4 - C^2)";
    }
    if (p.f.sampled || p.a.sampled) dc.provenance += " (claims sampled, not certified)";

    if (spec == RateSpec::by_eps) {
        if (!(value > 0.0 && value < 1.0))
            throw RateRangeError("derive_constants: eps must lie in (0, 1)");
        dc.eps = value;
        dc.rate = (1.0 - value) * dc.admissible_sup;
    } else {
        if (!(value > 0.0 && value < dc.admissible_sup))
            throw RateRangeError("derive_constants: rate must lie in (0, " +
                                 std::to_string(dc.admissible_sup) + ")");
        dc.rate = value;
        dc.eps = 1.0 - value / dc.admissible_sup;
    }
    dc.K2 = 1.0 / (dc.eps * dc.admissible_sup);
    dc.beyond_stated_range = p.mode == Mode::stochastic && dc.eps < 0.5;
    return dc;
}

inline double absorbing_radius_sq(const ModelParams& p, const DerivedConstants& dc, double t) {
    return 1.0 + dc.K1 / dc.rate + dc.K2 * p.h.weighted_tail(t, dc.rate);
}

// Mean-energy upper bound at time t for data of mean energy E0 released at tau.
inline double decay_bound(const DerivedConstants& dc, const ForcingSpec& h, double tau, double t,
                          double E0) {
    if (!(t >= tau)) throw ConfigError("decay_bound: t must not precede tau");
    return std::exp(-dc.rate * (t - tau)) * E0 + dc.K1 / dc.rate +
           dc.K2 * h.window_decay(tau, t, dc.rate);
}

inline Boundedness radius_boundedness(const ForcingSpec& h, double rate) {
    return classify_weighted_tail(h, rate);
}

// -------------------------------------------------------------- entry times

// Smallest T >= 0 such that for every lead s >= T the released family has
// decayed under the headroom: e^{-rate s} rho^2(t - s) <= 1.  Requires a
// family with bounded supports that is tempered for this rate.
inline double pullback_entry_time(const DerivedConstants& dc, const FamilySpec& family,
                                  double t_target, double tol = 1e-6) {
    if (!family.is_sup_bounded())
        throw UniverseError("pullback_entry_time: family has unbounded supports");
    if (!family.universe_member(dc.rate))
        throw UniverseError("pullback_entry_time: family grows too fast backwards for this rate");

    auto phi = [&](double s) {
        return std::exp(-dc.rate * s) * family.norm_sq(t_target - s);
    };
    // phi has at most one interior local maximum; past s_star it decreases.
    double s_star = 0.0;
    if (family.shape == FamilySpec::Shape::ball_uniform &&
        family.profile.kind == RadiusProfile::Kind::poly_abs)
        s_star = std::max(0.0, t_target - 1.0 + family.profile.degree / dc.rate);
    auto tail_sup = [&](double T) {
        return std::max(phi(T), phi(std::max(T, s_star)));
    };

    if (tail_sup(0.0) <= 1.0) return 0.0;
    double lo = 0.0, hi = std::max(1.0, s_star);
    int doubles = 0;
    while (tail_sup(hi) > 1.0) {
        lo = hi;
        hi *= 2.0;
        if (++doubles > 200)
            throw NonConvergenceError("pullback_entry_time: no finite entry time found");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (tail_sup(mid) <= 1.0 ? hi : lo) = mid;
    }
    return hi;
}

struct EntryRow {
    double s = 0.0;          // lead time before the target
    double mean_h_sq = 0.0;  // ensemble mean energy at the target time
    double radius_sq = 0.0;
    bool absorbed = false;
};

struct EntryMeasurement {
    std::vector<EntryRow> rows;
    double measured_T = std::numeric_limits<double>::quiet_NaN();
    double theory_T = 0.0;
};

// Releases the family at tau = t_target - s for each lead s and checks entry
// into the absorbing ball at the target time.  measured_T is the smallest
// grid lead from which every larger lead is absorbed as well.
inline EntryMeasurement measure_entry_time(const ModelParams& p, const Basis& b,
                                           const DerivedConstants& dc, const FamilySpec& family,
                                           double t_target, const std::vector<double>& leads,
                                           std::uint64_t P, std::uint64_t seed, double dt,
                                           const EnsembleOptions& opts = {}) {
    EntryMeasurement out;
    out.theory_T = pullback_entry_time(dc, family, t_target);
    const double radius = absorbing_radius_sq(p, dc, t_target);
    for (double s : leads) {
        if (!(s > 0.0)) throw ConfigError("measure_entry_time: leads must be positive");
        const double tau = t_target - s;
        const long long K = std::llround(s / dt);
        const auto res = run_ensemble(p, b, family, P, seed, tau, t_target, dt,
                                      static_cast<std::uint64_t>(std::max<long long>(K, 1)), opts);
        EntryRow row;
        row.s = s;
        row.mean_h_sq = res.mean_h_sq.back();
        row.radius_sq = radius;
        row.absorbed = row.mean_h_sq <= radius;
        out.rows.push_back(row);
    }
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        bool all = true;
        for (std::size_t j = i; j < out.rows.size(); ++j) all = all && out.rows[j].absorbed;
        if (all) {
            out.measured_T = out.rows[i].s;
            break;
        }
    }
    return out;
}

// ------------------------------------------------------------- bound reports

struct BoundReport {
    std::string label;
    std::vector<double> times;
    std::vector<double> measured;
    std::vector<double> ci;  // zero for deterministic runs
    std::vector<double> bound;
    double violation_margin = 0.0;  // max over t of measured - ci - bound
    bool pass = false;
};

inline void finalize_report(BoundReport& rep, double slack = 0.0) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rep.times.size(); ++i)
        worst = std::max(worst, rep.measured[i] - rep.ci[i] - rep.bound[i]);
    rep.violation_margin = worst;
    rep.pass = worst <= slack;
}

// Mean-square decay of an ensemble against the Gronwall envelope.  The
// envelope is anchored at the empirical initial mean, so the bound holds at
// tau by construction and the test probes only the dynamics.
inline BoundReport decay_report(const ModelParams& p, const Basis& b, const DerivedConstants& dc,
                                const FamilySpec& family, double tau, double T, double dt,
                                std::uint64_t record_stride, std::uint64_t P, std::uint64_t seed,
                                const EnsembleOptions& opts = {}) {
    const EnsembleResult res = run_ensemble(p, b, family, P, seed, tau, T, dt, record_stride, opts);
    BoundReport rep;
    rep.label = "mean-square decay";
    rep.times = res.times;
    rep.measured = res.mean_h_sq;
    rep.ci = res.ci_half_width;
    rep.bound.resize(res.times.size());
    for (std::size_t i = 0; i < res.times.size(); ++i)
        rep.bound[i] = decay_bound(dc, p.h, tau, res.times[i], res.initial_mean_h_sq);
    finalize_report(rep);
    return rep;
}

// Mean-square distance of two solutions sharing the same Wiener path against
// the exponential continuity envelope e^{(2 eta + C^2)(t - tau)} |u0 - v0|^2.
inline BoundReport continuity_gap(const ModelParams& p, const Basis& b,
                                  const std::vector<double>& u0, const std::vector<double>& v0,
                                  double tau, double T, double dt, std::uint64_t record_stride,
                                  std::uint64_t P, std::uint64_t seed, double slack = 0.0) {
    if (!p.f.deriv_sup)
        throw ConfigError("continuity_gap: reaction law has no derivative bound");
    const long long K = std::llround((T - tau) / dt);
    if (K < 1) throw ConfigError("continuity_gap: horizon shorter than one step");
    std::vector<std::uint64_t> rec;
    for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(K); k += record_stride)
        rec.push_back(k);
    rec.push_back(static_cast<std::uint64_t>(K));
    const std::size_t R = rec.size();

    const bool noisy = p.mode == Mode::stochastic && !p.sigma.is_zero();
    const std::uint64_t paths = noisy ? P : 1;
    std::vector<double> mean(R, 0.0), m2(R, 0.0);
    StepWork work;
    std::vector<double> u, v, un, vn;
    for (std::uint64_t path = 0; path < paths; ++path) {
        u = u0;
        v = v0;
        BrownianStream stream{seed, path, dt};
        std::size_t ri = 0;
        auto gap_sq = [&]() {
            double s = 0.0;
            for (int j = 0; j < b.N; ++j) {
                const double d = u[j] - v[j];
                s += d * d;
            }
            return s;
        };
        auto push = [&](std::uint64_t k, double g) {
            if (ri < R && rec[ri] == k) {
                const double w = 1.0 / static_cast<double>(path + 1);
                const double d = g - mean[ri];
                mean[ri] += d * w;
                m2[ri] += d * (g - mean[ri]);
                ++ri;
            }
        };
        push(0, gap_sq());
        for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(K); ++k) {
            const double t = tau + static_cast<double>(k) * dt;
            const double dW = noisy ? stream.increment(k) : 0.0;
            step_core(p, b, u, t, dt, dW, un, work);
            step_core(p, b, v, t, dt, dW, vn, work);
            u.swap(un);
            v.swap(vn);
            push(k + 1, gap_sq());
        }
    }

    BoundReport rep;
    rep.label = "continuity gap";
    rep.times.resize(R);
    rep.measured = mean;
    rep.ci.assign(R, 0.0);
    rep.bound.resize(R);
    double gap0 = 0.0;
    for (std::size_t j = 0; j < u0.size(); ++j) {
        const double d = u0[j] - v0[j];
        gap0 += d * d;
    }
    const double cs = p.sigma.lipschitz;
    const double c = 2.0 * *p.f.deriv_sup + (noisy ? cs * cs : 0.0);
    for (std::size_t i = 0; i < R; ++i) {
        rep.times[i] = tau + static_cast<double>(rec[i]) * dt;
        rep.bound[i] = std::exp(c * (rep.times[i] - tau)) * gap0;
        if (paths > 1)
            rep.ci[i] = 1.96 * std::sqrt(m2[i] / (static_cast<double>(paths) - 1.0)) /
                        std::sqrt(static_cast<double>(paths));
    }
    finalize_report(rep, slack);
    return rep;
}

// --------------------------------------------------------- parabolic gain

struct SmoothingBound {
    double K1 = 0.0;   // 2 beta |O| (time-slope of the integrated energy)
    double K2 = 0.0;   // window forcing mass / (2 m lambda_1)
    double K3 = 0.0;   // window forcing mass / m
    double value = 0.0;
};

// Uniform-Gronwall envelope for |u(t)|_V^2 over [tau + r, tau + T]:
//   the energy identity bounds the window average of |u|_V^2, the gradient
//   identity bounds its growth, and the two combine into
//   ( (2 T K1 + 2 K2 + E0) / (m r) + K3 ) e^{2 eta r}.
inline SmoothingBound smoothing_bound(const ModelParams& p, const Basis& b, double E0, double tau,
                                      double T, double r) {
    if (p.mode != Mode::deterministic)
        throw ModeError("smoothing_bound: available in deterministic mode only");
    if (!p.f.diss) throw ConfigError("smoothing_bound: reaction law has no sign certificate");
    if (!p.f.deriv_sup) throw ConfigError("smoothing_bound: reaction law has no derivative bound");
    if (!(r > 0.0 && r < T)) throw ConfigError("smoothing_bound: need 0 < r < T");
    const double m = p.a.m;
    const double lam1 = b.lambda[0];
    const double eta = *p.f.deriv_sup;
    SmoothingBound sb;
    sb.K1 = 2.0 * p.f.diss->beta * b.L;
    const double mass = p.h.window_plain(tau, tau + T);
    sb.K2 = mass / (2.0 * lam1 * m);
    sb.K3 = mass / m;
    sb.value = ((2.0 * T * sb.K1 + 2.0 * sb.K2 + E0) / (m * r) + sb.K3) * std::exp(2.0 * eta * r);
    return sb;
}

// ------------------------------------------------------------- steady state

struct SteadyStateOptions {
    double tol = 1e-10;
    int max_iter = 100000;
    double theta0 = 0.5;
};

struct SteadyStateResult {
    std::vector<double> gamma;
    double residual = 0.0;  // Euclidean norm of the drift at the fixed point
    int iterations = 0;
};

// Damped fixed-point iteration for the stationary problem
//   a(|z|_V^2) lambda_j z_j = F_j(z) + h_j,
// available for autonomous deterministic models (constant or zero forcing).
inline SteadyStateResult steady_state(const ModelParams& p, const Basis& b,
                                      const SteadyStateOptions& opts = {}) {
    if (p.mode != Mode::deterministic || !p.sigma.is_zero())
        throw ModeError("steady_state: available for deterministic models only");
    if (p.h.kind != ForcingSpec::Kind::zero && p.h.kind != ForcingSpec::Kind::constant)
        throw ConfigError("steady_state: forcing must be autonomous (zero or constant)");

    const std::size_t n = static_cast<std::size_t>(b.N);
    std::vector<double> gamma(n, 0.0), target(n), candidate(n);
    auto residual_of = [&](const std::vector<double>& g) {
        const std::vector<double> d = drift(p, b, g, 0.0);
        double s = 0.0;
        for (double x : d) s += x * x;
        return std::sqrt(s);
    };
    auto fixed_point_target = [&](const std::vector<double>& g) {
        const double aval = p.a(v_norm_sq(b, g));
        std::vector<double> values, fmodes;
        synthesize_into(b, g, values);
        for (double& v : values) v = p.f(v);
        analyze_into(b, values, fmodes);
        const std::vector<double> hmodes = p.h.modes_at(0.0, b.N);
        for (std::size_t j = 0; j < n; ++j)
            target[j] = (fmodes[j] + hmodes[j]) / (aval * b.lambda[j]);
    };

    double res = residual_of(gamma);
    double theta = opts.theta0;
    SteadyStateResult out;
    for (int it = 0; it < opts.max_iter; ++it) {
        if (res <= opts.tol) {
            out.gamma = gamma;
            out.residual = res;
            out.iterations = it;
            return out;
        }
        fixed_point_target(gamma);
        for (std::size_t j = 0; j < n; ++j)
            candidate[j] = (1.0 - theta) * gamma[j] + theta * target[j];
        const double cres = residual_of(candidate);
        if (cres < res) {
            gamma.swap(candidate);
            res = cres;
            theta = std::min(1.0, theta * 1.2);
        } else {
            theta *= 0.5;
            if (theta < 1e-12)
                throw NonConvergenceError("steady_state: damping underflow without convergence");
        }
    }
    throw NonConvergenceError("steady_state: iteration budget exhausted at residual " +
                              std::to_string(res));
}

} // namespace mra
