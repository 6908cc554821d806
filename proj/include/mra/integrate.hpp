#pragma once

// Semi-implicit Euler-Maruyama stepper for the Galerkin system.  The stiff
// linear part is treated implicitly, everything else explicitly:
//
//   gamma_j^{k+1} = ( gamma_j^k + dt (F_j(u^k) + h_j(t_k)) + sigma_j(u^k) dW_k )
//                   / ( 1 + dt a(|u^k|_V^2) lambda_j )
//
// with a single scalar Wiener increment dW_k shared by all modes.  The
// implicit division makes the linear test problem unconditionally stable.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "brownian.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "spectral.hpp"

namespace mra {

constexpr double blow_up_threshold = 1e12;  // on |u|_H^2

// Scratch buffers so per-step allocation disappears from hot loops.
struct StepWork {
    double v_sq = 0.0;
    double a_value = 0.0;
    std::vector<double> synth;        // u^k on the grid
    std::vector<double> fgrid;        // f(u^k) on the grid
    std::vector<double> F;            // reaction modes
    std::vector<double> sigma_modes;  // noise modes (stochastic mode only)
    std::vector<double> h_modes;      // forcing modes
    std::vector<double> sgrid;        // sigma(u^k) on the grid
};

inline void step_core(const ModelParams& p, const Basis& b, const std::vector<double>& gamma_in,
                      double t, double dt, double dW, std::vector<double>& gamma_out,
                      StepWork& work) {
    const std::size_t n = static_cast<std::size_t>(b.N);
    work.v_sq = v_norm_sq(b, gamma_in);
    work.a_value = p.a(work.v_sq);
    synthesize_into(b, gamma_in, work.synth);
    work.fgrid.resize(work.synth.size());
    for (std::size_t k = 0; k < work.synth.size(); ++k) work.fgrid[k] = p.f(work.synth[k]);
    analyze_into(b, work.fgrid, work.F);
    work.h_modes = p.h.modes_at(t, b.N);

    const bool noisy = p.mode == Mode::stochastic && !p.sigma.is_zero();
    if (noisy) {
        work.sgrid.resize(work.synth.size());
        for (std::size_t k = 0; k < work.synth.size(); ++k) work.sgrid[k] = p.sigma(work.synth[k]);
        analyze_into(b, work.sgrid, work.sigma_modes);
    }

    gamma_out.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        double num = gamma_in[j] + dt * (work.F[j] + work.h_modes[j]);
        if (noisy) num += work.sigma_modes[j] * dW;
        gamma_out[j] = num / (1.0 + dt * work.a_value * b.lambda[j]);
    }
}

inline SpectralState step_deterministic(const ModelParams& p, const SpectralState& u, double t,
                                        double dt) {
    StepWork work;
    std::vector<double> out;
    step_core(p, *u.basis, u.gamma, t, dt, 0.0, out, work);
    return make_state(*u.basis, std::move(out));
}

inline SpectralState step_stochastic(const ModelParams& p, const SpectralState& u, double t,
                                     double dt, double dW) {
    StepWork work;
    std::vector<double> out;
    step_core(p, *u.basis, u.gamma, t, dt, dW, out, work);
    return make_state(*u.basis, std::move(out));
}

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;  // mode coefficients at each time
    std::vector<double> h_sq;                 // |u|_H^2
    std::vector<double> v_sq;                 // |u|_V^2
    std::vector<double> a_value;              // a(|u|_V^2)
    std::vector<double> h2_diag;              // |Delta u|_H^2 = sum lambda_j^2 gamma_j^2
};

// Integrates from tau to T with uniform step dt (the horizon is snapped to a
// whole number of steps).  Pass a stream for the stochastic mode, nullptr for
// the deterministic one.  Throws BlowUpError once |u|_H^2 exceeds 1e12.
inline Trajectory simulate_path(const ModelParams& p, const Basis& b,
                                const std::vector<double>& gamma0, double tau, double T, double dt,
                                const BrownianStream* stream) {
    if (!(dt > 0.0)) throw ConfigError("simulate_path: dt must be positive");
    if (!(T > tau)) throw ConfigError("simulate_path: empty time interval");
    if (p.mode == Mode::stochastic && !p.sigma.is_zero() && stream == nullptr)
        throw ConfigError("simulate_path: stochastic mode needs a Wiener stream");
    const long long K = std::llround((T - tau) / dt);
    if (K < 1) throw ConfigError("simulate_path: horizon shorter than one step");

    Trajectory traj;
    traj.times.reserve(static_cast<std::size_t>(K) + 1);
    traj.states.reserve(static_cast<std::size_t>(K) + 1);
    auto record = [&](double t, const std::vector<double>& g) {
        traj.times.push_back(t);
        traj.states.push_back(g);
        const Norms n = sobolev_norms(b, g);
        traj.h_sq.push_back(n.h_sq);
        traj.v_sq.push_back(n.v_sq);
        traj.a_value.push_back(p.a(n.v_sq));
        double d = 0.0;
        for (int j = 0; j < b.N; ++j) d += b.lambda[j] * b.lambda[j] * g[j] * g[j];
        traj.h2_diag.push_back(d);
    };

    std::vector<double> cur(gamma0), next;
    if (static_cast<int>(cur.size()) != b.N)
        throw DimensionError("simulate_path: initial data has wrong mode count");
    record(tau, cur);
    StepWork work;
    for (long long k = 0; k < K; ++k) {
        const double t = tau + static_cast<double>(k) * dt;
        const double dW = stream ? stream->increment(static_cast<std::uint64_t>(k)) : 0.0;
        step_core(p, b, cur, t, dt, dW, next, work);
        cur.swap(next);
        const double e = h_norm_sq(b, cur);
        if (!(e <= blow_up_threshold))
            throw BlowUpError("simulate_path: energy exceeded the blow-up threshold",
                              k + 1, tau + static_cast<double>(k + 1) * dt, e);
        record(tau + static_cast<double>(k + 1) * dt, cur);
    }
    return traj;
}

// Per-interval defect of the discrete energy identity
//
//   |u^{k+1}|^2 - |u^k|^2 = ( -2 a |u^k|_V^2 + 2 (f(u^k) + h(t_k), u^k)
//                             + |P_N sigma(u^k)|^2 ) dt
//                           + 2 (sigma(u^k), u^k) dW_k + r_k .
//
// The Ito correction uses the projected noise energy sum_j sigma_j^2 since
// only the first N modes are driven.  For an exact scheme r_k would vanish;
// for this one E r_k = O(dt^2) and the fluctuating part is O(dt) per step.
inline std::vector<double> energy_residual(const ModelParams& p, const Basis& b,
                                           const Trajectory& traj, const BrownianStream* stream) {
    const std::size_t K = traj.times.size();
    if (K < 2) return {};
    std::vector<double> res(K - 1);
    std::vector<double> synth, fgrid, F, smodes, hmodes;
    for (std::size_t k = 0; k + 1 < K; ++k) {
        const std::vector<double>& g = traj.states[k];
        const double dt = traj.times[k + 1] - traj.times[k];
        const double a = traj.a_value[k];
        synthesize_into(b, g, synth);
        fgrid.resize(synth.size());
        for (std::size_t i = 0; i < synth.size(); ++i) fgrid[i] = p.f(synth[i]);
        analyze_into(b, fgrid, F);
        hmodes = p.h.modes_at(traj.times[k], b.N);
        double pairing = 0.0;
        for (int j = 0; j < b.N; ++j) pairing += (F[j] + hmodes[j]) * g[j];

        double ito = 0.0, noise = 0.0;
        if (p.mode == Mode::stochastic && !p.sigma.is_zero()) {
            std::vector<double> sgrid(synth.size());
            for (std::size_t i = 0; i < synth.size(); ++i) sgrid[i] = p.sigma(synth[i]);
            analyze_into(b, sgrid, smodes);
            double inner = 0.0;
            for (int j = 0; j < b.N; ++j) {
                ito += smodes[j] * smodes[j];
                inner += smodes[j] * g[j];
            }
            const double dW = stream ? stream->increment(static_cast<std::uint64_t>(k)) : 0.0;
            noise = 2.0 * inner * dW;
        }
        res[k] = traj.h_sq[k + 1] - traj.h_sq[k] + 2.0 * dt * a * traj.v_sq[k] -
                 2.0 * dt * pairing - dt * ito - noise;
    }
    return res;
}

} // namespace mra
