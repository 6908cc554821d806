#pragma once

// Monte Carlo ensembles over independent Wiener paths and random initial
// data.  Each path writes its recorded curve into a preallocated slot, then a
// single sequential pass reduces the slots in path order.  Statistics are
// therefore bit-identical for any thread count, including one.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "brownian.hpp"
#include "errors.hpp"
#include "integrate.hpp"
#include "model.hpp"
#include "spectral.hpp"

namespace mra {

// ------------------------------------------------------- initial-data family

struct RadiusProfile {
    enum class Kind { constant, poly_abs, exp_growth };
    Kind kind = Kind::constant;
    double c = 1.0;      // scale
    double degree = 0;   // poly_abs: rho^2(tau) = c (1 + |tau|)^degree
    double k = 0.0;      // exp_growth: rho^2(tau) = c e^{-k tau}, k > 0

    double rho_sq(double tau) const {
        switch (kind) {
            case Kind::constant: return c;
            case Kind::poly_abs: return c * std::pow(1.0 + std::abs(tau), degree);
            case Kind::exp_growth: return c * std::exp(-k * tau);
        }
        return c;
    }

    static RadiusProfile constant(double c) {
        if (!(c >= 0.0)) throw ConfigError("radius profile: negative squared radius");
        return {Kind::constant, c, 0.0, 0.0};
    }
    static RadiusProfile poly_abs(double c, double degree) {
        if (!(c >= 0.0)) throw ConfigError("radius profile: negative squared radius");
        if (!(degree >= 0.0)) throw ConfigError("radius profile: negative degree");
        return {Kind::poly_abs, c, degree, 0.0};
    }
    static RadiusProfile exp_growth(double c, double k) {
        if (!(c >= 0.0)) throw ConfigError("radius profile: negative squared radius");
        if (!(k > 0.0)) throw ConfigError("radius profile: exp_growth needs k > 0");
        return {Kind::exp_growth, c, 0.0, k};
    }
};

// A tau-indexed family of initial-data distributions.  "point" is the Dirac
// mass at fixed mode coefficients; "gaussian_modes" draws independent
// centered Gaussians per mode; "ball_uniform" draws uniformly from the H-ball
// of squared radius rho^2(tau).
struct FamilySpec {
    enum class Shape { point, gaussian_modes, ball_uniform };
    Shape shape = Shape::point;
    std::vector<double> point_modes;
    std::vector<double> std_modes;  // per-mode standard deviations
    RadiusProfile profile;          // ball_uniform only

    static FamilySpec point(std::vector<double> modes) {
        FamilySpec fam;
        fam.shape = Shape::point;
        fam.point_modes = std::move(modes);
        return fam;
    }
    static FamilySpec gaussian_modes(std::vector<double> stds) {
        FamilySpec fam;
        fam.shape = Shape::gaussian_modes;
        for (double s : stds)
            if (!(s >= 0.0)) throw ConfigError("family: negative mode standard deviation");
        fam.std_modes = std::move(stds);
        return fam;
    }
    static FamilySpec ball_uniform(RadiusProfile profile) {
        FamilySpec fam;
        fam.shape = Shape::ball_uniform;
        fam.profile = profile;
        return fam;
    }

    // Worst-case squared H-norm at time tau (sup over the support).
    double norm_sq(double tau) const {
        switch (shape) {
            case Shape::point: {
                double s = 0.0;
                for (double g : point_modes) s += g * g;
                return s;
            }
            case Shape::gaussian_modes:
                throw UniverseError("family: Gaussian initial data has unbounded support");
            case Shape::ball_uniform: return profile.rho_sq(tau);
        }
        return 0.0;
    }

    // E |u_0|_H^2 at time tau.
    double mean_initial_sq(double tau, int N) const {
        switch (shape) {
            case Shape::point: return norm_sq(tau);
            case Shape::gaussian_modes: {
                double s = 0.0;
                for (double sd : std_modes) s += sd * sd;
                return s;
            }
            case Shape::ball_uniform:
                // E |X|^2 for X uniform in an N-ball of radius rho is rho^2 N/(N+2).
                return profile.rho_sq(tau) * N / (N + 2.0);
        }
        return 0.0;
    }

    bool is_sup_bounded() const { return shape != Shape::gaussian_modes; }

    // Whether sup_tau e^{rate * tau} rho^2(tau) < infinity as tau -> -infinity,
    // i.e. the family belongs to the tempered universe for this rate.
    bool universe_member(double rate) const {
        if (shape != Shape::ball_uniform) return true;
        if (profile.kind != RadiusProfile::Kind::exp_growth) return true;
        return profile.k < rate;
    }

    std::vector<double> sample(const Basis& b, std::uint64_t master_seed, std::uint64_t path,
                               double tau) const {
        const std::size_t n = static_cast<std::size_t>(b.N);
        std::vector<double> g(n, 0.0);
        switch (shape) {
            case Shape::point: {
                if (point_modes.size() > n)
                    throw DimensionError("family: more point modes than basis modes");
                for (std::size_t j = 0; j < point_modes.size(); ++j) g[j] = point_modes[j];
                return g;
            }
            case Shape::gaussian_modes: {
                if (std_modes.size() > n)
                    throw DimensionError("family: more std modes than basis modes");
                for (std::size_t j = 0; j < std_modes.size(); ++j)
                    g[j] = std_modes[j] *
                           counter_gauss(master_seed, path, StreamPurpose::initial, j);
                return g;
            }
            case Shape::ball_uniform: {
                // Direction from N Gaussians, radius from rho u^{1/N}.
                double norm = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    g[j] = counter_gauss(master_seed, path, StreamPurpose::initial, j);
                    norm += g[j] * g[j];
                }
                norm = std::sqrt(norm);
                const double u =
                    counter_uniform(master_seed, path, StreamPurpose::initial, n);
                const double r =
                    std::sqrt(profile.rho_sq(tau)) * std::pow(u, 1.0 / static_cast<double>(b.N));
                const double scale = norm > 0.0 ? r / norm : 0.0;
                for (double& x : g) x *= scale;
                return g;
            }
        }
        return g;
    }
};

// -------------------------------------------------------------- ensemble run

struct EnsembleResult {
    std::vector<double> times;
    std::vector<double> mean_h_sq;
    std::vector<double> ci_half_width;  // 1.96 * sample std / sqrt(P)
    std::vector<double> mean_v_sq;
    std::vector<double> residual_mean;  // empty unless requested
    std::vector<double> residual_ci;
    std::uint64_t paths = 0;
    double initial_mean_h_sq = 0.0;  // empirical mean of |u_0|^2
};

struct EnsembleOptions {
    bool compute_residual = false;
    int threads = 0;  // 0 = resolve from MRA_THREADS / hardware
};

inline int resolve_threads(int override_threads = 0) {
    if (override_threads > 0) return override_threads;
    if (const char* env = std::getenv("MRA_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

inline EnsembleResult run_ensemble(const ModelParams& p, const Basis& b, const FamilySpec& family,
                                   std::uint64_t P, std::uint64_t master_seed, double tau, double T,
                                   double dt, std::uint64_t record_stride,
                                   const EnsembleOptions& opts = {}) {
    if (P == 0) throw ConfigError("run_ensemble: need at least one path");
    if (record_stride == 0) throw ConfigError("run_ensemble: record stride must be positive");
    const long long K = std::llround((T - tau) / dt);
    if (K < 1) throw ConfigError("run_ensemble: horizon shorter than one step");

    // Recorded step indices: every stride-th step plus the final one.
    std::vector<std::uint64_t> rec;
    for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(K); k += record_stride)
        rec.push_back(k);
    rec.push_back(static_cast<std::uint64_t>(K));
    const std::size_t R = rec.size();

    if (static_cast<double>(P) * static_cast<double>(R) > 2e7)
        throw ConfigError("run_ensemble: paths x recorded times exceeds the slot budget; "
                          "reduce recording resolution");

    const bool with_res = opts.compute_residual;
    // Slot layout: per path, R energies, R gradient energies, (R-1) residuals.
    const std::size_t slot = R * 2 + (with_res ? R - 1 : 0);
    std::vector<double> slots(slot * P, 0.0);
    std::vector<double> init_sq(P, 0.0);

    std::atomic<std::uint64_t> next_path{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    std::uint64_t failure_path = ~std::uint64_t{0};

    auto worker = [&]() {
        StepWork work;
        std::vector<double> cur, next, smodes;
        for (;;) {
            const std::uint64_t path = next_path.fetch_add(1);
            if (path >= P) return;
            try {
                cur = family.sample(b, master_seed, path, tau);
                init_sq[path] = h_norm_sq(b, cur);
                BrownianStream stream{master_seed, path, dt};
                const bool noisy = p.mode == Mode::stochastic && !p.sigma.is_zero();
                double* out = slots.data() + slot * path;
                std::size_t ri = 0;
                auto record = [&](std::uint64_t k) {
                    if (ri < R && rec[ri] == k) {
                        const Norms n = sobolev_norms(b, cur);
                        out[ri] = n.h_sq;
                        out[R + ri] = n.v_sq;
                        ++ri;
                    }
                };
                record(0);
                for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(K); ++k) {
                    const double t = tau + static_cast<double>(k) * dt;
                    const double dW = noisy ? stream.increment(k) : 0.0;
                    double res = 0.0;
                    if (with_res) {
                        // Assemble the energy identity pieces before stepping.
                        const double h0 = h_norm_sq(b, cur);
                        const double v0 = v_norm_sq(b, cur);
                        synthesize_into(b, cur, work.synth);
                        work.fgrid.resize(work.synth.size());
                        for (std::size_t i = 0; i < work.synth.size(); ++i)
                            work.fgrid[i] = p.f(work.synth[i]);
                        analyze_into(b, work.fgrid, work.F);
                        work.h_modes = p.h.modes_at(t, b.N);
                        double pairing = 0.0;
                        for (int j = 0; j < b.N; ++j)
                            pairing += (work.F[j] + work.h_modes[j]) * cur[j];
                        double ito = 0.0, inner = 0.0;
                        if (noisy) {
                            work.sgrid.resize(work.synth.size());
                            for (std::size_t i = 0; i < work.synth.size(); ++i)
                                work.sgrid[i] = p.sigma(work.synth[i]);
                            analyze_into(b, work.sgrid, smodes);
                            for (int j = 0; j < b.N; ++j) {
                                ito += smodes[j] * smodes[j];
                                inner += smodes[j] * cur[j];
                            }
                        }
                        step_core(p, b, cur, t, dt, dW, next, work);
                        const double h1 = h_norm_sq(b, next);
                        const double a = work.a_value;
                        res = h1 - h0 + 2.0 * dt * a * v0 - 2.0 * dt * pairing - dt * ito -
                              2.0 * inner * dW;
                    } else {
                        step_core(p, b, cur, t, dt, dW, next, work);
                    }
                    cur.swap(next);
                    const double e = h_norm_sq(b, cur);
                    if (!(e <= blow_up_threshold))
                        throw BlowUpError("run_ensemble: path energy exceeded the blow-up "
                                          "threshold",
                                          static_cast<long long>(k) + 1,
                                          tau + static_cast<double>(k + 1) * dt, e);
                    if (with_res && ri < R && rec[ri] == k + 1)
                        out[2 * R + (ri - 1)] = res;  // residual of the step ending here
                    record(k + 1);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (path < failure_path) {
                    failure_path = path;
                    failure = std::current_exception();
                }
            }
        }
    };

    const int n_threads = resolve_threads(opts.threads);
    if (n_threads <= 1 || P == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    // Sequential reduction in path order: Welford mean/variance per column.
    EnsembleResult result;
    result.paths = P;
    result.times.resize(R);
    for (std::size_t i = 0; i < R; ++i)
        result.times[i] = tau + static_cast<double>(rec[i]) * dt;
    result.mean_h_sq.assign(R, 0.0);
    result.ci_half_width.assign(R, 0.0);
    result.mean_v_sq.assign(R, 0.0);
    std::vector<double> m2(R, 0.0);
    if (with_res) {
        result.residual_mean.assign(R, 0.0);
        result.residual_ci.assign(R, 0.0);
    }
    std::vector<double> res_m2(with_res ? R : 0, 0.0);
    double init_mean = 0.0;
    for (std::uint64_t path = 0; path < P; ++path) {
        const double* in = slots.data() + slot * path;
        const double w = 1.0 / static_cast<double>(path + 1);
        init_mean += (init_sq[path] - init_mean) * w;
        for (std::size_t i = 0; i < R; ++i) {
            const double dh = in[i] - result.mean_h_sq[i];
            result.mean_h_sq[i] += dh * w;
            m2[i] += dh * (in[i] - result.mean_h_sq[i]);
            result.mean_v_sq[i] += (in[R + i] - result.mean_v_sq[i]) * w;
            if (with_res && i > 0) {
                const double r = in[2 * R + (i - 1)];
                const double dr = r - result.residual_mean[i];
                result.residual_mean[i] += dr * w;
                res_m2[i] += dr * (r - result.residual_mean[i]);
            }
        }
    }
    result.initial_mean_h_sq = init_mean;
    if (P > 1) {
        const double inv = 1.0 / (static_cast<double>(P) - 1.0);
        const double root_p = std::sqrt(static_cast<double>(P));
        for (std::size_t i = 0; i < R; ++i) {
            result.ci_half_width[i] = 1.96 * std::sqrt(m2[i] * inv) / root_p;
            if (with_res) result.residual_ci[i] = 1.96 * std::sqrt(res_m2[i] * inv) / root_p;
        }
    }
    return result;
}

} // namespace mra
