#pragma once

// Spectral core for a scalar field on the interval (0, L) with homogeneous
// Dirichlet boundary values.
//
// Eigenpairs of -d2/dx2:   e_j(x) = sqrt(2/L) sin(j pi x / L),
//                          lambda_j = (j pi / L)^2,          j = 1..N.
// Collocation grid:        x_k = k L / (Q+1),                k = 1..Q,
// quadrature weight        w = L / (Q+1).
//
// With S_jk = sin(j pi k / (Q+1)) the discrete orthogonality
//     sum_k S_jk S_ik = (Q+1)/2 * delta_ij      (1 <= i, j <= Q)
// makes analyze/synthesize exact inverses on the first N <= Q modes and
// gives the discrete Parseval identity
//     w * sum_k g(x_k)^2 = sum_j gamma_j^2
// for any band-limited g = sum_{j<=Q} gamma_j e_j.  Quadrature of products
// of band-limited functions by the weight w is therefore exact, which is
// what the energy and monotonicity probes rely on.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"

namespace mra {

struct Basis {
    double L = 0.0;     // domain length |O|
    int N = 0;          // retained modes
    int Q = 0;          // interior collocation points, Q >= 2N
    double weight = 0.0;            // L / (Q+1)
    double norm_factor = 0.0;       // sqrt(2/L)
    std::vector<double> lambda;     // lambda_j, j = 1..N
    std::vector<double> grid;       // x_k, k = 1..Q
    std::vector<double> sine;       // S[(j-1)*Q + (k-1)] = sin(j pi k/(Q+1))
};

inline Basis build_basis(double L, int N, int Q) {
    if (!(L > 0.0)) throw ConfigError("build_basis: domain length must be positive, got " + std::to_string(L));
    if (N < 1) throw ConfigError("build_basis: need at least one mode, got N=" + std::to_string(N));
    if (Q < 2 * N) throw ConfigError("build_basis: quadrature grid too coarse, Q=" + std::to_string(Q) +
                                     " < 2N=" + std::to_string(2 * N));
    Basis b;
    b.L = L;
    b.N = N;
    b.Q = Q;
    b.weight = L / (Q + 1);
    b.norm_factor = std::sqrt(2.0 / L);
    b.lambda.resize(N);
    const double pi = 3.14159265358979323846264338327950288;
    for (int j = 1; j <= N; ++j) {
        const double k = j * pi / L;
        b.lambda[j - 1] = k * k;
    }
    b.grid.resize(Q);
    for (int k = 1; k <= Q; ++k) b.grid[k - 1] = k * L / (Q + 1);
    b.sine.resize(static_cast<std::size_t>(N) * Q);
    for (int j = 1; j <= N; ++j)
        for (int k = 1; k <= Q; ++k)
            b.sine[static_cast<std::size_t>(j - 1) * Q + (k - 1)] =
                std::sin(j * pi * k / (Q + 1));
    return b;
}

// Coefficient vector tied to the basis it was expanded in.
struct SpectralState {
    const Basis* basis = nullptr;
    std::vector<double> gamma;
};

// Point values on the collocation grid of the same basis.
struct GridFunction {
    const Basis* basis = nullptr;
    std::vector<double> values;
};

inline SpectralState make_state(const Basis& b, std::vector<double> gamma) {
    if (static_cast<int>(gamma.size()) != b.N)
        throw DimensionError("make_state: coefficient count " + std::to_string(gamma.size()) +
                             " does not match basis N=" + std::to_string(b.N));
    return SpectralState{&b, std::move(gamma)};
}

inline void synthesize_into(const Basis& b, const std::vector<double>& gamma, std::vector<double>& values) {
    values.assign(b.Q, 0.0);
    for (int j = 0; j < b.N; ++j) {
        const double g = gamma[j];
        if (g == 0.0) continue;
        const double* row = &b.sine[static_cast<std::size_t>(j) * b.Q];
        for (int k = 0; k < b.Q; ++k) values[k] += g * row[k];
    }
    for (int k = 0; k < b.Q; ++k) values[k] *= b.norm_factor;
}

inline GridFunction synthesize(const SpectralState& u) {
    GridFunction g;
    g.basis = u.basis;
    synthesize_into(*u.basis, u.gamma, g.values);
    return g;
}

// L2 projection of grid values onto the first N modes; quadrature form of
// (g, e_j) with uniform weight w.
inline void analyze_into(const Basis& b, const std::vector<double>& values, std::vector<double>& gamma) {
    gamma.assign(b.N, 0.0);
    const double scale = b.weight * b.norm_factor;   // = sqrt(2L)/(Q+1)
    for (int j = 0; j < b.N; ++j) {
        const double* row = &b.sine[static_cast<std::size_t>(j) * b.Q];
        double acc = 0.0;
        for (int k = 0; k < b.Q; ++k) acc += values[k] * row[k];
        gamma[j] = scale * acc;
    }
}

inline SpectralState analyze(const GridFunction& g) {
    SpectralState u;
    u.basis = g.basis;
    analyze_into(*g.basis, g.values, u.gamma);
    return u;
}

struct Norms {
    double h_sq = 0.0;  // |u|_H^2  = sum gamma_j^2
    double v_sq = 0.0;  // |u|_V^2  = sum lambda_j gamma_j^2
};

inline Norms sobolev_norms(const Basis& b, const std::vector<double>& gamma) {
    Norms n;
    for (int j = 0; j < b.N; ++j) {
        const double g2 = gamma[j] * gamma[j];
        n.h_sq += g2;
        n.v_sq += b.lambda[j] * g2;
    }
    return n;
}

inline Norms sobolev_norms(const SpectralState& u) { return sobolev_norms(*u.basis, u.gamma); }

inline double h_norm_sq(const Basis& b, const std::vector<double>& gamma) {
    double s = 0.0;
    for (int j = 0; j < b.N; ++j) s += gamma[j] * gamma[j];
    return s;
}

inline double v_norm_sq(const Basis& b, const std::vector<double>& gamma) {
    double s = 0.0;
    for (int j = 0; j < b.N; ++j) s += b.lambda[j] * gamma[j] * gamma[j];
    return s;
}

// Squared dual norm of a functional with Riesz coefficients w_j in H:
// |w|_{V*}^2 = sum w_j^2 / lambda_j.
inline double dual_norm_sq(const Basis& b, const std::vector<double>& w) {
    if (static_cast<int>(w.size()) != b.N)
        throw DimensionError("dual_norm_sq: coefficient count does not match basis");
    double s = 0.0;
    for (int j = 0; j < b.N; ++j) s += w[j] * w[j] / b.lambda[j];
    return s;
}

inline double quad_norm_sq(const Basis& b, const std::vector<double>& values) {
    double s = 0.0;
    for (int k = 0; k < b.Q; ++k) s += values[k] * values[k];
    return b.weight * s;
}

inline double quad_inner(const Basis& b, const std::vector<double>& f, const std::vector<double>& g) {
    double s = 0.0;
    for (int k = 0; k < b.Q; ++k) s += f[k] * g[k];
    return b.weight * s;
}

} // namespace mra
