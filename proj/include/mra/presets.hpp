#pragma once

// Coefficient presets.  Each preset ships the constants of the structural
// inequalities it satisfies, computed in closed form at construction:
//
//   diffusion a:   0 < m <= a(s) <= M,  s -> a(s^2) s non-decreasing
//   reaction f:    f(r) r   <= -alpha |r|^p + beta        (polynomial sign)
//                  |f(r)|   <= growth_gamma |r|^{p-1} + growth_delta
//                  f'(r)    <= deriv_sup
//                  |f(r)|   <= lin_gamma2 (1 + |r|)        (linear growth)
//                  f(r) r   <= quad_gamma3 + quad_gamma4 r^2
//   noise sigma:   |sigma(r) - sigma(r')| <= lipschitz |r - r'|
//
// A certificate a preset cannot satisfy is simply absent; the assumption
// gate reports that as a failure of the corresponding hypothesis.  Custom
// laws carry user-claimed constants and are flagged "sampled, not
// certified": the gate checks the claims on a fixed grid instead of
// trusting them.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "errors.hpp"

namespace mra {

// ---------------------------------------------------------------- diffusion

struct DiffusionLaw {
    enum class Kind { constant, saturating, custom };

    Kind kind = Kind::constant;
    double m = 1.0;           // certified (or claimed) lower bound
    double M = 1.0;           // certified (or claimed) upper bound
    bool sampled = false;     // true for custom laws: m, M are claims
    double value_const = 1.0;
    std::function<double(double)> fn;  // custom only

    double operator()(double s) const {
        switch (kind) {
            case Kind::constant:   return value_const;
            case Kind::saturating: return m + (M - m) * s / (1.0 + s);
            case Kind::custom:     return fn(s);
        }
        return value_const;
    }

    std::string name() const {
        switch (kind) {
            case Kind::constant:   return "constant";
            case Kind::saturating: return "saturating";
            case Kind::custom:     return "custom";
        }
        return {};
    }

    static DiffusionLaw constant(double c) {
        if (!(c > 0.0)) throw ConfigError("diffusion constant(c): c must be positive, got " + std::to_string(c));
        DiffusionLaw a;
        a.kind = Kind::constant;
        a.value_const = c;
        a.m = c;
        a.M = c;
        return a;
    }

    // a(s) = m + (M - m) s / (1 + s): climbs from m toward M; a(s^2) s has
    // derivative m + (M - m)(3 s^2 + s^4)/(1 + s^2)^2 >= m > 0.
    static DiffusionLaw saturating(double m, double M) {
        if (!(m > 0.0) || !(M >= m))
            throw ConfigError("diffusion saturating(m, M): need 0 < m <= M, got m=" +
                              std::to_string(m) + " M=" + std::to_string(M));
        DiffusionLaw a;
        a.kind = Kind::saturating;
        a.m = m;
        a.M = M;
        return a;
    }

    static DiffusionLaw custom(std::function<double(double)> fn, double claimed_m, double claimed_M) {
        DiffusionLaw a;
        a.kind = Kind::custom;
        a.fn = std::move(fn);
        a.m = claimed_m;
        a.M = claimed_M;
        a.sampled = true;
        return a;
    }
};

// ----------------------------------------------------------------- reaction

struct PolySignCert {      // f(r) r <= -alpha |r|^p + beta
    double alpha = 0.0;    // >= 0; the strict form of the hypothesis wants > 0
    double beta = 0.0;
    double p = 2.0;
    bool strict = false;   // alpha > 0
};

struct PolyGrowthCert {    // |f(r)| <= gamma |r|^{p-1} + delta
    double gamma = 0.0;
    double delta = 0.0;
    double p = 2.0;
};

struct QuadSignCert {      // f(r) r <= gamma3 + gamma4 r^2
    double gamma3 = 0.0;
    double gamma4 = 0.0;
};

struct ReactionLaw {
    enum class Kind { linear, cubic, tanh_sat, custom };

    Kind kind = Kind::linear;
    double slope = 0.0;   // linear
    double eta = 0.0;     // cubic: f(r) = eta r - kappa r^3
    double kappa = 1.0;
    double gain = 0.0;    // tanh_sat: f(r) = gain tanh r
    bool sampled = false;
    std::function<double(double)> fn;  // custom only

    std::optional<PolySignCert> diss;
    std::optional<PolyGrowthCert> growth;
    std::optional<double> deriv_sup;   // sup f', clamped at 0
    std::optional<double> lin_gamma2;  // |f| <= g2 (1 + |r|)
    std::optional<QuadSignCert> quad;

    double operator()(double r) const {
        switch (kind) {
            case Kind::linear:   return slope * r;
            case Kind::cubic:    return eta * r - kappa * r * r * r;
            case Kind::tanh_sat: return gain * std::tanh(r);
            case Kind::custom:   return fn(r);
        }
        return 0.0;
    }

    std::string name() const {
        switch (kind) {
            case Kind::linear:   return "linear";
            case Kind::cubic:    return "cubic";
            case Kind::tanh_sat: return "tanh";
            case Kind::custom:   return "custom";
        }
        return {};
    }

    static ReactionLaw linear(double c) {
        ReactionLaw f;
        f.kind = Kind::linear;
        f.slope = c;
        if (c <= 0.0) f.diss = PolySignCert{-c, 0.0, 2.0, c < 0.0};
        f.growth = PolyGrowthCert{std::abs(c), 0.0, 2.0};
        f.deriv_sup = std::max(c, 0.0);
        f.lin_gamma2 = std::abs(c);
        f.quad = QuadSignCert{0.0, std::max(c, 0.0)};
        return f;
    }

    // f(r) = e r - k r^3, k > 0.  Sign: e r^2 - k r^4 <= -(k/2) r^4 + e+^2/(2k)
    // (maximum of e r^2 - (k/2) r^4 over r).  With gamma4 = 0 the whole
    // positive part fits into gamma3 = e+^2/(4k).  Growth splits through
    // |r| <= 1 + |r|^3.
    static ReactionLaw cubic(double e, double k) {
        if (!(k > 0.0)) throw ConfigError("reaction cubic(eta, kappa): kappa must be positive, got " +
                                          std::to_string(k));
        ReactionLaw f;
        f.kind = Kind::cubic;
        f.eta = e;
        f.kappa = k;
        const double ep = std::max(e, 0.0);
        f.diss = PolySignCert{k / 2.0, ep * ep / (2.0 * k), 4.0, true};
        f.growth = PolyGrowthCert{k + std::abs(e), std::abs(e), 4.0};
        f.deriv_sup = ep;
        f.quad = QuadSignCert{ep * ep / (4.0 * k), 0.0};
        return f;
    }

    // f(r) = g tanh r: bounded, slope at most g.  r tanh r >= 0 kills any
    // -alpha |r|^p bound for g > 0; for g <= 0 the sign certificate holds
    // with alpha = 0.
    static ReactionLaw tanh_sat(double g) {
        ReactionLaw f;
        f.kind = Kind::tanh_sat;
        f.gain = g;
        if (g <= 0.0) f.diss = PolySignCert{0.0, 0.0, 2.0, false};
        f.growth = PolyGrowthCert{0.0, std::abs(g), 2.0};
        f.deriv_sup = std::max(g, 0.0);
        f.lin_gamma2 = std::abs(g);
        f.quad = QuadSignCert{0.0, std::max(g, 0.0)};
        return f;
    }

    struct Claims {
        std::optional<PolySignCert> diss;
        std::optional<PolyGrowthCert> growth;
        std::optional<double> deriv_sup;
        std::optional<double> lin_gamma2;
        std::optional<QuadSignCert> quad;
    };

    static ReactionLaw custom(std::function<double(double)> fn, Claims claims) {
        ReactionLaw f;
        f.kind = Kind::custom;
        f.fn = std::move(fn);
        f.sampled = true;
        f.diss = claims.diss;
        f.growth = claims.growth;
        f.deriv_sup = claims.deriv_sup;
        f.lin_gamma2 = claims.lin_gamma2;
        f.quad = claims.quad;
        return f;
    }
};

// -------------------------------------------------------------------- noise

struct NoiseLaw {
    enum class Kind { zero, affine, sine_bounded };

    Kind kind = Kind::zero;
    double scale = 0.0;    // c
    double offset = 0.0;   // sigma(0) for affine
    double lipschitz = 0.0;

    double operator()(double r) const {
        switch (kind) {
            case Kind::zero:         return 0.0;
            case Kind::affine:       return offset + scale * r;
            case Kind::sine_bounded: return scale * std::sin(r);
        }
        return 0.0;
    }

    double sigma0() const { return kind == Kind::affine ? offset : 0.0; }

    // |sigma_tilde(0)|^2 over a domain of length L: the constant sigma(0).
    double sigma0_norm_sq(double L) const {
        const double s0 = sigma0();
        return s0 * s0 * L;
    }

    bool is_zero() const { return kind == Kind::zero; }

    std::string name() const {
        switch (kind) {
            case Kind::zero:         return "zero";
            case Kind::affine:       return "affine";
            case Kind::sine_bounded: return "sine";
        }
        return {};
    }

    static NoiseLaw zero() { return NoiseLaw{}; }

    static NoiseLaw affine(double c, double s0) {
        NoiseLaw s;
        s.kind = Kind::affine;
        s.scale = c;
        s.offset = s0;
        s.lipschitz = std::abs(c);
        return s;
    }

    static NoiseLaw sine_bounded(double c) {
        NoiseLaw s;
        s.kind = Kind::sine_bounded;
        s.scale = c;
        s.lipschitz = std::abs(c);
        return s;
    }
};

} // namespace mra
