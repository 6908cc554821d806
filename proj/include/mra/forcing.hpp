#pragma once

// Deterministic forcing h(t) = envelope(t) * h0, where h0 is a fixed
// coefficient vector in the eigenbasis and the envelope is one of
//
//   zero          h = 0
//   constant      envelope = 1
//   exponential   envelope = exp(nu t)
//   polynomial    envelope = sum_i c_i t^i          (degree <= 7)
//
// Every kind admits closed forms for |h(t)|^2, the exponentially weighted
// tail  e^{-rho t} Int_{-inf}^t e^{rho r} |h(r)|^2 dr,  the decay window
// Int_tau^t e^{-rho (t-r)} |h(r)|^2 dr  and the plain window
// Int_tau^t |h(r)|^2 dr.  The tails are what the absorbing radii and decay
// bounds are made of, so kinds are restricted to envelopes where they can
// be evaluated without quadrature.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"

namespace mra {

struct ForcingSpec {
    enum class Kind { zero, constant, exponential, polynomial };

    Kind kind = Kind::zero;
    std::vector<double> modes;   // h0 in the eigenbasis
    double nu = 0.0;             // exponential
    std::vector<double> coeffs;  // polynomial envelope, coeffs[i] * t^i

    static constexpr int max_poly_degree = 7;

    static ForcingSpec zero() { return ForcingSpec{}; }

    static ForcingSpec constant(std::vector<double> h0) {
        ForcingSpec h;
        h.kind = Kind::constant;
        h.modes = std::move(h0);
        return h;
    }

    static ForcingSpec exponential(double nu, std::vector<double> h0) {
        ForcingSpec h;
        h.kind = Kind::exponential;
        h.nu = nu;
        h.modes = std::move(h0);
        return h;
    }

    static ForcingSpec polynomial(std::vector<double> coeffs, std::vector<double> h0) {
        if (coeffs.empty())
            throw ConfigError("forcing polynomial: envelope needs at least one coefficient");
        if (static_cast<int>(coeffs.size()) > max_poly_degree + 1)
            throw ConfigError("forcing polynomial: envelope degree above " +
                              std::to_string(max_poly_degree) + " is not supported");
        ForcingSpec h;
        h.kind = Kind::polynomial;
        h.coeffs = std::move(coeffs);
        h.modes = std::move(h0);
        return h;
    }

    std::string name() const {
        switch (kind) {
            case Kind::zero:        return "zero";
            case Kind::constant:    return "constant";
            case Kind::exponential: return "exponential";
            case Kind::polynomial:  return "polynomial";
        }
        return {};
    }

    double norm0_sq() const {
        double s = 0.0;
        for (double m : modes) s += m * m;
        return s;
    }

    double envelope(double t) const {
        switch (kind) {
            case Kind::zero:        return 0.0;
            case Kind::constant:    return 1.0;
            case Kind::exponential: return std::exp(nu * t);
            case Kind::polynomial: {
                double v = 0.0;
                for (std::size_t i = coeffs.size(); i-- > 0;) v = v * t + coeffs[i];
                return v;
            }
        }
        return 0.0;
    }

    double norm_sq(double t) const {
        const double e = envelope(t);
        return e * e * norm0_sq();
    }

    // Coefficients of h(t) padded to n modes.  More given modes than the
    // basis can hold is a configuration mistake, not something to truncate
    // silently.
    std::vector<double> modes_at(double t, int n) const {
        if (static_cast<int>(modes.size()) > n)
            throw DimensionError("forcing: " + std::to_string(modes.size()) +
                                 " modes exceed basis size " + std::to_string(n));
        std::vector<double> out(static_cast<std::size_t>(n), 0.0);
        if (kind == Kind::zero) return out;
        const double e = envelope(t);
        for (std::size_t j = 0; j < modes.size(); ++j) out[j] = e * modes[j];
        return out;
    }

    // Trailing zero coefficients do not raise the degree.
    int effective_degree() const {
        for (std::size_t i = coeffs.size(); i-- > 0;)
            if (coeffs[i] != 0.0) return static_cast<int>(i);
        return -1;  // identically zero envelope
    }

    // e^{-rho t} Int_{-inf}^t e^{rho r} |h(r)|^2 dr, rho > 0.
    //
    // polynomial: with q(t)^2 = sum_k s_k t^k, repeated integration by parts
    // gives e^{-rho t} Int e^{rho r} r^k dr
    //            = sum_{i=0}^{k} (-1)^i k!/(k-i)! t^{k-i} / rho^{i+1}.
    double weighted_tail(double t, double rho) const {
        if (!(rho > 0.0))
            throw RateRangeError("forcing weighted tail: rate must be positive, got " + std::to_string(rho));
        switch (kind) {
            case Kind::zero:
                return 0.0;
            case Kind::constant:
                return norm0_sq() / rho;
            case Kind::exponential: {
                const double denom = rho + 2.0 * nu;
                if (!(denom > 0.0))
                    throw IntegrabilityError(
                        "forcing weighted tail diverges: rate + 2 nu = " + std::to_string(denom) +
                        " is not positive");
                return norm0_sq() * std::exp(2.0 * nu * t) / denom;
            }
            case Kind::polynomial: {
                const std::vector<double> sq = envelope_sq_coeffs();
                double total = 0.0;
                for (std::size_t k = 0; k < sq.size(); ++k) {
                    if (sq[k] == 0.0) continue;
                    double term = 0.0;
                    double fact = 1.0;         // k!/(k-i)!
                    double rho_pow = rho;      // rho^{i+1}
                    double t_pow = pow_int(t, static_cast<int>(k));
                    double sign = 1.0;
                    for (std::size_t i = 0; i <= k; ++i) {
                        term += sign * fact * t_pow / rho_pow;
                        sign = -sign;
                        fact *= static_cast<double>(k - i);
                        rho_pow *= rho;
                        t_pow = (t != 0.0) ? t_pow / t : pow_int(t, static_cast<int>(k - i) - 1);
                    }
                    total += sq[k] * term;
                }
                return norm0_sq() * total;
            }
        }
        return 0.0;
    }

    // Int_tau^t e^{-rho (t-r)} |h(r)|^2 dr  for tau <= t.  Always finite, so
    // the exponential kind gets a direct form valid for any sign of
    // rho + 2 nu (the tail difference would spuriously diverge there).
    double window_decay(double tau, double t, double rho) const {
        if (t < tau) throw ConfigError("forcing window: t < tau");
        switch (kind) {
            case Kind::zero:
                return 0.0;
            case Kind::constant:
                return norm0_sq() * (1.0 - std::exp(-rho * (t - tau))) / rho;
            case Kind::exponential: {
                const double denom = rho + 2.0 * nu;
                if (denom == 0.0) return norm0_sq() * std::exp(2.0 * nu * t) * (t - tau);
                return norm0_sq() * std::exp(2.0 * nu * t) *
                       (1.0 - std::exp(-denom * (t - tau))) / denom;
            }
            default:
                return weighted_tail(t, rho) - std::exp(-rho * (t - tau)) * weighted_tail(tau, rho);
        }
    }

    // Int_tau^t |h(r)|^2 dr.
    double window_plain(double tau, double t) const {
        if (t < tau) throw ConfigError("forcing window: t < tau");
        switch (kind) {
            case Kind::zero:
                return 0.0;
            case Kind::constant:
                return norm0_sq() * (t - tau);
            case Kind::exponential: {
                if (nu == 0.0) return norm0_sq() * (t - tau);
                return norm0_sq() * (std::exp(2.0 * nu * t) - std::exp(2.0 * nu * tau)) / (2.0 * nu);
            }
            case Kind::polynomial: {
                const std::vector<double> sq = envelope_sq_coeffs();
                double total = 0.0;
                for (std::size_t k = 0; k < sq.size(); ++k) {
                    if (sq[k] == 0.0) continue;
                    total += sq[k] * (pow_int(t, static_cast<int>(k) + 1) -
                                      pow_int(tau, static_cast<int>(k) + 1)) / (k + 1.0);
                }
                return norm0_sq() * total;
            }
        }
        return 0.0;
    }

    // Square of the polynomial envelope (convolution of coefficients).
    std::vector<double> envelope_sq_coeffs() const {
        std::vector<double> sq(coeffs.empty() ? 1 : 2 * coeffs.size() - 1, 0.0);
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            for (std::size_t j = 0; j < coeffs.size(); ++j)
                sq[i + j] += coeffs[i] * coeffs[j];
        return sq;
    }

private:
    static double pow_int(double x, int k) {
        if (k <= 0) return 1.0;
        double r = 1.0;
        for (int i = 0; i < k; ++i) r *= x;
        return r;
    }
};

// How sup over t of the normalized tail behaves; decides whether the
// absorbing radius stays finite backwards in time, everywhere, or not at
// all.
enum class Boundedness { bounded_everywhere, bounded_backwards, unbounded };

inline const char* to_string(Boundedness b) {
    switch (b) {
        case Boundedness::bounded_everywhere: return "bounded-everywhere";
        case Boundedness::bounded_backwards:  return "bounded-backwards";
        case Boundedness::unbounded:          return "unbounded";
    }
    return {};
}

// Classification of t -> e^{-rho t} I(t, rho) for the closed-form kinds:
//   zero/constant:           constant in t, bounded everywhere
//   exponential, nu > 0:     ~ e^{2 nu t}: vanishes backwards, blows up forwards
//   exponential, nu < 0:     blows up backwards (the sup over t <= t0 is infinite)
//   polynomial, degree >= 1: a degree-2g polynomial in t with positive leading
//                            coefficient: unbounded in both directions
inline Boundedness classify_weighted_tail(const ForcingSpec& h, double rho) {
    if (!(rho > 0.0))
        throw RateRangeError("tail classification: rate must be positive");
    switch (h.kind) {
        case ForcingSpec::Kind::zero:
            return Boundedness::bounded_everywhere;
        case ForcingSpec::Kind::constant:
            return Boundedness::bounded_everywhere;
        case ForcingSpec::Kind::exponential:
            if (!(rho + 2.0 * h.nu > 0.0))
                throw IntegrabilityError("tail classification: weighted tail diverges for nu = " +
                                         std::to_string(h.nu));
            if (h.nu > 0.0) return Boundedness::bounded_backwards;
            if (h.nu < 0.0) return Boundedness::unbounded;
            return Boundedness::bounded_everywhere;
        case ForcingSpec::Kind::polynomial:
            return h.effective_degree() >= 1 ? Boundedness::unbounded
                                             : Boundedness::bounded_everywhere;
    }
    return Boundedness::bounded_everywhere;
}

} // namespace mra
