#pragma once

// Boundary controller laws for the two designs, the decay rate, and the
// tracking-error envelope.  Pure functions of instantaneous boundary values;
// the time stepper decides at which time level they are sampled.

#include <cmath>
#include <stdexcept>
#include <string>

namespace burgersim {

// theorem1: cubic boundary feedback, gain threshold k > 1/6.
// theorem2: linear boundary feedback, gain threshold k > 0.
enum class Variant { theorem1, theorem2 };

inline const char* variant_name(Variant v) {
    return v == Variant::theorem1 ? "theorem1" : "theorem2";
}

struct GainConfig {
    double k;   // boundary feedback gain
    double nu;  // viscosity, > 0
};

struct FluxPair {
    double f0;  // flux at x = 0
    double f1;  // flux at x = 1
};

inline constexpr double gain_threshold(Variant v) {
    return v == Variant::theorem1 ? 1.0 / 6.0 : 0.0;
}

inline bool gain_ok(Variant v, double k) { return k > gain_threshold(v); }

inline void validate_gain(Variant v, double k) {
    if (!gain_ok(v, k))
        throw std::invalid_argument(std::string(variant_name(v)) +
                                    (v == Variant::theorem1 ? " requires k > 1/6"
                                                            : " requires k > 0"));
}

// Stabilization feedback fluxes from the boundary values of uhat.
// theorem1: f0 = k(u + u^3), f1 = -k(u + u^3); theorem2: f0 = k u, f1 = -k u.
inline FluxPair feedback_fluxes(Variant v, double k, double uhat0, double uhat1) {
    if (v == Variant::theorem1)
        return {k * (uhat0 + uhat0 * uhat0 * uhat0),
                -k * (uhat1 + uhat1 * uhat1 * uhat1)};
    return {k * uhat0, -k * uhat1};
}

// Regulator feedforward fluxes.  coupling_integral is the quadrature of
// a*(uhat+U) + u_d over the domain at the caller's time level.
inline FluxPair feedforward_fluxes(Variant v, double uhat0, double uhat1,
                                   double U0, double U1, double r_prime,
                                   double coupling_integral) {
    if (v == Variant::theorem1) {
        const double F0 = uhat0 * U0 + 0.5 * U0 * U0;
        const double F1 = uhat1 * U1 + 0.5 * U1 * U1 + r_prime - coupling_integral;
        return {F0, F1};
    }
    const double F0 = uhat0 * U0 + 0.5 * (uhat0 * uhat0 + U0 * U0);
    const double F1 =
        uhat1 * U1 + 0.5 * (uhat1 * uhat1 + U1 * U1) + r_prime - coupling_integral;
    return {F0, F1};
}

// Guaranteed exponential rate: min(nu, k - 1/6) or min(nu, k).
inline double decay_rate(Variant v, double nu, double k) {
    validate_gain(v, k);
    return std::min(nu, k - gain_threshold(v));
}

// |e(t)| <= norm0 * exp(-lambda t / 2)
inline double tracking_bound(double t, double norm0, double lambda) {
    return norm0 * std::exp(-0.5 * lambda * t);
}

}  // namespace burgersim
