#pragma once

#include <cmath>
#include <numbers>

namespace tiltbound::detail {

// ln cosh(u) without overflow.
inline double log_cosh(double u) {
    u = std::abs(u);
    return u + std::log1p(std::exp(-2.0 * u)) - std::numbers::ln2;
}

// ln sinh(u) for u > 0; series near zero keeps full precision.
inline double log_sinh(double u) {
    if (u < 1e-4) return std::log(u) + u * u / 6.0;
    if (u < 20.0) return std::log(std::sinh(u));
    return u + std::log1p(-std::exp(-2.0 * u)) - std::numbers::ln2;
}

// ln(sinh(u)/u), even in u, stable on the whole line.
inline double log_sinhc(double u) {
    u = std::abs(u);
    if (u < 1e-4) {
        double u2 = u * u;
        return u2 / 6.0 - u2 * u2 / 180.0;
    }
    return log_sinh(u) - std::log(u);
}

// ln(1 + e^a) without overflow.
inline double softplus(double a) {
    if (a > 30.0) return a + std::log1p(std::exp(-a));
    return std::log1p(std::exp(a));
}

}  // namespace tiltbound::detail
