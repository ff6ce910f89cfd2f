#pragma once

#include <functional>

namespace tiltbound {

// Adaptive Gauss-Kronrod integral of f over [a, b] targeting the given absolute
// tolerance. Throws std::runtime_error if the error estimate cannot be met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10);

// Fixed 64-point Gauss-Legendre rule on [a, b]; exact to machine precision for
// the smooth polynomial-times-exponential integrands used in tilted moments.
double integrate_gauss(const std::function<double(double)>& f, double a, double b);

// Computes log of the integral of exp(g(t)) dt over [0, upper determined
// automatically], where g is concave-ish with a single interior peak near
// t_peak. The peak value is subtracted before integrating so the working
// integrand is O(1) even when the true integral is astronomically large.
double log_integral_exp(const std::function<double(double)>& g, double t_peak,
                        double abs_tol = 1e-11);

}  // namespace tiltbound
