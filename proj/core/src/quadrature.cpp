#include "tiltbound/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>

namespace tiltbound {

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
    using boost::math::quadrature::gauss_kronrod;
    double error = 0.0;
    // Feed the requested tolerance to the adaptive routine rather than pushing
    // it to machine precision: near roundoff the error estimate saturates
    // around 1e-11 even when the value is correct to all digits, which would
    // trip the check below on perfectly converged integrals.
    double value = gauss_kronrod<double, 15>::integrate(f, a, b, 17, abs_tol, &error);
    if (!(error <= abs_tol) && !(error <= 1e-10 * std::abs(value)))
        throw std::runtime_error("quadrature did not reach requested tolerance");
    return value;
}

double integrate_gauss(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss<double, 64>::integrate(f, a, b);
}

double log_integral_exp(const std::function<double(double)>& g, double t_peak,
                        double abs_tol) {
    if (!(t_peak > 0) || !std::isfinite(t_peak)) t_peak = 1.0;

    // Coarse geometric scan for the peak, then ternary refinement.
    double t_best = t_peak;
    double g_best = g(t_best);
    for (int k = -40; k <= 40; ++k) {
        double t = t_peak * std::pow(2.0, 0.25 * k);
        double v = g(t);
        if (v > g_best) { g_best = v; t_best = t; }
    }
    double lo = t_best / 2, hi = t_best * 2;
    for (int it = 0; it < 200; ++it) {
        double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (g(m1) < g(m2)) lo = m1; else hi = m2;
    }
    double t_star = 0.5 * (lo + hi);
    double peak = std::max(g(t_star), g_best);

    // Upper limit: march out until the integrand is vanishingly small relative to
    // the peak; decay is superexponential for every integrand routed here.
    double upper = std::max(t_star, t_peak) * 2;
    for (int it = 0; it < 400 && g(upper) - peak > -80.0; ++it) upper *= 2;

    auto scaled = [&](double t) {
        double v = g(t) - peak;
        return v < -700.0 ? 0.0 : std::exp(v);
    };
    // g - peak cancels terms of order |peak|, so the integrand carries
    // irreducible jitter of a few ulps of |peak| that the error estimate
    // faithfully reports; don't demand tighter than the integrand can deliver.
    // (The resulting log-integral is still accurate to ~|peak|*eps absolute.)
    double eff_tol = std::max(abs_tol, 3e-14 * std::abs(peak));
    double integral = integrate(scaled, 0.0, upper, eff_tol);
    if (!(integral > 0)) throw std::runtime_error("log_integral_exp: vanished integral");
    return peak + std::log(integral);
}

}  // namespace tiltbound
