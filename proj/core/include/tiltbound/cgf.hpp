#pragma once

#include "tiltbound/random_source.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tiltbound {

enum class CgfMethod { closed_form, quadrature, monte_carlo };

std::string cgf_method_name(CgfMethod m);

struct CgfOptions {
    // When unset, the method is chosen per kind: closed form where an exact MGF
    // exists, quadrature for weibull_symmetric, sample average for empirical.
    std::optional<CgfMethod> method;
    std::size_t n = 1'000'000;  // Monte Carlo draw count when sampling is forced
    std::uint64_t seed = 42;
};

struct CgfEvaluation {
    std::vector<double> lambda_grid;
    std::vector<double> log_mgf;     // Delta values
    std::vector<double> phi_values;  // Delta/lambda with Phi(0) = 0
    CgfMethod method = CgfMethod::closed_form;
    std::size_t n = 0;        // sample count for monte_carlo
    std::uint64_t seed = 0;   // seed for monte_carlo

    std::string to_csv() const;  // header "lambda,log_mgf,phi"
};

// Delta = ln G on the grid, Phi = Delta/lambda off zero. The grid must be
// strictly increasing and inside the Kramer window (domain error otherwise).
CgfEvaluation evaluate_cgf(const RandomSource& source, const std::vector<double>& grid,
                           const CgfOptions& opts = {});

// Single-point ln G(lambda) by the source's natural method.
double log_mgf(const RandomSource& source, double lambda, const CgfOptions& opts = {});

// Delta-method standard error of the Monte Carlo Delta estimate at each grid
// point (same deterministic sample evaluate_cgf uses); all zeros when the
// effective method is exact (closed form or quadrature).
std::vector<double> log_mgf_standard_errors(const RandomSource& source,
                                            const std::vector<double>& grid,
                                            const CgfOptions& opts = {});

// Polynomial in the outcome, tau(x) = sum c_j x^j; the only bounded-growth test
// family accepted by tilted moments. Degree is capped at 8.
struct PolynomialTau {
    std::vector<double> coeffs;  // coeffs[j] multiplies x^j

    explicit PolynomialTau(std::vector<double> c);
    static PolynomialTau identity();  // tau = x
    static PolynomialTau constant(double c);
    double operator()(double x) const;
    PolynomialTau squared() const;  // degree may reach 16; internal use by variance
};

// The auxiliary probability space at tilt lambda: dW proportional to
// exp(lambda*x) dP. Exposes expectation H and variance War of polynomial
// observables under W.
class TiltedMeasure {
public:
    TiltedMeasure(RandomSource base, double lambda, const CgfOptions& opts = {});

    const RandomSource& base() const { return base_; }
    double lambda() const { return lambda_; }
    double log_normalizer() const { return log_normalizer_; }  // Delta(lambda)
    double normalizer() const;                                 // G(lambda)

    double mean(const PolynomialTau& tau) const;      // H(tau)
    double variance(const PolynomialTau& tau) const;  // War(tau) = H(tau^2) - H(tau)^2

private:
    // Tilted raw moments E_W[x^j], j = 0..16, computed once per measure.
    std::vector<double> moments_;
    RandomSource base_;
    double lambda_ = 0.0;
    double log_normalizer_ = 0.0;
};

double tilted_mean(const TiltedMeasure& t, const PolynomialTau& tau);
double tilted_variance(const TiltedMeasure& t, const PolynomialTau& tau);

// Delta''(lambda) computed through the tilting identity: the variance of the
// outcome under the tilted measure. Nonnegative up to roundoff.
double cgf_second_derivative(const RandomSource& source, double lambda,
                             const CgfOptions& opts = {});

// Central second difference of Delta with step h = max(1e-4, 1e-4*|lambda|);
// the independent finite-difference side of the tilting identity.
double cgf_central_second_difference(const RandomSource& source, double lambda,
                                     const CgfOptions& opts = {});

}  // namespace tiltbound
