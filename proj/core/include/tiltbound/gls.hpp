#pragma once

#include "tiltbound/cgf.hpp"
#include "tiltbound/generating_function.hpp"
#include "tiltbound/grid_function.hpp"
#include "tiltbound/random_source.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace tiltbound {

// nu(lambda) = ln max(E e^{lambda xi}, E e^{-lambda xi}) tabulated on the grid.
// Even for symmetric sources by construction. Throws std::domain_error when the
// grid leaves the Kramer window.
ConvexGridFunction natural_generating_function(const RandomSource& source,
                                               const std::vector<double>& lambda_grid,
                                               const CgfOptions& opts = {});

struct NormEstimate {
    double value = 0.0;          // sup over the grid; +infinity when no rho works
    double argsup = 0.0;         // lambda attaining the supremum
    bool boundary_flag = false;  // supremum sits on a grid endpoint: the true
                                 // sup may lie outside the evaluated window
    std::string to_json() const;  // {"value","argsup","boundary_flag"}
};

// ||xi||_{B(phi)} estimated as sup over the grid of phi^{-1}(nu(lambda))/|lambda|.
// The grid must not contain 0 (the ratio is resolved there only in the limit).
NormEstimate bphi_norm(const RandomSource& source, const GeneratingFunction& phi,
                       const std::vector<double>& lambda_grid, const CgfOptions& opts = {});

// Log-spaced positive grid from 1e-3 to 0.8 * effective window, suitable as a
// default for bphi_norm.
std::vector<double> default_norm_grid(const RandomSource& source, std::size_t points = 200);

// P(|beta| > x) <= exp(-phi*(x/rho)) for rho = ||beta||_{B(phi)}: conjugates phi
// on a symmetric grid wide enough for the slope x/rho and exponentiates. Returns
// 1 when x/rho sits below the conjugate's positive region; never returns 0 (the
// exponent is clamped at 700).
double tail_bound(const GeneratingFunction& phi, double rho, double x,
                  std::size_t grid_points = 4001);
double tail_bound(const GeneratingFunction& phi, const NormEstimate& norm, double x,
                  std::size_t grid_points = 4001);

// Modulus tail P(|beta| > t) of a symmetric variable, the input to the inverse
// problem "which C makes E exp(lambda beta) <= exp phi(C lambda)".
struct TailWeibull { double d = 2.0; double c1 = 1.0; };  // exp(-c1 t^d), d > 1
struct TailGaussianExact { double sigma = 1.0; };          // erfc(t / (sigma sqrt 2))
struct TailTable { std::vector<double> t, p; };            // tabulated survival
struct TailZero {};                                        // degenerate zero variable

class TailModel {
public:
    using Kind = std::variant<TailWeibull, TailGaussianExact, TailTable, TailZero>;

    explicit TailModel(Kind kind);

    static TailModel weibull(double d, double c1);
    static TailModel gaussian(double sigma = 1.0);
    static TailModel table(std::vector<double> t, std::vector<double> p);
    static TailModel zero();

    const Kind& kind() const { return kind_; }
    double survival(double t) const;

    // ln E exp(lambda beta) for the symmetric variable with this modulus tail,
    // via E cosh(lambda beta) = 1 + lambda Int_0^inf sinh(lambda t) P(|beta|>t) dt.
    // Closed-form tails integrate by quadrature on the log scale; tables by
    // trapezoid with survival 1 assumed before the first abscissa (conservative)
    // and 0 after the last (documented truncation).
    double log_mgf_bound(double lambda) const;

private:
    Kind kind_;
};

struct MgfBoundResult {
    bool found = false;    // false = no constant in the search grid works
    double c = 0.0;        // smallest constant achieving the largest prefix
    double lambda1 = 0.0;  // the bound is certified on grid points <= lambda1
    std::size_t prefix = 0;  // number of certified leading grid points
    std::string to_json() const;
};

// Searches C over the geometric grid {2^{k/8}, k = -32..64} for the smallest
// constant with ln E exp(lambda beta) <= phi(C lambda) on the longest achievable
// prefix of the positive lambda grid.
MgfBoundResult mgf_bound_from_tail(const TailModel& tail, const GeneratingFunction& phi,
                                   const std::vector<double>& lambda_grid);

// (E |delta|^p)^{1/p}. Exact for every closed-form kind (Gaussian absolute
// moments, the Weibull tail integral, discrete sums); n and seed engage only
// when a kind ever needs sampling.
double pnorm(const RandomSource& source, double p, std::size_t n = 1'000'000,
             std::uint64_t seed = 42);

struct DualityConfig {
    std::vector<double> x_grid;       // empty: top decade ending at the
                                      // 100-exceedance frontier, 12 points
    std::vector<double> lambda_grid;  // empty: logspace 0.1..100, 25 points
    std::vector<double> p_list;       // empty: {2, 4, 8, 16, 32}
    std::size_t n = 1'000'000;
    std::uint64_t seed = 42;
};

struct DualityReport {
    double d_tail = 0.0;    // least-squares slope of ln(-ln P(|delta|>x)) vs ln x
    double d_cgf = 0.0;     // s/(s-1) for s = upper-decade slope of ln Delta vs ln lambda
    double d_moment = 0.0;  // 1/t for t = slope of ln ||delta||_p vs ln p
    double slope_tail = 0.0;
    double slope_cgf = 0.0;
    double slope_moment = 0.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string to_json() const;  // {"d_tail","d_cgf","d_moment","slopes",...}
};

// The three integrability-class exponents of one source, estimated side by side.
// Explicit x_grid entries with fewer than 100 sample exceedances are refused
// (std::domain_error): the tail regression would be noise-dominated.
DualityReport duality_exponents(const RandomSource& source, const DualityConfig& config = {});

}  // namespace tiltbound
