#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace tiltbound {

// Open symmetric interval (-lambda0, lambda0) on which the MGF is finite.
// `formal` marks windows that are infinite only by finiteness of the sample
// (empirical sources): every finite sample has an everywhere-finite MGF, but the
// window carries no information about the underlying law.
struct KramerWindow {
    double lambda0 = 0.0;
    bool finite = false;
    bool formal = false;
};

struct Gaussian { double sigma = 1.0; };
struct Rademacher {};
struct UniformCentered { double halfwidth = 1.0; };
struct TwoSidedExponential { double rate = 1.0; };
// Symmetric variable with exact modulus tail P(|X| > t) = exp(-c1 * t^d).
struct WeibullSymmetric { double d = 2.0; double c1 = 1.0; };
struct FiniteAtoms { std::vector<double> points, weights; };
struct Empirical { std::vector<double> samples; };

class RandomSource {
public:
    using Kind = std::variant<Gaussian, Rademacher, UniformCentered, TwoSidedExponential,
                              WeibullSymmetric, FiniteAtoms, Empirical>;

    // Validates parameters; finite_atoms and empirical are recentered to mean zero
    // and the applied shift is recorded.
    explicit RandomSource(Kind kind);

    static RandomSource gaussian(double sigma);
    static RandomSource rademacher();
    static RandomSource uniform_centered(double halfwidth);
    static RandomSource two_sided_exponential(double rate);
    static RandomSource weibull_symmetric(double d, double c1);
    static RandomSource finite_atoms(std::vector<double> points, std::vector<double> weights);
    static RandomSource empirical(std::vector<double> samples);

    // Accepts a JSON object text ({"kind": "gaussian", "sigma": 1.0}, ...) or, if
    // the string does not start with '{', a path to a file containing one.
    static RandomSource from_json(const std::string& text_or_path);
    static RandomSource from_json_text(const std::string& json_text);

    const Kind& kind() const { return kind_; }
    std::string kind_name() const;
    std::string to_json() const;

    KramerWindow kramer_window() const;
    // Finite lambda0, or the working scale 4/stddev for infinite windows (callers
    // that need "a fraction of the window" for an unbounded window use this).
    double effective_lambda0() const;

    bool symmetric() const;
    double variance() const;
    double recenter_shift() const { return recenter_shift_; }

    bool has_exact_mgf() const;
    // Throws std::domain_error outside the Kramer window or for kinds without a
    // closed form (weibull_symmetric, empirical).
    double exact_mgf(double lambda) const;
    // ln G(lambda) evaluated stably (no overflow for finite_atoms at large tilts).
    double exact_log_mgf(double lambda) const;

    // Deterministic given (kind, n, seed); independent of thread count and
    // bitwise identical across repeated calls.
    std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

private:
    Kind kind_;
    double recenter_shift_ = 0.0;
};

struct SubgaussianMatrix {
    std::size_t dim = 0;
    std::vector<double> b;  // row-major symmetric positive-definite matrix
};
struct ProductOf { std::vector<RandomSource> components; };

class VectorSource {
public:
    using Kind = std::variant<SubgaussianMatrix, ProductOf>;

    explicit VectorSource(Kind kind);  // validates symmetry and positive definiteness

    static VectorSource subgaussian(std::size_t dim, std::vector<double> b_row_major);
    static VectorSource product_of(std::vector<RandomSource> components);
    static VectorSource from_json(const std::string& text_or_path);

    const Kind& kind() const { return kind_; }
    std::size_t dim() const;
    std::string kind_name() const;

    // For subgaussian_matrix: the model's matrix B; for product_of: the diagonal
    // covariance matrix of the components. Row-major.
    std::vector<double> covariance() const;

    // n draws of dim() components each, flattened row-major; same determinism
    // contract as the scalar sampler.
    std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

private:
    Kind kind_;
    std::vector<double> chol_;  // lower Cholesky factor for subgaussian sampling
};

}  // namespace tiltbound
