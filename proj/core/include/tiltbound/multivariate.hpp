#pragma once

#include "tiltbound/random_source.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace tiltbound {

struct MvOptions {
    std::size_t n = 1'000'000;  // Monte Carlo draws for product_of sources
    std::uint64_t seed = 42;
    // When set, V divides by the model norm |lambda|_B = sqrt(lambda' B lambda)
    // (the covariance norm) instead of the Euclidean norm. Whitening makes
    // V = |lambda|_B / 2 for the quadratic model, a norm and hence convex for
    // every admissible B.
    bool whiten = false;
};

// Evaluator for log Q(lambda) = ln E exp((lambda, xi)) and V = log Q / |lambda|.
class MvModel {
public:
    static MvModel from_source(const VectorSource& source, const MvOptions& opts = {});
    // Synthetic field log Q(lambda) = |lambda|^alpha (Euclidean), V = |lambda|^{alpha-1}.
    static MvModel power_law(double alpha, std::size_t dim);

    std::size_t dim() const { return dim_; }
    bool whitened() const { return opts_.whiten; }
    bool sampled() const { return !samples_->empty(); }
    const MvOptions& options() const { return opts_; }

    double log_q(const std::vector<double>& lambda) const;
    double v(const std::vector<double>& lambda) const;  // V(0) = 0
    // Delta-method standard error of log_q for sampled models, 0 for exact ones.
    double log_q_standard_error(const std::vector<double>& lambda) const;

private:
    std::size_t dim_ = 0;
    MvOptions opts_;
    std::vector<double> cov_;                       // B (or diagonal covariance)
    double alpha_ = 0.0;                            // power-law exponent
    bool exact_quadratic_ = false;                  // log Q = (B lambda, lambda)/2
    bool power_ = false;
    std::shared_ptr<std::vector<double>> samples_;  // flattened n x dim draws
};

struct MultivariateMgf {
    std::size_t dim = 0;
    std::vector<std::vector<double>> points;
    std::vector<double> log_q;
    std::vector<double> v;
    bool whitened = false;

    std::string to_csv() const;  // "lambda_1,...,lambda_l,log_q,v"
};

MultivariateMgf evaluate_multivariate(const MvModel& model,
                                      const std::vector<std::vector<double>>& points);
MultivariateMgf evaluate_multivariate(const VectorSource& source,
                                      const std::vector<std::vector<double>>& points,
                                      const MvOptions& opts = {});

// count unit vectors evenly spaced on the plane circle (dim 2 only).
std::vector<std::vector<double>> unit_circle_rays(std::size_t count);

// Tensor of rays x radii, ray-major: point(ray i, radius j) = radii[j] * rays[i].
std::vector<std::vector<double>> ray_grid(const std::vector<std::vector<double>>& rays,
                                          const std::vector<double>& radii);

}  // namespace tiltbound
