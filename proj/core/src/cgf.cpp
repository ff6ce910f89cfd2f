#include "tiltbound/cgf.hpp"

#include "tiltbound/csv.hpp"
#include "tiltbound/grids.hpp"
#include "tiltbound/parallel.hpp"
#include "tiltbound/quadrature.hpp"

#include "math_detail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tiltbound {

namespace {

constexpr std::size_t kMaxTauDegree = 8;
constexpr std::size_t kMaxMoment = 2 * kMaxTauDegree;  // variance needs tau^2

void check_window(const RandomSource& src, double lambda) {
    KramerWindow w = src.kramer_window();
    if (w.finite && std::abs(lambda) >= w.lambda0)
        throw std::domain_error("lambda outside the Kramer window");
}

CgfMethod natural_method(const RandomSource& src) {
    if (src.has_exact_mgf()) return CgfMethod::closed_form;
    if (std::holds_alternative<WeibullSymmetric>(src.kind())) return CgfMethod::quadrature;
    return CgfMethod::monte_carlo;  // empirical: average over its own samples
}

// ln E exp(lambda*X) for the weibull modulus law P(|X|>t) = exp(-c1 t^d):
// log-scale integral of cosh(lambda t) against the modulus density, peak-shifted
// so values like exp(385) never materialize.
double weibull_log_mgf(const WeibullSymmetric& w, double lambda) {
    lambda = std::abs(lambda);
    if (lambda == 0.0) return 0.0;
    const double d = w.d, c1 = w.c1;
    // Integrate in s with t = s^2: the density factor t^{d-1} dt becomes
    // 2 s^{2d-1} ds, smooth enough at s = 0 for the adaptive error estimate to
    // converge. In t, the |t|^{d-1} cusp (d < 2) sits under the peak at small
    // lambda and stalls the estimate above the tolerance gate.
    auto g = [&](double s) {
        if (s <= 0.0) return -std::numeric_limits<double>::infinity();
        const double t = s * s;
        return std::log(2.0 * c1 * d) + (2.0 * d - 1.0) * std::log(s) +
               detail::log_cosh(lambda * t) - c1 * std::pow(t, d);
    };
    double t_peak = std::pow(lambda / (c1 * d), 1.0 / (d - 1.0));
    t_peak = std::max(t_peak, std::pow((d - 1.0) / (c1 * d), 1.0 / d));
    return log_integral_exp(g, std::sqrt(t_peak));
}

// ln of the sample-average MGF, max-subtracted.
double log_mean_exp(const std::vector<double>& xs, double lambda) {
    if (lambda == 0.0) return 0.0;
    double m = lambda * (lambda > 0 ? *std::max_element(xs.begin(), xs.end())
                                    : *std::min_element(xs.begin(), xs.end()));
    double acc = 0.0;
    for (double x : xs) acc += std::exp(lambda * x - m);
    return m + std::log(acc / static_cast<double>(xs.size()));
}

const std::vector<double>& empirical_samples(const RandomSource& src) {
    return std::get<Empirical>(src.kind()).samples;
}

}  // namespace

std::string cgf_method_name(CgfMethod m) {
    switch (m) {
        case CgfMethod::closed_form: return "closed_form";
        case CgfMethod::quadrature: return "quadrature";
        case CgfMethod::monte_carlo: return "monte_carlo";
    }
    return "unknown";
}

double log_mgf(const RandomSource& source, double lambda, const CgfOptions& opts) {
    check_window(source, lambda);
    CgfMethod m = opts.method.value_or(natural_method(source));
    switch (m) {
        case CgfMethod::closed_form:
            return source.exact_log_mgf(lambda);
        case CgfMethod::quadrature: {
            const auto* w = std::get_if<WeibullSymmetric>(&source.kind());
            if (!w) throw std::domain_error("quadrature CGF only applies to weibull_symmetric");
            return weibull_log_mgf(*w, lambda);
        }
        case CgfMethod::monte_carlo: {
            if (std::holds_alternative<Empirical>(source.kind()))
                return log_mean_exp(empirical_samples(source), lambda);
            if (opts.n < 1000)
                throw std::invalid_argument("monte_carlo CGF needs n >= 1000");
            return log_mean_exp(source.sample(opts.n, opts.seed), lambda);
        }
    }
    throw std::logic_error("unreachable");
}

CgfEvaluation evaluate_cgf(const RandomSource& source, const std::vector<double>& grid,
                           const CgfOptions& opts) {
    if (!strictly_increasing(grid))
        throw std::invalid_argument("evaluate_cgf: grid must be strictly increasing");
    for (double l : grid) check_window(source, l);

    CgfEvaluation ev;
    ev.lambda_grid = grid;
    ev.log_mgf.resize(grid.size());
    ev.method = opts.method.value_or(natural_method(source));

    if (ev.method == CgfMethod::monte_carlo) {
        std::vector<double> xs;
        if (std::holds_alternative<Empirical>(source.kind())) {
            xs = empirical_samples(source);
            ev.n = xs.size();
            ev.seed = 0;
        } else {
            if (opts.n < 1000) throw std::invalid_argument("monte_carlo CGF needs n >= 1000");
            xs = source.sample(opts.n, opts.seed);
            ev.n = opts.n;
            ev.seed = opts.seed;
        }
        parallel_for(grid.size(),
                     [&](std::size_t i) { ev.log_mgf[i] = log_mean_exp(xs, grid[i]); });
    } else {
        parallel_for(grid.size(), [&](std::size_t i) {
            CgfOptions point = opts;
            point.method = ev.method;
            ev.log_mgf[i] = log_mgf(source, grid[i], point);
        });
    }

    ev.phi_values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        ev.phi_values[i] = grid[i] == 0.0 ? 0.0 : ev.log_mgf[i] / grid[i];
    return ev;
}

std::vector<double> log_mgf_standard_errors(const RandomSource& source,
                                            const std::vector<double>& grid,
                                            const CgfOptions& opts) {
    if (!strictly_increasing(grid))
        throw std::invalid_argument("log_mgf_standard_errors: grid must be strictly increasing");
    for (double l : grid) check_window(source, l);
    std::vector<double> se(grid.size(), 0.0);
    if (opts.method.value_or(natural_method(source)) != CgfMethod::monte_carlo) return se;

    std::vector<double> xs;
    if (std::holds_alternative<Empirical>(source.kind())) {
        xs = empirical_samples(source);
    } else {
        if (opts.n < 1000) throw std::invalid_argument("monte_carlo CGF needs n >= 1000");
        xs = source.sample(opts.n, opts.seed);
    }
    const double n = static_cast<double>(xs.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const double lambda = grid[i];
        if (lambda == 0.0) return;  // Delta(0) = 0 exactly
        double m = lambda * (lambda > 0 ? *std::max_element(xs.begin(), xs.end())
                                        : *std::min_element(xs.begin(), xs.end()));
        double sum = 0.0, sum2 = 0.0;
        for (double x : xs) {
            double w = std::exp(lambda * x - m);
            sum += w;
            sum2 += w * w;
        }
        double mean = sum / n;
        double var = std::max(sum2 / n - mean * mean, 0.0);
        // Var(ln mean) ~ Var(mean)/mean^2 by the delta method.
        se[i] = std::sqrt(var / n) / mean;
    });
    return se;
}

std::string CgfEvaluation::to_csv() const {
    CsvTable t;
    t.header = {"lambda", "log_mgf", "phi"};
    for (std::size_t i = 0; i < lambda_grid.size(); ++i)
        t.rows.push_back({lambda_grid[i], log_mgf[i], phi_values[i]});
    return render_csv(t);
}

PolynomialTau::PolynomialTau(std::vector<double> c) : coeffs(std::move(c)) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    if (coeffs.size() > kMaxTauDegree + 1)
        throw std::invalid_argument("tau: polynomial degree must be <= 8");
}

PolynomialTau PolynomialTau::identity() { return PolynomialTau({0.0, 1.0}); }
PolynomialTau PolynomialTau::constant(double c) { return PolynomialTau({c}); }

double PolynomialTau::operator()(double x) const {
    double acc = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * x + coeffs[j];
    return acc;
}

PolynomialTau PolynomialTau::squared() const {
    PolynomialTau sq({0.0});
    sq.coeffs.assign(2 * coeffs.size() - 1, 0.0);
    for (std::size_t a = 0; a < coeffs.size(); ++a)
        for (std::size_t b = 0; b < coeffs.size(); ++b) sq.coeffs[a + b] += coeffs[a] * coeffs[b];
    return sq;
}

namespace {

// Tilted raw moments E_W[x^j] for j = 0..kMaxMoment, per kind.

std::vector<double> gaussian_tilted_moments(const Gaussian& g, double lambda) {
    const double mu = lambda * g.sigma * g.sigma;
    const double s2 = g.sigma * g.sigma;
    std::vector<double> m(kMaxMoment + 1);
    m[0] = 1.0;
    m[1] = mu;
    for (std::size_t k = 2; k < m.size(); ++k)
        m[k] = mu * m[k - 1] + static_cast<double>(k - 1) * s2 * m[k - 2];
    return m;
}

std::vector<double> atoms_tilted_moments(const std::vector<double>& points,
                                         const std::vector<double>& weights, double lambda) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
        mx = std::max(mx, std::log(weights[i]) + lambda * points[i]);
    std::vector<double> tw(points.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        tw[i] = std::exp(std::log(weights[i]) + lambda * points[i] - mx);
        norm += tw[i];
    }
    std::vector<double> m(kMaxMoment + 1, 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        double w = tw[i] / norm;
        double p = 1.0;
        for (std::size_t j = 0; j < m.size(); ++j) {
            m[j] += w * p;
            p *= points[i];
        }
    }
    return m;
}

std::vector<double> uniform_tilted_moments(const UniformCentered& u, double lambda) {
    const double a = u.halfwidth;
    const double shift = std::abs(lambda) * a;  // keeps both integrands O(1)
    auto base = [&](double x) { return std::exp(lambda * x - shift); };
    double z = integrate_gauss(base, -a, a);
    std::vector<double> m(kMaxMoment + 1);
    for (std::size_t j = 0; j < m.size(); ++j) {
        m[j] = integrate_gauss([&](double x) { return std::pow(x, static_cast<double>(j)) * base(x); },
                               -a, a) /
               z;
    }
    return m;
}

std::vector<double> tse_tilted_moments(const TwoSidedExponential& t, double lambda) {
    // E[x^j e^{lambda x}] = (b/2) j! [ (b-l)^{-(j+1)} + (-1)^j (b+l)^{-(j+1)} ].
    const double b = t.rate;
    std::vector<double> m(kMaxMoment + 1);
    double raw0 = 0.5 * b * (1.0 / (b - lambda) + 1.0 / (b + lambda));
    double fact = 1.0;
    for (std::size_t j = 0; j < m.size(); ++j) {
        if (j > 0) fact *= static_cast<double>(j);
        double sign = (j % 2 == 0) ? 1.0 : -1.0;
        double raw = 0.5 * b * fact *
                     (std::pow(b - lambda, -static_cast<double>(j + 1)) +
                      sign * std::pow(b + lambda, -static_cast<double>(j + 1)));
        m[j] = raw / raw0;
    }
    return m;
}

std::vector<double> weibull_tilted_moments(const WeibullSymmetric& w, double lambda) {
    const double d = w.d, c1 = w.c1, al = std::abs(lambda);
    const double delta = weibull_log_mgf(w, al);
    std::vector<double> m(kMaxMoment + 1);
    m[0] = 1.0;
    double t_peak = al > 0 ? std::pow(al / (c1 * d), 1.0 / (d - 1.0)) : 1.0;
    t_peak = std::max(t_peak, std::pow((d - 1.0) / (c1 * d), 1.0 / d));
    for (std::size_t j = 1; j < m.size(); ++j) {
        const bool even = (j % 2 == 0);
        if (al == 0.0) {
            // Plain moments of the symmetric law: odd vanish, even are Gamma values.
            m[j] = even ? std::exp(std::lgamma(static_cast<double>(j) / d + 1.0) -
                                   (static_cast<double>(j) / d) * std::log(c1))
                        : 0.0;
            continue;
        }
        auto g = [&, j](double t) {
            if (t <= 0.0) return -std::numeric_limits<double>::infinity();
            double hyper = even ? detail::log_cosh(al * t) : detail::log_sinh(al * t);
            return std::log(c1 * d) + (d - 1.0 + static_cast<double>(j)) * std::log(t) + hyper -
                   c1 * std::pow(t, d);
        };
        double lj = log_integral_exp(g, t_peak);
        double value = std::exp(lj - delta);
        // For lambda < 0 use E[x^j e^{l x}] = (-1)^j E[x^j e^{-l x}] (symmetry).
        if (lambda < 0 && !even) value = -value;
        m[j] = value;
    }
    return m;
}

std::vector<double> sample_tilted_moments(const std::vector<double>& xs, double lambda) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : xs) mx = std::max(mx, lambda * x);
    std::vector<double> m(kMaxMoment + 1, 0.0);
    double norm = 0.0;
    for (double x : xs) {
        double w = std::exp(lambda * x - mx);
        norm += w;
        double p = w;
        m[0] += w;
        for (std::size_t j = 1; j < m.size(); ++j) {
            p *= x;
            m[j] += p;
        }
    }
    for (double& v : m) v /= norm;
    return m;
}

}  // namespace

TiltedMeasure::TiltedMeasure(RandomSource base, double lambda, const CgfOptions& opts)
    : base_(std::move(base)), lambda_(lambda) {
    check_window(base_, lambda);
    log_normalizer_ = log_mgf(base_, lambda, opts);

    const auto& kind = base_.kind();
    if (const auto* g = std::get_if<Gaussian>(&kind)) {
        moments_ = gaussian_tilted_moments(*g, lambda);
    } else if (std::holds_alternative<Rademacher>(kind)) {
        moments_ = atoms_tilted_moments({-1.0, 1.0}, {0.5, 0.5}, lambda);
    } else if (const auto* f = std::get_if<FiniteAtoms>(&kind)) {
        moments_ = atoms_tilted_moments(f->points, f->weights, lambda);
    } else if (const auto* u = std::get_if<UniformCentered>(&kind)) {
        moments_ = uniform_tilted_moments(*u, lambda);
    } else if (const auto* t = std::get_if<TwoSidedExponential>(&kind)) {
        moments_ = tse_tilted_moments(*t, lambda);
    } else if (const auto* w = std::get_if<WeibullSymmetric>(&kind)) {
        moments_ = weibull_tilted_moments(*w, lambda);
    } else if (std::holds_alternative<Empirical>(kind)) {
        moments_ = sample_tilted_moments(empirical_samples(base_), lambda);
    } else {
        throw std::logic_error("unhandled kind in TiltedMeasure");
    }
}

double TiltedMeasure::normalizer() const { return std::exp(log_normalizer_); }

double TiltedMeasure::mean(const PolynomialTau& tau) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < tau.coeffs.size(); ++j) acc += tau.coeffs[j] * moments_[j];
    return acc;
}

double TiltedMeasure::variance(const PolynomialTau& tau) const {
    PolynomialTau sq = tau.squared();
    double m2 = 0.0;
    for (std::size_t j = 0; j < sq.coeffs.size(); ++j) m2 += sq.coeffs[j] * moments_[j];
    double m1 = mean(tau);
    double var = m2 - m1 * m1;
    if (var < 0.0) {
        if (var < -1e-9 * std::max(1.0, std::abs(m2)))
            throw std::runtime_error("tilted variance lost positivity");
        var = 0.0;
    }
    return var;
}

double tilted_mean(const TiltedMeasure& t, const PolynomialTau& tau) { return t.mean(tau); }

double tilted_variance(const TiltedMeasure& t, const PolynomialTau& tau) {
    return t.variance(tau);
}

double cgf_second_derivative(const RandomSource& source, double lambda, const CgfOptions& opts) {
    TiltedMeasure t(source, lambda, opts);
    return t.variance(PolynomialTau::identity());
}

double cgf_central_second_difference(const RandomSource& source, double lambda,
                                     const CgfOptions& opts) {
    const double h = std::max(1e-4, 1e-4 * std::abs(lambda));
    double lo = log_mgf(source, lambda - h, opts);
    double mid = log_mgf(source, lambda, opts);
    double hi = log_mgf(source, lambda + h, opts);
    return (hi - 2.0 * mid + lo) / (h * h);
}

}  // namespace tiltbound
