#include "tiltbound/multivariate.hpp"

#include "tiltbound/csv.hpp"
#include "tiltbound/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tiltbound {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double quadratic_form(const std::vector<double>& m, const std::vector<double>& x) {
    const std::size_t l = x.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < l; ++j) acc += x[i] * m[i * l + j] * x[j];
    return acc;
}

double euclidean(const std::vector<double>& x) { return std::sqrt(dot(x, x)); }

}  // namespace

MvModel MvModel::from_source(const VectorSource& source, const MvOptions& opts) {
    MvModel m;
    m.dim_ = source.dim();
    m.opts_ = opts;
    m.cov_ = source.covariance();
    m.samples_ = std::make_shared<std::vector<double>>();
    if (std::holds_alternative<SubgaussianMatrix>(source.kind())) {
        m.exact_quadratic_ = true;
    } else {
        if (opts.n < 1000) throw std::invalid_argument("product_of model needs n >= 1000");
        *m.samples_ = source.sample(opts.n, opts.seed);
    }
    return m;
}

MvModel MvModel::power_law(double alpha, std::size_t dim) {
    if (!(alpha > 0)) throw std::invalid_argument("power_law: alpha must be positive");
    MvModel m;
    m.dim_ = dim;
    m.alpha_ = alpha;
    m.power_ = true;
    m.samples_ = std::make_shared<std::vector<double>>();
    return m;
}

double MvModel::log_q(const std::vector<double>& lambda) const {
    if (lambda.size() != dim_) throw std::invalid_argument("lambda dimension mismatch");
    if (power_) return std::pow(euclidean(lambda), alpha_);
    if (exact_quadratic_) return 0.5 * quadratic_form(cov_, lambda);
    // Sample log-mean-exp with max subtraction.
    const std::size_t n = samples_->size() / dim_;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < dim_; ++c) s += lambda[c] * (*samples_)[i * dim_ + c];
        mx = std::max(mx, s);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < dim_; ++c) s += lambda[c] * (*samples_)[i * dim_ + c];
        acc += std::exp(s - mx);
    }
    return mx + std::log(acc / static_cast<double>(n));
}

double MvModel::log_q_standard_error(const std::vector<double>& lambda) const {
    if (power_ || exact_quadratic_) return 0.0;
    const std::size_t n = samples_->size() / dim_;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < dim_; ++c) s += lambda[c] * (*samples_)[i * dim_ + c];
        mx = std::max(mx, s);
    }
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < dim_; ++c) s += lambda[c] * (*samples_)[i * dim_ + c];
        double w = std::exp(s - mx);
        sum += w;
        sum2 += w * w;
    }
    double mean = sum / static_cast<double>(n);
    double var = sum2 / static_cast<double>(n) - mean * mean;
    if (var < 0) var = 0;
    // Var(ln mean) ~ Var(mean)/mean^2 by the delta method.
    return std::sqrt(var / static_cast<double>(n)) / mean;
}

double MvModel::v(const std::vector<double>& lambda) const {
    double norm;
    if (opts_.whiten && !power_) {
        double q = quadratic_form(cov_, lambda);
        norm = std::sqrt(std::max(q, 0.0));
    } else {
        norm = euclidean(lambda);
    }
    if (norm == 0.0) return 0.0;
    return log_q(lambda) / norm;
}

MultivariateMgf evaluate_multivariate(const MvModel& model,
                                      const std::vector<std::vector<double>>& points) {
    MultivariateMgf mv;
    mv.dim = model.dim();
    mv.points = points;
    mv.whitened = model.whitened();
    mv.log_q.resize(points.size());
    mv.v.resize(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        mv.log_q[i] = model.log_q(points[i]);
        mv.v[i] = model.v(points[i]);
    });
    return mv;
}

MultivariateMgf evaluate_multivariate(const VectorSource& source,
                                      const std::vector<std::vector<double>>& points,
                                      const MvOptions& opts) {
    return evaluate_multivariate(MvModel::from_source(source, opts), points);
}

std::string MultivariateMgf::to_csv() const {
    CsvTable t;
    for (std::size_t c = 1; c <= dim; ++c) t.header.push_back("lambda_" + std::to_string(c));
    t.header.push_back("log_q");
    t.header.push_back("v");
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::vector<double> row = points[i];
        row.push_back(log_q[i]);
        row.push_back(v[i]);
        t.rows.push_back(std::move(row));
    }
    return render_csv(t);
}

std::vector<std::vector<double>> unit_circle_rays(std::size_t count) {
    if (count < 1) throw std::invalid_argument("unit_circle_rays: count must be >= 1");
    std::vector<std::vector<double>> rays(count);
    for (std::size_t i = 0; i < count; ++i) {
        double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
        rays[i] = {std::cos(th), std::sin(th)};
    }
    return rays;
}

std::vector<std::vector<double>> ray_grid(const std::vector<std::vector<double>>& rays,
                                          const std::vector<double>& radii) {
    std::vector<std::vector<double>> pts;
    pts.reserve(rays.size() * radii.size());
    for (const auto& u : rays)
        for (double r : radii) {
            std::vector<double> p(u.size());
            for (std::size_t c = 0; c < u.size(); ++c) p[c] = r * u[c];
            pts.push_back(std::move(p));
        }
    return pts;
}

}  // namespace tiltbound
