#include "tiltbound/random_source.hpp"

#include "tiltbound/csv.hpp"
#include "tiltbound/parallel.hpp"
#include "tiltbound/rng.hpp"

#include "math_detail.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace tiltbound {

using json = nlohmann::ordered_json;

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

using detail::log_cosh;
using detail::log_sinhc;

}  // namespace

RandomSource::RandomSource(Kind kind) : kind_(std::move(kind)) {
    if (const auto* g = std::get_if<Gaussian>(&kind_)) {
        require(g->sigma > 0, "gaussian: sigma must be positive");
    } else if (const auto* u = std::get_if<UniformCentered>(&kind_)) {
        require(u->halfwidth > 0, "uniform_centered: halfwidth must be positive");
    } else if (const auto* t = std::get_if<TwoSidedExponential>(&kind_)) {
        require(t->rate > 0, "two_sided_exponential: rate must be positive");
    } else if (const auto* w = std::get_if<WeibullSymmetric>(&kind_)) {
        require(w->d > 1, "weibull_symmetric: d must exceed 1");
        require(w->c1 > 0, "weibull_symmetric: c1 must be positive");
    } else if (auto* f = std::get_if<FiniteAtoms>(&kind_)) {
        require(!f->points.empty() && f->points.size() == f->weights.size(),
                "finite_atoms: points and weights must be non-empty and equal length");
        double wsum = 0;
        for (double w : f->weights) {
            require(w > 0, "finite_atoms: weights must be positive");
            wsum += w;
        }
        require(std::abs(wsum - 1.0) <= 1e-9, "finite_atoms: weights must sum to 1");
        for (double& w : f->weights) w /= wsum;
        double mean = 0, scale = 0;
        for (std::size_t i = 0; i < f->points.size(); ++i) {
            mean += f->weights[i] * f->points[i];
            scale = std::max(scale, std::abs(f->points[i]));
        }
        if (std::abs(mean) > 1e-12 * std::max(scale, 1.0)) {
            for (double& p : f->points) p -= mean;
            recenter_shift_ = mean;
        }
    } else if (auto* e = std::get_if<Empirical>(&kind_)) {
        require(e->samples.size() >= 2, "empirical: need at least 2 samples");
        double mean = std::accumulate(e->samples.begin(), e->samples.end(), 0.0) /
                      static_cast<double>(e->samples.size());
        if (mean != 0.0) {
            for (double& x : e->samples) x -= mean;
            recenter_shift_ = mean;
        }
    }
}

RandomSource RandomSource::gaussian(double sigma) { return RandomSource(Gaussian{sigma}); }
RandomSource RandomSource::rademacher() { return RandomSource(Rademacher{}); }
RandomSource RandomSource::uniform_centered(double halfwidth) {
    return RandomSource(UniformCentered{halfwidth});
}
RandomSource RandomSource::two_sided_exponential(double rate) {
    return RandomSource(TwoSidedExponential{rate});
}
RandomSource RandomSource::weibull_symmetric(double d, double c1) {
    return RandomSource(WeibullSymmetric{d, c1});
}
RandomSource RandomSource::finite_atoms(std::vector<double> points, std::vector<double> weights) {
    return RandomSource(FiniteAtoms{std::move(points), std::move(weights)});
}
RandomSource RandomSource::empirical(std::vector<double> samples) {
    return RandomSource(Empirical{std::move(samples)});
}

std::string RandomSource::kind_name() const {
    struct Visitor {
        std::string operator()(const Gaussian&) const { return "gaussian"; }
        std::string operator()(const Rademacher&) const { return "rademacher"; }
        std::string operator()(const UniformCentered&) const { return "uniform_centered"; }
        std::string operator()(const TwoSidedExponential&) const { return "two_sided_exponential"; }
        std::string operator()(const WeibullSymmetric&) const { return "weibull_symmetric"; }
        std::string operator()(const FiniteAtoms&) const { return "finite_atoms"; }
        std::string operator()(const Empirical&) const { return "empirical"; }
    };
    return std::visit(Visitor{}, kind_);
}

RandomSource RandomSource::from_json(const std::string& text_or_path) {
    if (!text_or_path.empty() && text_or_path.front() == '{')
        return from_json_text(text_or_path);
    return from_json_text(read_file(text_or_path));
}

RandomSource RandomSource::from_json_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("source JSON parse error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw std::runtime_error("source JSON must be an object with a \"kind\" string");
    const std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "gaussian") return gaussian(j.value("sigma", 1.0));
        if (kind == "rademacher") return rademacher();
        if (kind == "uniform_centered") return uniform_centered(j.value("halfwidth", 1.0));
        if (kind == "two_sided_exponential") return two_sided_exponential(j.value("rate", 1.0));
        if (kind == "weibull_symmetric")
            return weibull_symmetric(j.value("d", 2.0), j.value("c1", 1.0));
        if (kind == "finite_atoms")
            return finite_atoms(j.at("points").get<std::vector<double>>(),
                                j.at("weights").get<std::vector<double>>());
        if (kind == "empirical") {
            if (j.contains("samples"))
                return empirical(j["samples"].get<std::vector<double>>());
            return empirical(read_value_lines(j.at("path").get<std::string>()));
        }
    } catch (const json::exception& e) {
        throw std::runtime_error("source JSON field error: " + std::string(e.what()));
    }
    throw std::runtime_error("unknown source kind '" + kind + "'");
}

std::string RandomSource::to_json() const {
    json j;
    j["kind"] = kind_name();
    if (const auto* g = std::get_if<Gaussian>(&kind_)) j["sigma"] = g->sigma;
    if (const auto* u = std::get_if<UniformCentered>(&kind_)) j["halfwidth"] = u->halfwidth;
    if (const auto* t = std::get_if<TwoSidedExponential>(&kind_)) j["rate"] = t->rate;
    if (const auto* w = std::get_if<WeibullSymmetric>(&kind_)) {
        j["d"] = w->d;
        j["c1"] = w->c1;
    }
    if (const auto* f = std::get_if<FiniteAtoms>(&kind_)) {
        j["points"] = f->points;
        j["weights"] = f->weights;
    }
    if (const auto* e = std::get_if<Empirical>(&kind_)) j["samples"] = e->samples;
    return j.dump();
}

KramerWindow RandomSource::kramer_window() const {
    KramerWindow w;
    if (const auto* t = std::get_if<TwoSidedExponential>(&kind_)) {
        w.lambda0 = t->rate;
        w.finite = true;
        return w;
    }
    w.lambda0 = std::numeric_limits<double>::infinity();
    w.finite = false;
    w.formal = std::holds_alternative<Empirical>(kind_);
    return w;
}

double RandomSource::effective_lambda0() const {
    KramerWindow w = kramer_window();
    if (w.finite) return w.lambda0;
    double sd = std::sqrt(variance());
    return sd > 0 ? 4.0 / sd : 1.0;
}

bool RandomSource::symmetric() const {
    if (const auto* f = std::get_if<FiniteAtoms>(&kind_)) {
        // Symmetric iff the weighted atom set is invariant under negation.
        std::vector<std::pair<double, double>> a;
        for (std::size_t i = 0; i < f->points.size(); ++i)
            a.emplace_back(f->points[i], f->weights[i]);
        std::sort(a.begin(), a.end());
        for (std::size_t i = 0; i < a.size(); ++i) {
            const auto& [p, w] = a[i];
            const auto& [q, v] = a[a.size() - 1 - i];
            if (std::abs(p + q) > 1e-12 || std::abs(w - v) > 1e-12) return false;
        }
        return true;
    }
    return !std::holds_alternative<Empirical>(kind_);
}

double RandomSource::variance() const {
    struct Visitor {
        double operator()(const Gaussian& g) const { return g.sigma * g.sigma; }
        double operator()(const Rademacher&) const { return 1.0; }
        double operator()(const UniformCentered& u) const {
            return u.halfwidth * u.halfwidth / 3.0;
        }
        double operator()(const TwoSidedExponential& t) const { return 2.0 / (t.rate * t.rate); }
        double operator()(const WeibullSymmetric& w) const {
            return std::tgamma(2.0 / w.d + 1.0) / std::pow(w.c1, 2.0 / w.d);
        }
        double operator()(const FiniteAtoms& f) const {
            double v = 0;
            for (std::size_t i = 0; i < f.points.size(); ++i)
                v += f.weights[i] * f.points[i] * f.points[i];
            return v;
        }
        double operator()(const Empirical& e) const {
            double v = 0;
            for (double x : e.samples) v += x * x;
            return v / static_cast<double>(e.samples.size());
        }
    };
    return std::visit(Visitor{}, kind_);
}

bool RandomSource::has_exact_mgf() const {
    return !std::holds_alternative<WeibullSymmetric>(kind_) &&
           !std::holds_alternative<Empirical>(kind_);
}

double RandomSource::exact_log_mgf(double lambda) const {
    KramerWindow w = kramer_window();
    if (w.finite && std::abs(lambda) >= w.lambda0)
        throw std::domain_error("lambda outside the Kramer window");
    if (const auto* g = std::get_if<Gaussian>(&kind_))
        return 0.5 * g->sigma * g->sigma * lambda * lambda;
    if (std::holds_alternative<Rademacher>(kind_)) return log_cosh(lambda);
    if (const auto* u = std::get_if<UniformCentered>(&kind_))
        return log_sinhc(u->halfwidth * lambda);
    if (const auto* t = std::get_if<TwoSidedExponential>(&kind_)) {
        double r = lambda / t->rate;
        return -std::log1p(-r * r);
    }
    if (const auto* f = std::get_if<FiniteAtoms>(&kind_)) {
        double m = -std::numeric_limits<double>::infinity();
        for (double p : f->points) m = std::max(m, lambda * p);
        double s = 0;
        for (std::size_t i = 0; i < f->points.size(); ++i)
            s += f->weights[i] * std::exp(lambda * f->points[i] - m);
        return m + std::log(s);
    }
    throw std::domain_error("exact MGF unavailable for kind " + kind_name());
}

double RandomSource::exact_mgf(double lambda) const { return std::exp(exact_log_mgf(lambda)); }

namespace {

// One draw per kind, consuming a fixed pattern of uniforms from the block engine.
struct DrawOne {
    BlockRng& rng;
    double operator()(const Gaussian& g) {
        double u1 = rng.uniform_pos();
        double u2 = rng.uniform();
        return g.sigma * std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }
    double operator()(const Rademacher&) { return rng.uniform() < 0.5 ? -1.0 : 1.0; }
    double operator()(const UniformCentered& u) {
        return u.halfwidth * (2.0 * rng.uniform() - 1.0);
    }
    double operator()(const TwoSidedExponential& t) {
        double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        return sign * (-std::log(rng.uniform_pos()) / t.rate);
    }
    double operator()(const WeibullSymmetric& w) {
        double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        return sign * std::pow(-std::log(rng.uniform_pos()) / w.c1, 1.0 / w.d);
    }
    double operator()(const FiniteAtoms& f) {
        double u = rng.uniform();
        double cum = 0;
        for (std::size_t i = 0; i + 1 < f.points.size(); ++i) {
            cum += f.weights[i];
            if (u < cum) return f.points[i];
        }
        return f.points.back();
    }
    double operator()(const Empirical& e) {
        auto idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(e.samples.size()));
        return e.samples[std::min(idx, e.samples.size() - 1)];
    }
};

}  // namespace

std::vector<double> RandomSource::sample(std::size_t n, std::uint64_t seed) const {
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    std::vector<double> out(n);
    const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
    parallel_for(blocks, [&](std::size_t b) {
        BlockRng rng(seed, b);
        const std::size_t lo = b * kSampleBlock;
        const std::size_t hi = std::min(n, lo + kSampleBlock);
        DrawOne draw{rng};
        for (std::size_t i = lo; i < hi; ++i) out[i] = std::visit(draw, kind_);
    });
    return out;
}

VectorSource::VectorSource(Kind kind) : kind_(std::move(kind)) {
    if (const auto* s = std::get_if<SubgaussianMatrix>(&kind_)) {
        require(s->dim >= 2, "subgaussian_matrix: dimension must be >= 2");
        require(s->b.size() == s->dim * s->dim, "subgaussian_matrix: matrix size mismatch");
        const auto l = static_cast<Eigen::Index>(s->dim);
        Eigen::MatrixXd B(l, l);
        for (Eigen::Index i = 0; i < l; ++i)
            for (Eigen::Index j = 0; j < l; ++j)
                B(i, j) = s->b[static_cast<std::size_t>(i * l + j)];
        double scale = std::max(B.cwiseAbs().maxCoeff(), 1.0);
        require((B - B.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
                "subgaussian_matrix: B must be symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
        require(es.eigenvalues().minCoeff() > 0,
                "subgaussian_matrix: B must be positive definite");
        Eigen::MatrixXd L = B.llt().matrixL();
        chol_.resize(s->b.size());
        for (Eigen::Index i = 0; i < l; ++i)
            for (Eigen::Index j = 0; j < l; ++j)
                chol_[static_cast<std::size_t>(i * l + j)] = L(i, j);
    } else if (const auto* p = std::get_if<ProductOf>(&kind_)) {
        require(p->components.size() >= 2, "product_of: need at least 2 components");
    }
}

VectorSource VectorSource::subgaussian(std::size_t dim, std::vector<double> b_row_major) {
    return VectorSource(SubgaussianMatrix{dim, std::move(b_row_major)});
}

VectorSource VectorSource::product_of(std::vector<RandomSource> components) {
    return VectorSource(ProductOf{std::move(components)});
}

VectorSource VectorSource::from_json(const std::string& text_or_path) {
    std::string text = (!text_or_path.empty() && text_or_path.front() == '{')
                           ? text_or_path
                           : read_file(text_or_path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("vector source JSON parse error: ") + e.what());
    }
    const std::string kind = j.value("kind", "");
    try {
        if (kind == "subgaussian_matrix") {
            auto rows = j.at("B").get<std::vector<std::vector<double>>>();
            std::size_t dim = rows.size();
            std::vector<double> flat;
            for (const auto& r : rows) {
                if (r.size() != dim)
                    throw std::runtime_error("subgaussian_matrix: B is not square");
                flat.insert(flat.end(), r.begin(), r.end());
            }
            return subgaussian(dim, std::move(flat));
        }
        if (kind == "product_of") {
            std::vector<RandomSource> comps;
            for (const auto& c : j.at("components"))
                comps.push_back(RandomSource::from_json_text(c.dump()));
            return product_of(std::move(comps));
        }
    } catch (const json::exception& e) {
        throw std::runtime_error("vector source JSON field error: " + std::string(e.what()));
    }
    throw std::runtime_error("unknown vector source kind '" + kind + "'");
}

std::size_t VectorSource::dim() const {
    if (const auto* s = std::get_if<SubgaussianMatrix>(&kind_)) return s->dim;
    return std::get<ProductOf>(kind_).components.size();
}

std::string VectorSource::kind_name() const {
    return std::holds_alternative<SubgaussianMatrix>(kind_) ? "subgaussian_matrix" : "product_of";
}

std::vector<double> VectorSource::covariance() const {
    const std::size_t l = dim();
    std::vector<double> cov(l * l, 0.0);
    if (const auto* s = std::get_if<SubgaussianMatrix>(&kind_)) return s->b;
    const auto& comps = std::get<ProductOf>(kind_).components;
    for (std::size_t i = 0; i < l; ++i) cov[i * l + i] = comps[i].variance();
    return cov;
}

std::vector<double> VectorSource::sample(std::size_t n, std::uint64_t seed) const {
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    const std::size_t l = dim();
    std::vector<double> out(n * l);
    const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
    parallel_for(blocks, [&](std::size_t b) {
        BlockRng rng(seed, b);
        const std::size_t lo = b * kSampleBlock;
        const std::size_t hi = std::min(n, lo + kSampleBlock);
        if (const auto* s = std::get_if<SubgaussianMatrix>(&kind_)) {
            std::vector<double> z(l);
            for (std::size_t i = lo; i < hi; ++i) {
                for (std::size_t c = 0; c < l; ++c) {
                    double u1 = rng.uniform_pos();
                    double u2 = rng.uniform();
                    z[c] = std::sqrt(-2.0 * std::log(u1)) *
                           std::cos(2.0 * std::numbers::pi * u2);
                }
                for (std::size_t r = 0; r < l; ++r) {
                    double acc = 0;
                    for (std::size_t c = 0; c <= r; ++c) acc += chol_[r * l + c] * z[c];
                    out[i * l + r] = acc;
                }
            }
        } else {
            const auto& comps = std::get<ProductOf>(kind_).components;
            for (std::size_t i = lo; i < hi; ++i)
                for (std::size_t c = 0; c < l; ++c) {
                    DrawOne draw{rng};
                    out[i * l + c] = std::visit(draw, comps[c].kind());
                }
        }
    });
    return out;
}

}  // namespace tiltbound
