#include "tiltbound/gls.hpp"

#include "tiltbound/grids.hpp"
#include "tiltbound/legendre.hpp"
#include "tiltbound/quadrature.hpp"
#include "math_detail.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tiltbound {

using json = nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0)) throw std::invalid_argument("slope: degenerate abscissae");
    return sxy / sxx;
}

}  // namespace

ConvexGridFunction natural_generating_function(const RandomSource& source,
                                               const std::vector<double>& lambda_grid,
                                               const CgfOptions& opts) {
    if (lambda_grid.empty())
        throw std::invalid_argument("natural generating function: empty grid");
    if (!strictly_increasing(lambda_grid))
        throw std::invalid_argument("natural generating function: grid must increase");
    // One CGF evaluation over the union of the grid and its mirror image, so
    // Monte Carlo backends draw a single shared sample.
    std::vector<double> all;
    all.reserve(lambda_grid.size() * 2);
    for (double l : lambda_grid) {
        all.push_back(l);
        all.push_back(-l);
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    CgfEvaluation ev = evaluate_cgf(source, all, opts);
    auto delta_at = [&](double l) {
        auto it = std::lower_bound(all.begin(), all.end(), l);
        return ev.log_mgf[static_cast<std::size_t>(it - all.begin())];
    };
    std::vector<double> nu(lambda_grid.size());
    for (std::size_t i = 0; i < lambda_grid.size(); ++i)
        nu[i] = std::max(delta_at(lambda_grid[i]), delta_at(-lambda_grid[i]));
    ConvexGridFunction out(lambda_grid, std::move(nu));
    KramerWindow w = source.kramer_window();
    if (w.finite) out.domain_bound = w.lambda0;
    return out;
}

std::string NormEstimate::to_json() const {
    json j;
    if (std::isfinite(value))
        j["value"] = value;
    else
        j["value"] = "infinity";
    j["argsup"] = argsup;
    j["boundary_flag"] = boundary_flag;
    return j.dump();
}

NormEstimate bphi_norm(const RandomSource& source, const GeneratingFunction& phi,
                       const std::vector<double>& lambda_grid, const CgfOptions& opts) {
    if (lambda_grid.empty()) throw std::invalid_argument("bphi_norm: empty grid");
    for (double l : lambda_grid)
        if (l == 0.0) throw std::invalid_argument("bphi_norm: the grid must exclude 0");
    ConvexGridFunction nu = natural_generating_function(source, lambda_grid, opts);
    NormEstimate est;
    std::size_t best = 0;
    bool any = false;
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        double psi = phi.inverse(nu.values[i]) / std::abs(lambda_grid[i]);
        if (!any || psi > est.value) {
            any = true;
            est.value = psi;
            best = i;
        }
        if (std::isinf(psi)) break;  // no finite rho works; report straight away
    }
    est.argsup = lambda_grid[best];
    est.boundary_flag = best == 0 || best + 1 == lambda_grid.size();
    return est;
}

std::vector<double> default_norm_grid(const RandomSource& source, std::size_t points) {
    double hi = 0.8 * source.effective_lambda0();
    hi = std::max(hi, 2e-3);
    return logspace(-3.0, std::log10(hi), points);
}

double tail_bound(const GeneratingFunction& phi, double rho, double x,
                  std::size_t grid_points) {
    if (!(rho > 0) || !std::isfinite(rho))
        throw std::invalid_argument("tail_bound: norm must be finite and positive");
    if (!(x > 0)) return 1.0;
    double u = x / rho;
    double w = std::max(10.0, 2.0 * u);
    KramerWindow win = phi.window();
    if (win.finite) w = std::min(w, win.lambda0);
    if (grid_points < 3) grid_points = 3;
    if (grid_points % 2 == 0) ++grid_points;  // keep 0 on the grid so phi* >= 0
    ConvexGridFunction shape = phi.sample_shape(linspace(-w, w, grid_points));
    ConjugateResult conj = conjugate(shape, {u});
    double star = conj.f.values.front();
    if (!(star > 0)) return 1.0;
    return std::exp(-std::min(star, 700.0));
}

double tail_bound(const GeneratingFunction& phi, const NormEstimate& norm, double x,
                  std::size_t grid_points) {
    return tail_bound(phi, norm.value, x, grid_points);
}

TailModel::TailModel(Kind kind) : kind_(std::move(kind)) {
    if (const auto* w = std::get_if<TailWeibull>(&kind_)) {
        if (!(w->d > 1)) throw std::invalid_argument("tail model: d must exceed 1");
        if (!(w->c1 > 0)) throw std::invalid_argument("tail model: c1 must be positive");
    } else if (const auto* g = std::get_if<TailGaussianExact>(&kind_)) {
        if (!(g->sigma > 0)) throw std::invalid_argument("tail model: sigma must be positive");
    } else if (const auto* t = std::get_if<TailTable>(&kind_)) {
        if (t->t.size() != t->p.size() || t->t.size() < 2)
            throw std::invalid_argument("tail table: need matching t/p columns with >= 2 rows");
        if (!strictly_increasing(t->t) || t->t.front() < 0)
            throw std::invalid_argument("tail table: abscissae must be nonnegative increasing");
        for (std::size_t i = 0; i < t->p.size(); ++i) {
            if (!(t->p[i] >= 0.0 && t->p[i] <= 1.0))
                throw std::invalid_argument("tail table: survival values must lie in [0,1]");
            if (i > 0 && t->p[i] > t->p[i - 1] + 1e-12)
                throw std::invalid_argument("tail table: survival must be nonincreasing");
        }
    }
}

TailModel TailModel::weibull(double d, double c1) { return TailModel(TailWeibull{d, c1}); }
TailModel TailModel::gaussian(double sigma) { return TailModel(TailGaussianExact{sigma}); }
TailModel TailModel::table(std::vector<double> t, std::vector<double> p) {
    return TailModel(TailTable{std::move(t), std::move(p)});
}
TailModel TailModel::zero() { return TailModel(TailZero{}); }

double TailModel::survival(double t) const {
    if (t < 0) return 1.0;
    if (const auto* w = std::get_if<TailWeibull>(&kind_))
        return std::exp(-w->c1 * std::pow(t, w->d));
    if (const auto* g = std::get_if<TailGaussianExact>(&kind_))
        return std::erfc(t / (g->sigma * std::numbers::sqrt2));
    if (const auto* tb = std::get_if<TailTable>(&kind_)) {
        if (t < tb->t.front()) return 1.0;  // unknown head, bounded by 1
        if (t > tb->t.back()) return 0.0;   // truncated past the table
        auto it = std::lower_bound(tb->t.begin(), tb->t.end(), t);
        std::size_t hi = static_cast<std::size_t>(it - tb->t.begin());
        if (hi == 0 || tb->t[hi] == t) return tb->p[hi];
        double w = (t - tb->t[hi - 1]) / (tb->t[hi] - tb->t[hi - 1]);
        return tb->p[hi - 1] * (1.0 - w) + tb->p[hi] * w;
    }
    return 0.0;  // degenerate zero variable
}

double TailModel::log_mgf_bound(double lambda) const {
    double al = std::abs(lambda);
    if (al == 0.0 || std::holds_alternative<TailZero>(kind_)) return 0.0;
    if (const auto* tb = std::get_if<TailTable>(&kind_)) {
        // Survival 1 before the first abscissa integrates in closed form; the
        // tabulated stretch goes by trapezoid; past the table the tail is 0.
        // The sum runs in linear space, so it only represents MGFs up to about
        // e^700. Where surviving mass would push lambda*t past that, return
        // +infinity: an over-estimate can only withhold a certificate, whereas
        // clamping would understate the MGF and could certify a false bound.
        double t_hot = tb->t.front();
        for (std::size_t i = 0; i + 1 < tb->t.size(); ++i)
            if (tb->p[i] > 0.0) t_hot = std::max(t_hot, tb->t[i + 1]);
        if (al * t_hot > 700.0) return std::numeric_limits<double>::infinity();
        double head = (std::cosh(al * tb->t.front()) - 1.0) / al;
        double acc = head;
        for (std::size_t i = 0; i + 1 < tb->t.size(); ++i) {
            double f0 = std::sinh(al * tb->t[i]) * tb->p[i];
            double f1 = std::sinh(al * tb->t[i + 1]) * tb->p[i + 1];
            acc += 0.5 * (f0 + f1) * (tb->t[i + 1] - tb->t[i]);
        }
        return std::log1p(al * acc);
    }
    double log_i;
    if (const auto* w = std::get_if<TailWeibull>(&kind_)) {
        double d = w->d, c1 = w->c1;
        auto g = [al, d, c1](double t) {
            return detail::log_sinh(al * t) - c1 * std::pow(t, d);
        };
        double t_peak = std::pow(al / (c1 * d), 1.0 / (d - 1.0));
        log_i = log_integral_exp(g, std::max(t_peak, 1e-3));
    } else {
        const auto& ga = std::get<TailGaussianExact>(kind_);
        double s = ga.sigma;
        auto g = [al, s](double t) {
            double e = std::erfc(t / (s * std::numbers::sqrt2));
            return detail::log_sinh(al * t) + std::log(e);  // log(0) = -inf past ~38 sigma
        };
        log_i = log_integral_exp(g, std::max(al * s * s, 1e-3));
    }
    return detail::softplus(std::log(al) + log_i);
}

std::string MgfBoundResult::to_json() const {
    json j;
    j["found"] = found;
    if (found) {
        j["C"] = c;
        j["lambda1"] = lambda1;
        j["prefix"] = prefix;
    } else {
        j["C"] = nullptr;
        j["lambda1"] = nullptr;
        j["prefix"] = 0;
    }
    return j.dump();
}

MgfBoundResult mgf_bound_from_tail(const TailModel& tail, const GeneratingFunction& phi,
                                   const std::vector<double>& lambda_grid) {
    if (lambda_grid.empty()) throw std::invalid_argument("mgf bound: empty lambda grid");
    if (!strictly_increasing(lambda_grid))
        throw std::invalid_argument("mgf bound: lambda grid must increase");
    for (double l : lambda_grid)
        if (!(l > 0)) throw std::invalid_argument("mgf bound: lambda grid must be positive");

    std::vector<double> log_mgf(lambda_grid.size());
    for (std::size_t j = 0; j < lambda_grid.size(); ++j)
        log_mgf[j] = tail.log_mgf_bound(lambda_grid[j]);

    MgfBoundResult best;
    for (int k = -32; k <= 64; ++k) {
        double c = std::pow(2.0, static_cast<double>(k) / 8.0);
        std::size_t prefix = 0;
        for (std::size_t j = 0; j < lambda_grid.size(); ++j) {
            double target;
            try {
                target = phi(c * lambda_grid[j]);
            } catch (const std::domain_error&) {
                break;  // scaled grid left the phi window: prefix ends here
            }
            // Slack absorbs quadrature noise so the equality case certifies.
            if (log_mgf[j] <= target + 1e-9 * std::max(1.0, std::abs(target)))
                prefix = j + 1;
            else
                break;
        }
        // Strictly-greater keeps the smallest C attaining the longest prefix
        // (the C grid ascends).
        if (prefix > best.prefix) {
            best.found = true;
            best.prefix = prefix;
            best.c = c;
            best.lambda1 = lambda_grid[prefix - 1];
        }
    }
    return best;
}

double pnorm(const RandomSource& source, double p, std::size_t /*n*/, std::uint64_t /*seed*/) {
    if (!(p >= 1.0)) throw std::invalid_argument("pnorm: p must be >= 1");
    if (const auto* g = std::get_if<Gaussian>(&source.kind())) {
        // E|g|^p = sigma^p 2^{p/2} Gamma((p+1)/2) / sqrt(pi)
        double lg = (p / 2.0) * std::numbers::ln2 + std::lgamma((p + 1.0) / 2.0) -
                    0.5 * std::log(std::numbers::pi);
        return g->sigma * std::exp(lg / p);
    }
    if (std::holds_alternative<Rademacher>(source.kind())) return 1.0;
    if (const auto* u = std::get_if<UniformCentered>(&source.kind()))
        return u->halfwidth * std::exp(-std::log1p(p) / p);
    if (const auto* t = std::get_if<TwoSidedExponential>(&source.kind()))
        return std::exp(std::lgamma(p + 1.0) / p) / t->rate;
    if (const auto* w = std::get_if<WeibullSymmetric>(&source.kind()))
        // E|X|^p = Gamma(p/d + 1) / c1^{p/d} from the exact modulus tail
        return std::exp(std::lgamma(p / w->d + 1.0) / p - std::log(w->c1) / w->d);

    // Discrete laws: exact weighted average of |x|^p on a log scale.
    const std::vector<double>* xs = nullptr;
    const std::vector<double>* ws = nullptr;
    std::vector<double> unit_weights;
    if (const auto* f = std::get_if<FiniteAtoms>(&source.kind())) {
        xs = &f->points;
        ws = &f->weights;
    } else {
        const auto& e = std::get<Empirical>(source.kind());
        xs = &e.samples;
        unit_weights.assign(e.samples.size(), 1.0 / static_cast<double>(e.samples.size()));
        ws = &unit_weights;
    }
    double mx = -kInf;
    for (double x : *xs)
        if (x != 0.0) mx = std::max(mx, p * std::log(std::abs(x)));
    if (mx == -kInf) return 0.0;  // the zero variable
    double acc = 0.0;
    for (std::size_t i = 0; i < xs->size(); ++i)
        if ((*xs)[i] != 0.0) acc += (*ws)[i] * std::exp(p * std::log(std::abs((*xs)[i])) - mx);
    return std::exp((mx + std::log(acc)) / p);
}

std::string DualityReport::to_json() const {
    json j;
    j["d_tail"] = d_tail;
    j["d_cgf"] = d_cgf;
    j["d_moment"] = d_moment;
    j["slopes"]["tail"] = slope_tail;
    j["slopes"]["cgf"] = slope_cgf;
    j["slopes"]["moment"] = slope_moment;
    j["n"] = n;
    j["seed"] = seed;
    return j.dump();
}

DualityReport duality_exponents(const RandomSource& source, const DualityConfig& config) {
    if (config.n < 1000) throw std::invalid_argument("duality: n must be >= 1000");
    DualityReport rep;
    rep.n = config.n;
    rep.seed = config.seed;

    std::vector<double> mods = source.sample(config.n, config.seed);
    for (double& m : mods) m = std::abs(m);
    std::sort(mods.begin(), mods.end());

    // Tail exponent: ln(-ln P(|delta|>x)) regressed on ln x.
    std::vector<double> x_grid = config.x_grid;
    if (x_grid.empty()) {
        if (mods.size() < 200) throw std::domain_error("duality: sample too small for the tail fit");
        double frontier = 0.98 * mods[mods.size() - 100];  // just under the 100th largest
        if (!(frontier > 0)) throw std::domain_error("duality: degenerate sample");
        x_grid = logspace(std::log10(frontier) - 1.0, std::log10(frontier), 12);
    }
    std::vector<double> lx, ly;
    for (double x : x_grid) {
        if (!(x > 0)) throw std::invalid_argument("duality: x grid must be positive");
        std::size_t exceed = static_cast<std::size_t>(
            mods.end() - std::upper_bound(mods.begin(), mods.end(), x));
        if (exceed < 100)
            throw std::domain_error("duality: fewer than 100 exceedances at x=" +
                                    std::to_string(x));
        double phat = static_cast<double>(exceed) / static_cast<double>(config.n);
        if (phat >= 1.0)
            throw std::domain_error("duality: x=" + std::to_string(x) +
                                    " sits below the whole sample");
        lx.push_back(std::log(x));
        ly.push_back(std::log(-std::log(phat)));
    }
    if (lx.size() < 2) throw std::domain_error("duality: not enough usable tail points");
    rep.slope_tail = least_squares_slope(lx, ly);
    rep.d_tail = rep.slope_tail;

    // CGF growth exponent from the upper decade of the lambda grid.
    std::vector<double> lam =
        config.lambda_grid.empty() ? logspace(-1.0, 2.0, 25) : config.lambda_grid;
    CgfOptions copts;
    copts.n = config.n;
    copts.seed = config.seed;
    CgfEvaluation ev = evaluate_cgf(source, lam, copts);
    double cutoff = lam.back() / 10.0 * (1.0 - 1e-12);
    std::vector<double> ll, ld;
    for (std::size_t i = 0; i < lam.size(); ++i) {
        if (lam[i] < cutoff || !(ev.log_mgf[i] > 0)) continue;
        ll.push_back(std::log(lam[i]));
        ld.push_back(std::log(ev.log_mgf[i]));
    }
    if (ll.size() < 2) throw std::domain_error("duality: not enough usable CGF points");
    rep.slope_cgf = least_squares_slope(ll, ld);
    rep.d_cgf = std::abs(rep.slope_cgf - 1.0) < 1e-9 ? kInf
                                                     : rep.slope_cgf / (rep.slope_cgf - 1.0);

    // Moment growth exponent over the p list.
    std::vector<double> ps =
        config.p_list.empty() ? std::vector<double>{2.0, 4.0, 8.0, 16.0, 32.0} : config.p_list;
    std::vector<double> lp, lq;
    for (double p : ps) {
        double q = pnorm(source, p, config.n, config.seed);
        if (!(q > 0)) continue;
        lp.push_back(std::log(p));
        lq.push_back(std::log(q));
    }
    if (lp.size() < 2) throw std::domain_error("duality: not enough usable p-norm points");
    rep.slope_moment = least_squares_slope(lp, lq);
    rep.d_moment = std::abs(rep.slope_moment) < 1e-12 ? kInf : 1.0 / rep.slope_moment;
    return rep;
}

}  // namespace tiltbound
