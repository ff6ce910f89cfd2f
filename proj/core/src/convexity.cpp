#include "tiltbound/convexity.hpp"

#include "tiltbound/grids.hpp"
#include "tiltbound/rng.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tiltbound {

using json = nlohmann::ordered_json;

namespace {

constexpr double kLcHoleRadius = 1e-3;

std::vector<double> default_symmetric_grid(const RandomSource& source) {
    double edge = 0.8 * source.effective_lambda0();
    return linspace(-edge, edge, 81);
}

// Standard error of each normalized second difference when the tabulated values
// carry independent errors se_i. Independence overstates the noise of the
// shared-sample estimator, which inflates tol and can only push verdicts toward
// inconclusive, never toward a false not_convex.
double worst_second_difference_se(const std::vector<double>& grid,
                                  const std::vector<double>& se) {
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        double dl = grid[i] - grid[i - 1];
        double dr = grid[i + 1] - grid[i];
        double span = grid[i + 1] - grid[i - 1];
        double var = (se[i + 1] / dr) * (se[i + 1] / dr) +
                     se[i] * se[i] * (1.0 / dr + 1.0 / dl) * (1.0 / dr + 1.0 / dl) +
                     (se[i - 1] / dl) * (se[i - 1] / dl);
        worst = std::max(worst, 2.0 / span * std::sqrt(var));
    }
    return worst;
}

Verdict verdict_from_min(double min_sd, double tol) {
    if (min_sd >= -tol) return Verdict::convex;
    if (min_sd < -10.0 * tol) return Verdict::not_convex;
    return Verdict::inconclusive;
}

}  // namespace

std::string target_name(ConvexityTarget t) {
    switch (t) {
        case ConvexityTarget::OC: return "OC";
        case ConvexityTarget::LC: return "LC";
        case ConvexityTarget::LD: return "LD";
    }
    return "unknown";
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::convex: return "convex";
        case Verdict::not_convex: return "not_convex";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

std::string ConvexityCertificate::to_json() const {
    json j;
    j["target"] = target_name(target);
    j["verdict"] = verdict_name(verdict);
    j["min_second_difference"] = min_second_difference;
    j["witness"]["x"] = witness.x;
    j["witness"]["second_difference"] = witness.second_difference;
    j["witness"]["index"] = witness.index;
    j["tol"] = tol;
    if (seed)
        j["seed"] = *seed;
    else
        j["seed"] = nullptr;
    return j.dump();
}

double default_certificate_tol(const std::vector<double>& values) {
    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    return std::max(1e-8 * scale, 1e-15);
}

ConvexityCertificate certify(const ConvexGridFunction& f, ConvexityTarget target, double tol) {
    if (f.size() < 5) throw std::invalid_argument("certify: need at least 5 grid points");
    if (!(tol > 0)) throw std::invalid_argument("certify: tolerance must be positive");
    std::vector<double> sd = second_differences(f.grid, f.values);
    ConvexityCertificate cert;
    cert.target = target;
    cert.tol = tol;
    cert.grid_points = f.size();
    std::size_t arg = 0;
    for (std::size_t i = 1; i < sd.size(); ++i)
        if (sd[i] < sd[arg]) arg = i;
    cert.min_second_difference = sd[arg];
    cert.witness = {f.grid[arg + 1], sd[arg], arg + 1};
    cert.verdict = verdict_from_min(cert.min_second_difference, tol);
    return cert;
}

ConvexityCertificate certify(const ConvexGridFunction& f, ConvexityTarget target) {
    return certify(f, target, default_certificate_tol(f.values));
}

ConvexityCertificate certify_oc(const RandomSource& source,
                                const std::vector<double>& lambda_grid,
                                const CgfOptions& opts) {
    std::vector<double> grid = lambda_grid.empty() ? default_symmetric_grid(source) : lambda_grid;
    CgfEvaluation ev = evaluate_cgf(source, grid, opts);
    ConvexGridFunction f(grid, ev.log_mgf);
    double tol;
    if (ev.method == CgfMethod::monte_carlo) {
        std::vector<double> se = log_mgf_standard_errors(source, grid, opts);
        tol = std::max(3.0 * worst_second_difference_se(grid, se),
                       default_certificate_tol(ev.log_mgf));
    } else {
        tol = default_certificate_tol(ev.log_mgf);
    }
    ConvexityCertificate cert = certify(f, ConvexityTarget::OC, tol);
    if (ev.method == CgfMethod::monte_carlo) cert.seed = ev.seed;
    return cert;
}

ConvexityCertificate certify_lc(const RandomSource& source,
                                const std::vector<double>& lambda_grid,
                                const CgfOptions& opts) {
    std::vector<double> requested =
        lambda_grid.empty() ? default_symmetric_grid(source) : lambda_grid;
    // Drop the cancellation-prone neighborhood of 0 and pin the exact origin.
    std::vector<double> grid;
    for (double l : requested)
        if (std::abs(l) >= kLcHoleRadius) grid.push_back(l);
    grid.push_back(0.0);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    CgfEvaluation ev = evaluate_cgf(source, grid, opts);
    ConvexGridFunction f(grid, ev.phi_values);
    double tol;
    if (ev.method == CgfMethod::monte_carlo) {
        std::vector<double> se = log_mgf_standard_errors(source, grid, opts);
        // Phi = Delta/lambda rescales each error by 1/|lambda|.
        for (std::size_t i = 0; i < se.size(); ++i)
            if (grid[i] != 0.0) se[i] /= std::abs(grid[i]);
        tol = std::max(3.0 * worst_second_difference_se(grid, se),
                       default_certificate_tol(ev.phi_values));
    } else {
        tol = default_certificate_tol(ev.phi_values);
    }
    ConvexityCertificate cert = certify(f, ConvexityTarget::LC, tol);
    if (ev.method == CgfMethod::monte_carlo) cert.seed = ev.seed;
    return cert;
}

FamilyLcResult classify_family_lc(double m, double gamma) {
    if (!(m > 0)) throw std::invalid_argument("classify: m must be positive");
    FamilyLcResult r;
    r.verdict = (m > 1.0 || (m == 1.0 && gamma >= 0.0)) ? LcClass::LC : LcClass::not_LC;
    r.boundary = m == 1.0 && gamma == 0.0;
    return r;
}

ConvexityCertificate lc_via_phi_over_lambda(const GeneratingFunction& phi,
                                            const std::vector<double>& lambda_grid) {
    if (lambda_grid.size() < 5)
        throw std::invalid_argument("lc_via_phi_over_lambda: need at least 5 grid points");
    if (!strictly_increasing(lambda_grid) || !(lambda_grid.front() > 0))
        throw std::invalid_argument("lc_via_phi_over_lambda: grid must be positive increasing");
    const std::size_t n = lambda_grid.size();
    // Tabulate the ratio against t = 1/lambda (ascending t = descending lambda).
    std::vector<double> t(n), ratio(n);
    for (std::size_t i = 0; i < n; ++i) {
        double lam = lambda_grid[n - 1 - i];
        t[i] = 1.0 / lam;
        ratio[i] = phi(lam) / lam;
    }
    ConvexGridFunction f(std::move(t), std::move(ratio));
    ConvexityCertificate cert = certify(f, ConvexityTarget::LC);
    // Report the witness in lambda coordinates, where the caller's grid lives.
    cert.witness.x = 1.0 / cert.witness.x;
    return cert;
}

LdField build_ld_field(const MvModel& model, std::size_t ray_count,
                       const std::vector<double>& radii, std::size_t midpoint_pairs,
                       std::uint64_t seed) {
    if (ray_count < 2) throw std::invalid_argument("ld field: need at least 2 rays");
    if (radii.size() < 5 || !strictly_increasing(radii) || !(radii.front() > 0))
        throw std::invalid_argument("ld field: radii must be positive increasing, >= 5 points");

    LdField field;
    field.radii = radii;
    field.seed = seed;
    field.whitened = model.whitened();
    const std::size_t dim = model.dim();
    if (dim == 2) {
        field.rays = unit_circle_rays(ray_count);
    } else {
        // Deterministic pseudorandom directions for other dimensions.
        BlockRng rng(seed, 0x5261797344697273ULL);
        field.rays.resize(ray_count);
        for (auto& u : field.rays) {
            double norm = 0.0;
            while (norm == 0.0) {
                u.resize(dim);
                for (double& c : u) {
                    double a = rng.uniform_pos(), b = rng.uniform();
                    c = std::sqrt(-2.0 * std::log(a)) * std::cos(6.283185307179586 * b);
                }
                norm = std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
            }
            for (double& c : u) c /= norm;
        }
    }

    field.v.assign(field.rays.size(), std::vector<double>(radii.size()));
    std::vector<double> point(dim);
    for (std::size_t r = 0; r < field.rays.size(); ++r)
        for (std::size_t k = 0; k < radii.size(); ++k) {
            for (std::size_t c = 0; c < dim; ++c) point[c] = radii[k] * field.rays[r][c];
            field.v[r][k] = model.v(point);
        }

    BlockRng rng(seed, 0x4d6964706f696e74ULL);
    auto pick = [&](std::size_t bound) {
        return std::min(static_cast<std::size_t>(rng.uniform() * static_cast<double>(bound)),
                        bound - 1);
    };
    field.midpoints.reserve(midpoint_pairs);
    while (field.midpoints.size() < midpoint_pairs) {
        std::size_t r1 = pick(field.rays.size()), k1 = pick(radii.size());
        std::size_t r2 = pick(field.rays.size()), k2 = pick(radii.size());
        if (r1 == r2 && k1 == k2) continue;
        MidpointCheck mc;
        mc.a.resize(dim);
        mc.b.resize(dim);
        std::vector<double> mid(dim);
        double dist2 = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            mc.a[c] = radii[k1] * field.rays[r1][c];
            mc.b[c] = radii[k2] * field.rays[r2][c];
            mid[c] = 0.5 * (mc.a[c] + mc.b[c]);
            dist2 += (mc.a[c] - mc.b[c]) * (mc.a[c] - mc.b[c]);
        }
        if (dist2 == 0.0) continue;  // same point reached from two indices
        mc.va = field.v[r1][k1];
        mc.vb = field.v[r2][k2];
        mc.vmid = model.v(mid);
        double h2 = 0.25 * dist2;
        mc.pseudo_second = (mc.va + mc.vb - 2.0 * mc.vmid) / h2;
        field.midpoints.push_back(std::move(mc));
    }
    return field;
}

ConvexityCertificate certify_ld(const LdField& field, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("certify_ld: tolerance must be positive");
    ConvexityCertificate cert;
    cert.target = ConvexityTarget::LD;
    cert.tol = tol;
    cert.seed = field.seed;
    cert.grid_points = field.rays.size() * field.radii.size();

    bool any = false;
    auto consider = [&](double value, double x, std::size_t index) {
        if (!any || value < cert.min_second_difference) {
            any = true;
            cert.min_second_difference = value;
            cert.witness = {x, value, index};
        }
    };
    const std::size_t k = field.radii.size();
    for (std::size_t r = 0; r < field.v.size(); ++r) {
        std::vector<double> sd = second_differences(field.radii, field.v[r]);
        for (std::size_t i = 0; i < sd.size(); ++i)
            consider(sd[i], field.radii[i + 1], r * k + i + 1);
    }
    for (std::size_t p = 0; p < field.midpoints.size(); ++p) {
        const MidpointCheck& mc = field.midpoints[p];
        double radius = 0.0;
        for (std::size_t c = 0; c < mc.a.size(); ++c) {
            double m = 0.5 * (mc.a[c] + mc.b[c]);
            radius += m * m;
        }
        consider(mc.pseudo_second, std::sqrt(radius), field.rays.size() * k + p);
    }
    if (!any) throw std::invalid_argument("certify_ld: empty field");
    cert.verdict = verdict_from_min(cert.min_second_difference, tol);
    return cert;
}

ConvexityCertificate certify_ld(const LdField& field) {
    std::vector<double> all;
    for (const auto& ray : field.v) all.insert(all.end(), ray.begin(), ray.end());
    return certify_ld(field, default_certificate_tol(all));
}

double euclidean_v_convexity_margin(const std::vector<double>& b, std::size_t dim) {
    if (b.size() != dim * dim)
        throw std::invalid_argument("convexity margin: matrix size mismatch");
    Eigen::MatrixXd m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = b[i * dim + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("convexity margin: eigenvalue computation failed");
    double mu_min = eig.eigenvalues().minCoeff();
    double mu_max = eig.eigenvalues().maxCoeff();
    if (!(mu_min > 0))
        throw std::invalid_argument("convexity margin: matrix must be positive definite");
    return mu_min - 0.5 * mu_max;
}

}  // namespace tiltbound
