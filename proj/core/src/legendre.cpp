#include "tiltbound/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tiltbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Polyline {
    std::vector<double> x, v;      // hull vertices, x strictly increasing
    std::vector<double> slope;     // slope[k] between vertex k and k+1, nondecreasing
    bool hulled = false;
};

std::vector<std::size_t> lower_hull_indices(const std::vector<double>& x,
                                            const std::vector<double>& v) {
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < x.size(); ++i) {
        while (hull.size() >= 2) {
            std::size_t a = hull[hull.size() - 2], b = hull[hull.size() - 1];
            double cross = (x[b] - x[a]) * (v[i] - v[a]) - (x[i] - x[a]) * (v[b] - v[a]);
            if (cross < 0) hull.pop_back();
            else break;
        }
        hull.push_back(i);
    }
    return hull;
}

// Builds the effective hull polyline: appends virtual vertices at a finite
// domain bound outside the grid (affine continuation up to the bound, +infinity
// beyond), then takes the lower convex hull.
Polyline build_polyline(const ConvexGridFunction& f, bool declared_convex) {
    for (double val : f.values)
        if (!std::isfinite(val))
            throw std::invalid_argument("conjugate: input values must be finite");

    std::vector<double> x = f.grid, v = f.values;
    const std::size_t n = x.size();
    if (f.domain_bound) {
        double db = *f.domain_bound;
        if (!(db > 0)) throw std::invalid_argument("conjugate: domain_bound must be positive");
        if (f.right_extension == Extension::affine_with_boundary_slope && db > x.back()) {
            double s = (v[n - 1] - v[n - 2]) / (x[n - 1] - x[n - 2]);
            x.push_back(db);
            v.push_back(v[n - 1] + s * (db - x[n - 1]));
        }
        if (f.left_extension == Extension::affine_with_boundary_slope && -db < x.front()) {
            double s = (v[1] - v[0]) / (x[1] - x[0]);
            x.insert(x.begin(), -db);
            v.insert(v.begin(), v[0] + s * (-db - x[0]));
        }
    }

    double scale = 1.0;
    for (double val : v) scale = std::max(scale, std::abs(val));
    bool convex = true;
    for (std::size_t i = 1; i + 1 < x.size() && convex; ++i) {
        double sl = (v[i] - v[i - 1]) / (x[i] - x[i - 1]);
        double sr = (v[i + 1] - v[i]) / (x[i + 1] - x[i]);
        if (sr - sl < -1e-9 * scale) convex = false;
    }
    if (!convex && declared_convex)
        throw std::invalid_argument("conjugate: input declared convex is not convex");

    Polyline p;
    p.hulled = !convex;
    std::vector<std::size_t> idx;
    if (convex) {
        idx.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) idx[i] = i;
    } else {
        idx = lower_hull_indices(x, v);
    }
    for (std::size_t i : idx) {
        // Drop repeated abscissae and collinear run interiors to keep slopes strict.
        if (!p.x.empty() && !(x[i] > p.x.back())) continue;
        p.x.push_back(x[i]);
        p.v.push_back(v[i]);
    }
    for (std::size_t k = 0; k + 1 < p.x.size(); ++k)
        p.slope.push_back((p.v[k + 1] - p.v[k]) / (p.x[k + 1] - p.x[k]));
    return p;
}

}  // namespace

ConjugateResult conjugate(const ConvexGridFunction& f, const std::vector<double>& out_grid,
                          bool declared_convex) {
    if (out_grid.empty()) throw std::invalid_argument("conjugate: empty output grid");
    for (std::size_t i = 1; i < out_grid.size(); ++i)
        if (!(out_grid[i] > out_grid[i - 1]))
            throw std::invalid_argument("conjugate: output grid must be strictly increasing");

    Polyline p = build_polyline(f, declared_convex);

    ConjugateResult res;
    res.hulled = p.hulled;
    // With an affine extension the sup escapes to +infinity once |x| exceeds the
    // boundary slope; with plus_infinity_outside the grid hull carries the sup.
    res.finite_lo = (f.left_extension == Extension::affine_with_boundary_slope &&
                     !(f.domain_bound && -*f.domain_bound < f.grid.front()))
                        ? (p.slope.empty() ? -kInf : p.slope.front())
                        : -kInf;
    res.finite_hi = (f.right_extension == Extension::affine_with_boundary_slope &&
                     !(f.domain_bound && *f.domain_bound > f.grid.back()))
                        ? (p.slope.empty() ? kInf : p.slope.back())
                        : kInf;

    std::vector<double> out_values(out_grid.size());
    res.argmax.resize(out_grid.size());
    std::size_t k = 0;  // current maximizing vertex; advances monotonically
    for (std::size_t j = 0; j < out_grid.size(); ++j) {
        double xo = out_grid[j];
        while (k < p.slope.size() && p.slope[k] < xo) ++k;
        res.argmax[j] = k;
        if (xo < res.finite_lo || xo > res.finite_hi)
            out_values[j] = kInf;
        else
            out_values[j] = xo * p.x[k] - p.v[k];
    }

    if (out_grid.size() == 1) {
        // ConvexGridFunction needs two points; duplicate via a degenerate wrapper
        // is not allowed, so synthesize a second point one slope-step away.
        ConvexGridFunction g({out_grid[0], out_grid[0] + 1.0},
                             {out_values[0], out_values[0] + p.x.back()});
        res.f = std::move(g);
    } else {
        res.f = ConvexGridFunction(out_grid, std::move(out_values));
    }
    res.f.left_extension = std::isfinite(res.finite_lo) ? Extension::plus_infinity_outside
                                                        : Extension::affine_with_boundary_slope;
    res.f.right_extension = std::isfinite(res.finite_hi) ? Extension::plus_infinity_outside
                                                         : Extension::affine_with_boundary_slope;
    return res;
}

ConjugateResult biconjugate(const ConvexGridFunction& f) {
    Polyline p = build_polyline(f, false);

    ConjugateResult res;
    res.hulled = p.hulled;
    res.finite_lo = f.grid.front();
    res.finite_hi = f.grid.back();

    if (p.slope.size() < 2) {
        // Affine (or two-point) input: self-biconjugate on its grid.
        res.f = ConvexGridFunction(f.grid, f.values);
        res.f.hulled = p.hulled;
        res.argmax.assign(f.grid.size(), 0);
        return res;
    }

    // Conjugate onto the exact slope set, then back onto the original grid.
    std::vector<double> sgrid;
    for (double s : p.slope)
        if (sgrid.empty() || s > sgrid.back()) sgrid.push_back(s);
    std::vector<double> gstar(sgrid.size());
    {
        std::size_t k = 0;
        for (std::size_t j = 0; j < sgrid.size(); ++j) {
            while (k < p.slope.size() && p.slope[k] < sgrid[j]) ++k;
            gstar[j] = sgrid[j] * p.x[k] - p.v[k];
        }
    }
    std::vector<double> out(f.grid.size());
    res.argmax.resize(f.grid.size());
    {
        // Slopes of the conjugate polyline are the hull abscissae; advance the
        // same way as in the forward pass.
        std::size_t k = 0;
        for (std::size_t j = 0; j < f.grid.size(); ++j) {
            double y = f.grid[j];
            while (k + 1 < sgrid.size()) {
                double slope_k = (gstar[k + 1] - gstar[k]) / (sgrid[k + 1] - sgrid[k]);
                if (slope_k < y) ++k;
                else break;
            }
            res.argmax[j] = k;
            out[j] = y * sgrid[k] - gstar[k];
        }
    }
    res.f = ConvexGridFunction(f.grid, std::move(out));
    res.f.hulled = p.hulled;
    res.f.left_extension = f.left_extension;
    res.f.right_extension = f.right_extension;
    res.f.domain_bound = f.domain_bound;
    return res;
}

std::vector<ConvexGridFunction> conjugate_radial(const ConvexGridFunction& phi_profile,
                                                 const std::vector<std::vector<double>>& directions,
                                                 const std::vector<double>& out_radii) {
    if (phi_profile.grid.front() < 0)
        throw std::invalid_argument("conjugate_radial: profile must be tabulated on radii >= 0");
    for (double r : out_radii)
        if (r < 0) throw std::invalid_argument("conjugate_radial: output radii must be >= 0");

    // Even extension of the profile to the negative axis.
    std::vector<double> x, v;
    for (std::size_t i = phi_profile.grid.size(); i-- > 0;) {
        if (phi_profile.grid[i] == 0.0) continue;
        x.push_back(-phi_profile.grid[i]);
        v.push_back(phi_profile.values[i]);
    }
    x.insert(x.end(), phi_profile.grid.begin(), phi_profile.grid.end());
    v.insert(v.end(), phi_profile.values.begin(), phi_profile.values.end());
    ConvexGridFunction even(std::move(x), std::move(v));
    even.left_extension = phi_profile.right_extension;
    even.right_extension = phi_profile.right_extension;
    if (phi_profile.domain_bound) even.domain_bound = phi_profile.domain_bound;

    ConjugateResult scalar = conjugate(even, out_radii);
    std::size_t copies = directions.empty() ? 1 : directions.size();
    return std::vector<ConvexGridFunction>(copies, scalar.f);
}

}  // namespace tiltbound
