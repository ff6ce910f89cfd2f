#pragma once

#include "tiltbound/grid_function.hpp"

#include <vector>

namespace tiltbound {

struct ConjugateResult {
    ConvexGridFunction f;  // phi* on the requested output grid
    bool hulled = false;   // input was not convex and was replaced by its hull
    // Interval of conjugate finiteness implied by the input's extensions: with
    // affine extensions the conjugate is +infinity outside [slope_lo, slope_hi];
    // with plus_infinity_outside it is finite everywhere.
    double finite_lo = 0.0, finite_hi = 0.0;
    // Smallest maximizing input index per output point (tie-break diagnostic).
    std::vector<std::size_t> argmax;
};

// Discrete Legendre-Fenchel transform phi*(x) = sup_y (x*y - phi(y)) with the sup
// over the tabulated grid (its convex hull when the input is not convex).
// Linear-time slope-merge; out_grid must be strictly increasing.
// If `declared_convex` is set and the input violates convexity beyond
// 1e-9*scale, throws std::invalid_argument instead of hulling.
ConjugateResult conjugate(const ConvexGridFunction& f, const std::vector<double>& out_grid,
                          bool declared_convex = false);

// (phi*)* restricted to the original grid, using the exact slope set of the
// (hulled) input polyline as the intermediate grid; equals the input exactly for
// convex inputs, its lower convex envelope otherwise.
ConjugateResult biconjugate(const ConvexGridFunction& f);

// Conjugate of a radial function phi(|x|) given by its profile on radii >= 0.
// The result is radial as well; returns the profile conjugate evaluated at the
// requested radii, one copy per direction (directions serve anisotropic callers
// that whiten first). Throws std::invalid_argument if the profile grid has
// negative abscissae.
std::vector<ConvexGridFunction> conjugate_radial(const ConvexGridFunction& phi_profile,
                                                 const std::vector<std::vector<double>>& directions,
                                                 const std::vector<double>& out_radii);

}  // namespace tiltbound
