#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tiltbound {

// Behavior of a grid function outside its tabulated abscissae.
enum class Extension {
    affine_with_boundary_slope,  // continue with the one-sided boundary slope
    plus_infinity_outside,       // +infinity beyond the grid hull
};

std::string extension_name(Extension e);
Extension extension_from_name(const std::string& name);

// A function tabulated on a strictly increasing grid. Carrier for Delta, Phi,
// phi and phi*. `domain_bound` marks a finite abscissa beyond which the function
// is +infinity regardless of extension (a finite MGF window).
struct ConvexGridFunction {
    std::vector<double> grid;
    std::vector<double> values;
    Extension left_extension = Extension::affine_with_boundary_slope;
    Extension right_extension = Extension::affine_with_boundary_slope;
    std::optional<double> domain_bound;
    bool hulled = false;  // set when an operation replaced values by their convex hull

    ConvexGridFunction() = default;
    ConvexGridFunction(std::vector<double> grid, std::vector<double> values);

    std::size_t size() const { return grid.size(); }
    // Piecewise-linear interpolation; throws std::domain_error outside the grid
    // when the relevant extension is plus_infinity_outside.
    double interpolate(double x) const;

    std::string to_csv() const;        // "x,value"
    std::string sidecar_json() const;  // {"left_extension","right_extension","domain_bound","hulled"}
    static ConvexGridFunction from_csv(const std::string& csv_path,
                                       const std::string& sidecar_path = "");
};

// Normalized second differences 2*f[x_{i-1},x_i,x_{i+1}] on interior points,
// the nonuniform-grid estimate of f''. Size = grid size - 2.
std::vector<double> second_differences(const std::vector<double>& grid,
                                       const std::vector<double>& values);

// True when all second differences are >= -tol.
bool convex_within(const ConvexGridFunction& f, double tol);

// Greatest convex minorant through the tabulated points (lower convex envelope),
// computed by a monotone-chain scan. Same grid; values on the hull.
ConvexGridFunction lower_convex_envelope(const ConvexGridFunction& f);

}  // namespace tiltbound
