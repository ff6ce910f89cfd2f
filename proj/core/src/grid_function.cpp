#include "tiltbound/grid_function.hpp"

#include "tiltbound/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tiltbound {

using json = nlohmann::ordered_json;

std::string extension_name(Extension e) {
    return e == Extension::affine_with_boundary_slope ? "affine_with_boundary_slope"
                                                      : "plus_infinity_outside";
}

Extension extension_from_name(const std::string& name) {
    if (name == "affine_with_boundary_slope") return Extension::affine_with_boundary_slope;
    if (name == "plus_infinity_outside") return Extension::plus_infinity_outside;
    throw std::invalid_argument("unknown extension '" + name + "'");
}

ConvexGridFunction::ConvexGridFunction(std::vector<double> g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
    if (grid.size() != values.size())
        throw std::invalid_argument("grid function: grid/values length mismatch");
    if (grid.size() < 2) throw std::invalid_argument("grid function: need at least 2 points");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("grid function: abscissae must be strictly increasing");
}

double ConvexGridFunction::interpolate(double x) const {
    if (x < grid.front()) {
        if (left_extension == Extension::plus_infinity_outside)
            throw std::domain_error("interpolate: point left of the grid");
        double s = (values[1] - values[0]) / (grid[1] - grid[0]);
        return values[0] + s * (x - grid[0]);
    }
    if (x > grid.back()) {
        if (right_extension == Extension::plus_infinity_outside)
            throw std::domain_error("interpolate: point right of the grid");
        std::size_t n = grid.size();
        double s = (values[n - 1] - values[n - 2]) / (grid[n - 1] - grid[n - 2]);
        return values[n - 1] + s * (x - grid[n - 1]);
    }
    auto it = std::lower_bound(grid.begin(), grid.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - grid.begin());
    if (hi == 0) return values[0];
    double w = (x - grid[hi - 1]) / (grid[hi] - grid[hi - 1]);
    return values[hi - 1] * (1.0 - w) + values[hi] * w;
}

std::string ConvexGridFunction::to_csv() const {
    CsvTable t;
    t.header = {"x", "value"};
    for (std::size_t i = 0; i < grid.size(); ++i) t.rows.push_back({grid[i], values[i]});
    return render_csv(t);
}

std::string ConvexGridFunction::sidecar_json() const {
    json j;
    j["left_extension"] = extension_name(left_extension);
    j["right_extension"] = extension_name(right_extension);
    if (domain_bound)
        j["domain_bound"] = *domain_bound;
    else
        j["domain_bound"] = nullptr;
    j["hulled"] = hulled;
    return j.dump();
}

ConvexGridFunction ConvexGridFunction::from_csv(const std::string& csv_path,
                                                const std::string& sidecar_path) {
    CsvTable t = read_csv(csv_path);
    std::vector<double> g, v;
    for (const auto& row : t.rows) {
        if (row.size() < 2) throw std::runtime_error(csv_path + ": need two columns");
        g.push_back(row[0]);
        v.push_back(row[1]);
    }
    ConvexGridFunction f(std::move(g), std::move(v));
    if (!sidecar_path.empty() && file_exists(sidecar_path)) {
        json j = json::parse(read_file(sidecar_path));
        if (j.contains("left_extension"))
            f.left_extension = extension_from_name(j["left_extension"].get<std::string>());
        if (j.contains("right_extension"))
            f.right_extension = extension_from_name(j["right_extension"].get<std::string>());
        if (j.contains("domain_bound") && !j["domain_bound"].is_null())
            f.domain_bound = j["domain_bound"].get<double>();
        if (j.contains("hulled")) f.hulled = j["hulled"].get<bool>();
    }
    return f;
}

std::vector<double> second_differences(const std::vector<double>& grid,
                                       const std::vector<double>& values) {
    if (grid.size() != values.size() || grid.size() < 3)
        throw std::invalid_argument("second_differences: need >= 3 matching points");
    std::vector<double> out(grid.size() - 2);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        double sl = (values[i] - values[i - 1]) / (grid[i] - grid[i - 1]);
        double sr = (values[i + 1] - values[i]) / (grid[i + 1] - grid[i]);
        out[i - 1] = 2.0 * (sr - sl) / (grid[i + 1] - grid[i - 1]);
    }
    return out;
}

bool convex_within(const ConvexGridFunction& f, double tol) {
    for (double d : second_differences(f.grid, f.values))
        if (d < -tol) return false;
    return true;
}

ConvexGridFunction lower_convex_envelope(const ConvexGridFunction& f) {
    const std::size_t n = f.size();
    // Monotone-chain lower hull over the point set (x_i, v_i); x already sorted.
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < n; ++i) {
        while (hull.size() >= 2) {
            std::size_t a = hull[hull.size() - 2], b = hull[hull.size() - 1];
            double cross = (f.grid[b] - f.grid[a]) * (f.values[i] - f.values[a]) -
                           (f.grid[i] - f.grid[a]) * (f.values[b] - f.values[a]);
            if (cross < 0) hull.pop_back();  // b lies above chord a-i: not on the hull
            else break;
        }
        hull.push_back(i);
    }
    ConvexGridFunction out = f;
    std::size_t seg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (seg + 1 < hull.size() && f.grid[hull[seg + 1]] < f.grid[i]) ++seg;
        std::size_t a = hull[seg];
        std::size_t b = hull[std::min(seg + 1, hull.size() - 1)];
        if (a == b) {
            out.values[i] = f.values[a];
        } else {
            double w = (f.grid[i] - f.grid[a]) / (f.grid[b] - f.grid[a]);
            out.values[i] = f.values[a] * (1.0 - w) + f.values[b] * w;
        }
    }
    out.hulled = true;
    return out;
}

}  // namespace tiltbound
