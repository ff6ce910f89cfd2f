#pragma once

#include "tiltbound/grid_function.hpp"
#include "tiltbound/random_source.hpp"

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace tiltbound {

// Hook for the slowly varying correction L in the stitched family; the argument
// is ln|lambda| and the return value must stay positive. Empty means L == 1.
using SlowlyVaryingHook = std::function<double(double)>;

// phi(lambda) = scale * lambda^2 on the whole line. scale = 0.5 is the
// subgaussian normalization; other scales support the monotonicity laws.
struct SubgaussianPhi {
    double scale = 0.5;
};

// Piecewise generating function: c0 * lambda^2 for |lambda| <= stitch and
// c1 * |lambda|^m * ln^gamma|lambda| * L(ln|lambda|) beyond. c0 is derived
// from c1 by value matching at the stitch so the function is continuous.
struct PhiFamily {
    double m = 2.0;
    double gamma = 0.0;
    double stitch = 10.0;  // must exceed e so ln^gamma is safe on the tail
    double c1 = 1.0;
    SlowlyVaryingHook slow;  // evaluated at ln|lambda|; empty = identically 1

    double slow_at(double log_lambda) const { return slow ? slow(log_lambda) : 1.0; }
    double c0() const;
};

// phi given by linear interpolation of a sampled even shape.
struct CustomPhi {
    ConvexGridFunction shape;
};

class GeneratingFunction {
public:
    using Kind = std::variant<SubgaussianPhi, PhiFamily, CustomPhi>;

    explicit GeneratingFunction(Kind kind);

    static GeneratingFunction phi2(double scale = 0.5);
    static GeneratingFunction family(double m, double gamma, double stitch = 10.0,
                                     double c1 = 1.0, SlowlyVaryingHook slow = {});
    static GeneratingFunction custom(ConvexGridFunction shape);

    // Command-line syntax: "phi2", "<k>*phi2" (k times the subgaussian phi2),
    // "family:m=<v>,gamma=<v>[,Z=<v>][,C1=<v>]", or "custom:<csv path>" with the
    // JSON sidecar expected at "<csv path>.json".
    static GeneratingFunction parse(const std::string& text);

    const Kind& kind() const { return kind_; }
    std::string name() const;

    // Interval on which phi is represented: infinite for phi2/family, the grid
    // extent for custom shapes that are +infinity outside.
    KramerWindow window() const;

    // Even in lambda. Throws std::domain_error outside the window.
    double operator()(double lambda) const;

    // Increasing inverse on [0, infinity): the smallest x >= 0 with
    // envelope(x) >= y, where envelope is the running maximum of phi (identical
    // to phi when phi is monotone). Bisection to relative 1e-12. Returns
    // +infinity when y exceeds the attainable range on the window.
    double inverse(double y) const;

    // True when the inverse really runs on the monotone envelope rather than
    // phi itself (the family dips after the stitch iff gamma < 0 and
    // m*ln(stitch) + gamma < 0).
    bool inverse_uses_envelope() const;

    // phi sampled on a strictly increasing grid, +infinity outside; feed to
    // legendre::conjugate for tail bounds.
    ConvexGridFunction sample_shape(const std::vector<double>& grid) const;

private:
    double raw(double x) const;       // phi at x >= 0, no window check
    double envelope(double x) const;  // running maximum of raw on [0, x]

    Kind kind_;
};

}  // namespace tiltbound
