#pragma once

#include "tiltbound/cgf.hpp"
#include "tiltbound/generating_function.hpp"
#include "tiltbound/grid_function.hpp"
#include "tiltbound/multivariate.hpp"
#include "tiltbound/random_source.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tiltbound {

enum class ConvexityTarget { OC, LC, LD };
enum class Verdict { convex, not_convex, inconclusive };

std::string target_name(ConvexityTarget t);
std::string verdict_name(Verdict v);

// Grid point attaining the minimal second difference. For LD certificates the
// index is flat: ray*radii.size() + radius position for on-ray triples, and
// rays*radii + pair position for cross-ray midpoint checks (x then holds the
// midpoint radius).
struct Witness {
    double x = 0.0;
    double second_difference = 0.0;
    std::size_t index = 0;
};

struct ConvexityCertificate {
    ConvexityTarget target = ConvexityTarget::OC;
    Verdict verdict = Verdict::inconclusive;
    double min_second_difference = 0.0;
    Witness witness;
    double tol = 0.0;
    std::optional<std::uint64_t> seed;  // set when randomness chose the checks
    std::size_t grid_points = 0;

    std::string to_json() const;  // {"target","verdict","min_second_difference",
                                  //  "witness","tol","seed"}
};

// 1e-8 * max|values|: the closed-form-grid default. Sampled grids use
// 3 * (propagated Monte Carlo standard error) instead; see certify_oc.
double default_certificate_tol(const std::vector<double>& values);

// Normalized second differences on consecutive triples; convex iff all >= -tol,
// not_convex iff any < -10*tol, inconclusive between. Needs >= 5 grid points.
ConvexityCertificate certify(const ConvexGridFunction& f, ConvexityTarget target, double tol);
ConvexityCertificate certify(const ConvexGridFunction& f, ConvexityTarget target);

// Delta on a symmetric grid (default: 81 points over 0.8 of the effective
// window), certified as OC. Monte Carlo grids get tol = 3 * the propagated
// standard error of the worst second difference, so noise cannot forge a
// not_convex verdict.
ConvexityCertificate certify_oc(const RandomSource& source,
                                const std::vector<double>& lambda_grid = {},
                                const CgfOptions& opts = {});

// Phi = Delta/lambda on the same default grid with the symmetric hole of radius
// 1e-3 removed and the exact origin Phi(0) = 0 inserted, certified as LC.
ConvexityCertificate certify_lc(const RandomSource& source,
                                const std::vector<double>& lambda_grid = {},
                                const CgfOptions& opts = {});

enum class LcClass { LC, not_LC };

struct FamilyLcResult {
    LcClass verdict = LcClass::not_LC;
    bool boundary = false;  // the m = 1, gamma = 0 edge of the rule
};

// Closed-form rule for the stitched family with L == 1: LC iff m > 1, or m = 1
// and gamma >= 0.
FamilyLcResult classify_family_lc(double m, double gamma);

// Numeric side of the same rule: phi(lambda)/lambda tabulated on the positive
// lambda grid and certified against the reciprocal abscissae t = 1/lambda (the
// substitution under which the ratio's convexity is equivalent to LC; certifying
// against lambda itself tests a different property and disagrees with the
// classifier). Grid must be positive and strictly increasing.
ConvexityCertificate lc_via_phi_over_lambda(const GeneratingFunction& phi,
                                            const std::vector<double>& lambda_grid);

// One random cross-ray midpoint comparison: convexity demands
// v(a) + v(b) - 2 v((a+b)/2) >= 0; pseudo_second normalizes by (|a-b|/2)^2 so
// the value is comparable to on-ray second differences.
struct MidpointCheck {
    std::vector<double> a, b;
    double va = 0.0, vb = 0.0, vmid = 0.0;
    double pseudo_second = 0.0;
};

// V sampled on a polar grid plus random cross-ray midpoint checks.
struct LdField {
    std::vector<std::vector<double>> rays;  // unit vectors
    std::vector<double> radii;              // positive, strictly increasing
    std::vector<std::vector<double>> v;     // v[ray][radius index]
    std::vector<MidpointCheck> midpoints;
    std::uint64_t seed = 42;
    bool whitened = false;
};

// Evaluates the model on ray_count rays (uniform circle for dimension 2,
// deterministic pseudorandom directions otherwise) and draws midpoint_pairs
// cross-ray pairs with the given seed.
LdField build_ld_field(const MvModel& model, std::size_t ray_count,
                       const std::vector<double>& radii, std::size_t midpoint_pairs = 200,
                       std::uint64_t seed = 42);

// Certifies r -> V(r u) along every ray and folds the midpoint checks into the
// same minimum; convex only when every check passes.
ConvexityCertificate certify_ld(const LdField& field, double tol);
ConvexityCertificate certify_ld(const LdField& field);

// Convexity margin of the raw Euclidean V(lambda) = (B lambda, lambda)/(2|lambda|):
// the restriction h to the unit sphere satisfies h + h'' >= mu_min - mu_max/2,
// with equality attained, so V is convex iff this margin is >= 0 (condition
// number at most 2). b is row-major symmetric positive definite.
double euclidean_v_convexity_margin(const std::vector<double>& b, std::size_t dim);

}  // namespace tiltbound
