#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tiltbound/convexity.hpp"
#include "tiltbound/generating_function.hpp"
#include "tiltbound/grids.hpp"
#include "tiltbound/multivariate.hpp"
#include "tiltbound/random_source.hpp"

using namespace tiltbound;

namespace {

ConvexGridFunction bumped_parabola(double bump) {
    // x^2 on 0..8 with the middle value raised: the second difference at x=4
    // drops from 2 to 2 - 2*bump while the neighbors rise to 2 + bump.
    auto grid = linspace(0.0, 8.0, 9);
    std::vector<double> values;
    for (double x : grid) values.push_back(x * x);
    values[4] += bump;
    return ConvexGridFunction(grid, values);
}

}  // namespace

TEST_CASE("certify: one data set, all three verdicts by tolerance") {
    ConvexGridFunction f = bumped_parabola(1.5);  // min second difference = -1
    ConvexityCertificate loose = certify(f, ConvexityTarget::OC, 1.0);
    CHECK(loose.verdict == Verdict::convex);  // -1 >= -tol exactly on the edge
    ConvexityCertificate mid = certify(f, ConvexityTarget::OC, 0.5);
    CHECK(mid.verdict == Verdict::inconclusive);  // -tol > -1 >= -10 tol
    ConvexityCertificate tight = certify(f, ConvexityTarget::OC, 0.05);
    CHECK(tight.verdict == Verdict::not_convex);
    for (const auto& cert : {loose, mid, tight}) {
        CHECK(cert.min_second_difference == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(cert.witness.x == 4.0);
        CHECK(cert.witness.index == 4);
        CHECK(cert.witness.second_difference == doctest::Approx(-1.0));
        CHECK(cert.grid_points == 9);
        CHECK_FALSE(cert.seed.has_value());
    }
    CHECK(tight.to_json().find("\"seed\":null") != std::string::npos);
    CHECK(tight.to_json().find("\"verdict\":\"not_convex\"") != std::string::npos);
}

TEST_CASE("certify guards") {
    auto grid = linspace(0.0, 3.0, 4);
    std::vector<double> v = {0, 1, 4, 9};
    CHECK_THROWS_AS(certify(ConvexGridFunction(grid, v), ConvexityTarget::OC),
                    std::invalid_argument);  // needs >= 5 points
    ConvexGridFunction ok = bumped_parabola(0.0);
    CHECK_THROWS_AS(certify(ok, ConvexityTarget::OC, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(certify(ok, ConvexityTarget::OC, -1.0), std::invalid_argument);
    CHECK(certify(ok, ConvexityTarget::OC).verdict == Verdict::convex);
}

TEST_CASE("default_certificate_tol scales with the values") {
    CHECK(default_certificate_tol({0.0, 0.0}) == 1e-15);
    CHECK(default_certificate_tol({1.0, -3.0}) == doctest::Approx(3e-8));
    CHECK(default_certificate_tol({1e9}) == doctest::Approx(10.0));
}

TEST_CASE("second differences are invariant under affine shifts") {
    ConvexGridFunction f = bumped_parabola(1.5);
    std::vector<double> shifted;
    for (std::size_t i = 0; i < f.size(); ++i)
        shifted.push_back(f.values[i] + 7.5 - 3.0 * f.grid[i]);
    ConvexGridFunction g(f.grid, shifted);
    ConvexityCertificate a = certify(f, ConvexityTarget::OC, 0.5);
    ConvexityCertificate b = certify(g, ConvexityTarget::OC, 0.5);
    CHECK(b.min_second_difference ==
          doctest::Approx(a.min_second_difference).epsilon(1e-12));
    CHECK(b.witness.index == a.witness.index);
    CHECK(b.verdict == a.verdict);
}

TEST_CASE("certify_oc: the CGF of every source is ordinarily convex") {
    std::vector<RandomSource> sources = {
        RandomSource::gaussian(1.3),
        RandomSource::rademacher(),
        RandomSource::uniform_centered(1),
        RandomSource::two_sided_exponential(1),
        RandomSource::finite_atoms({-1, 0, 2}, {0.3, 0.45, 0.25}),
        RandomSource::weibull_symmetric(2, 1),  // quadrature path
    };
    for (const RandomSource& s : sources) {
        ConvexityCertificate cert = certify_oc(s);
        CHECK(cert.verdict == Verdict::convex);
        CHECK(cert.target == ConvexityTarget::OC);
        CHECK(cert.grid_points == 81);
        CHECK_FALSE(cert.seed.has_value());  // deterministic evaluation
    }
}

TEST_CASE("certify_oc: Monte Carlo runs record the seed and widen the tolerance") {
    CgfOptions opts;
    opts.method = CgfMethod::monte_carlo;
    opts.n = 200'000;
    opts.seed = 11;
    ConvexityCertificate cert = certify_oc(RandomSource::gaussian(1), {}, opts);
    CHECK(cert.verdict == Verdict::convex);
    REQUIRE(cert.seed.has_value());
    CHECK(*cert.seed == 11);
    CHECK(cert.tol > default_certificate_tol({1.0}));  // 3 sigma noise floor
}

TEST_CASE("certify_lc: LC is a class membership, not a theorem") {
    // Phi is odd for symmetric sources, so on the symmetric default window only
    // an affine Phi (gaussian: Phi = lambda/2) can certify convex. The others
    // honestly fail, which is exactly the point of the iff classification.
    ConvexityCertificate gauss = certify_lc(RandomSource::gaussian(1));
    CHECK(gauss.verdict == Verdict::convex);
    CHECK(gauss.target == ConvexityTarget::LC);
    CHECK(gauss.grid_points == 81);  // hole drops only the origin, re-pinned
    for (const RandomSource& s :
         {RandomSource::rademacher(), RandomSource::uniform_centered(1),
          RandomSource::two_sided_exponential(1)}) {
        ConvexityCertificate cert = certify_lc(s);
        CHECK(cert.verdict == Verdict::not_convex);
        CHECK(cert.target == ConvexityTarget::LC);
    }
    // On an explicit positive half-window the distinction is finer: Phi of the
    // two-sided exponential is a power series with positive coefficients
    // (convex), while ln cosh(lambda)/lambda stays concave even there.
    std::vector<double> positive = linspace(0.0, 0.8, 41);
    ConvexityCertificate tse = certify_lc(RandomSource::two_sided_exponential(1), positive);
    CHECK(tse.verdict == Verdict::convex);
    std::vector<double> positive4 = linspace(0.0, 3.2, 41);
    ConvexityCertificate rad = certify_lc(RandomSource::rademacher(), positive4);
    CHECK(rad.verdict == Verdict::not_convex);
}

TEST_CASE("classify_family_lc implements the closed-form rule") {
    struct Row {
        double m, gamma;
        LcClass want;
        bool boundary;
    };
    const Row rows[] = {
        {2.0, 0.0, LcClass::LC, false},   {1.5, -3.0, LcClass::LC, false},
        {1.0, 0.0, LcClass::LC, true},    {1.0, 1.0, LcClass::LC, false},
        {1.0, -1.0, LcClass::not_LC, false}, {0.5, 0.0, LcClass::not_LC, false},
        {3.0, -5.0, LcClass::LC, false},
    };
    for (const Row& r : rows) {
        FamilyLcResult res = classify_family_lc(r.m, r.gamma);
        CHECK(res.verdict == r.want);
        CHECK(res.boundary == r.boundary);
    }
    CHECK_THROWS_AS(classify_family_lc(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(classify_family_lc(-2.0, 0.0), std::invalid_argument);
}

TEST_CASE("lc_via_phi_over_lambda matches the classifier on the pinned pairs") {
    const double z = 10.0;
    auto grid = logspace(std::log10(2.0 * z), std::log10(1e4 * z), 200);
    const std::pair<double, double> pairs[] = {{2.0, 0.0},  {1.5, -3.0}, {1.0, 0.0},
                                               {1.0, 1.0},  {1.0, -1.0}, {0.5, 0.0},
                                               {3.0, -5.0}};
    for (auto [m, gamma] : pairs) {
        CAPTURE(m);
        CAPTURE(gamma);
        GeneratingFunction phi = GeneratingFunction::family(m, gamma, z);
        ConvexityCertificate cert = lc_via_phi_over_lambda(phi, grid);
        LcClass cls = classify_family_lc(m, gamma).verdict;
        CHECK(cert.verdict != Verdict::inconclusive);
        CHECK((cert.verdict == Verdict::convex) == (cls == LcClass::LC));
        // Witness coordinates come back in lambda, inside the caller's grid.
        CHECK(cert.witness.x >= grid.front());
        CHECK(cert.witness.x <= grid.back());
    }
}

TEST_CASE("lc_via_phi_over_lambda certifies against the reciprocal coordinate") {
    // phi = C1 sqrt(lambda): the ratio lambda^{-1/2} is convex in lambda, yet
    // the class rule says not LC. In t = 1/lambda the ratio is sqrt(t) --
    // concave -- and the certificate must follow the reciprocal reading.
    auto grid = logspace(std::log10(20.0), std::log10(1e5), 200);
    ConvexityCertificate cert =
        lc_via_phi_over_lambda(GeneratingFunction::family(0.5, 0.0, 10.0), grid);
    CHECK(cert.verdict == Verdict::not_convex);
    // And the module-docs examples.
    CHECK(lc_via_phi_over_lambda(GeneratingFunction::family(2.0, 0.0, 10.0), grid).verdict ==
          Verdict::convex);
    CHECK(lc_via_phi_over_lambda(GeneratingFunction::family(1.0, 1.0, 10.0), grid).verdict ==
          Verdict::convex);
    CHECK(lc_via_phi_over_lambda(GeneratingFunction::family(1.0, -2.0, 10.0), grid).verdict ==
          Verdict::not_convex);
    CHECK_THROWS_AS(lc_via_phi_over_lambda(GeneratingFunction::phi2(), {1, 2, 3, 4}),
                    std::invalid_argument);
    CHECK_THROWS_AS(lc_via_phi_over_lambda(GeneratingFunction::phi2(), {-1, 1, 2, 3, 4}),
                    std::invalid_argument);
}

TEST_CASE("build_ld_field: identity matrix gives v = r/2 on every ray") {
    MvModel model = MvModel::from_source(VectorSource::subgaussian(2, {1, 0, 0, 1}), {});
    auto radii = linspace(0.25, 8.0, 32);
    LdField field = build_ld_field(model, 8, radii, 50, 42);
    REQUIRE(field.rays.size() == 8);
    for (const auto& ray : field.v)
        for (std::size_t k = 0; k < radii.size(); ++k)
            CHECK(ray[k] == doctest::Approx(0.5 * radii[k]).epsilon(1e-12));
    ConvexityCertificate cert = certify_ld(field);
    CHECK(cert.verdict == Verdict::convex);
    CHECK(cert.target == ConvexityTarget::LD);
    REQUIRE(cert.seed.has_value());
    CHECK(*cert.seed == 42);
    CHECK(cert.grid_points == 8 * 32);
}

TEST_CASE("raw Euclidean v for the conditioned matrix violates midpoint convexity") {
    // B = [[2,1],[1,2]] has eigenvalues 3 and 1 (condition number 3 > 2). On
    // the unit circle v(theta) = 1 + sin(2 theta)/2 and v is 1-homogeneous, so
    // for unit vectors 24 degrees either side of the major axis:
    //   v(mid) - (v(a)+v(b))/2 = 1.5 cos 24deg - 1 - cos 48deg / 2 = +0.0357529.
    MvModel model = MvModel::from_source(VectorSource::subgaussian(2, {2, 1, 1, 2}), {});
    auto unit = [](double deg) {
        double th = deg * std::numbers::pi / 180.0;
        return std::vector<double>{std::cos(th), std::sin(th)};
    };
    std::vector<double> a = unit(21.0), b = unit(69.0);
    std::vector<double> mid = {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    CHECK(model.v(a) == doctest::Approx(1.3345653031794291).epsilon(1e-12));
    CHECK(model.v(b) == doctest::Approx(model.v(a)).epsilon(1e-12));
    CHECK(model.v(mid) == doctest::Approx(1.3703181864639014).epsilon(1e-12));
    double violation = model.v(mid) - 0.5 * (model.v(a) + model.v(b));
    CHECK(violation == doctest::Approx(0.03575288328447224).epsilon(1e-10));
    // The worst symmetric pair sits at acos(3/4) off the axis: violation 1/16.
    double ds = std::acos(0.75) * 180.0 / std::numbers::pi;
    std::vector<double> aw = unit(45.0 - ds), bw = unit(45.0 + ds);
    std::vector<double> mw = {0.5 * (aw[0] + bw[0]), 0.5 * (aw[1] + bw[1])};
    CHECK(model.v(mw) - 0.5 * (model.v(aw) + model.v(bw)) ==
          doctest::Approx(0.0625).epsilon(1e-12));
    // certify_ld sees it through the random midpoint pairs.
    LdField field = build_ld_field(model, 16, linspace(0.25, 8.0, 64), 200, 42);
    ConvexityCertificate cert = certify_ld(field);
    CHECK(cert.verdict == Verdict::not_convex);
    CHECK(cert.witness.index >= 16 * 64);  // a midpoint check, not an on-ray triple
}

TEST_CASE("whitening restores convexity for any SPD matrix") {
    MvOptions w;
    w.whiten = true;
    MvModel model = MvModel::from_source(VectorSource::subgaussian(2, {2, 1, 1, 2}), w);
    CHECK(model.whitened());
    LdField field = build_ld_field(model, 16, linspace(0.25, 8.0, 64), 200, 42);
    CHECK(field.whitened);
    ConvexityCertificate cert = certify_ld(field);
    CHECK(cert.verdict == Verdict::convex);
    CHECK(cert.min_second_difference >= -cert.tol);
}

TEST_CASE("power-law field is caught by cross-ray midpoints") {
    // v(lambda) = |lambda|^{-0.2} is convex along every ray but radially
    // symmetric decreasing, hence non-convex as a field; only the cross-ray
    // checks can see it.
    MvModel model = MvModel::power_law(0.8, 2);
    LdField field = build_ld_field(model, 16, linspace(0.25, 8.0, 64), 200, 42);
    for (const auto& ray : field.v) {
        ConvexGridFunction along(field.radii, ray);
        CHECK(convex_within(along, 1e-9));
    }
    ConvexityCertificate cert = certify_ld(field);
    CHECK(cert.verdict == Verdict::not_convex);
    CHECK(cert.witness.index >= 16 * 64);
}

TEST_CASE("certify_ld is reproducible for a fixed seed") {
    MvModel model = MvModel::from_source(VectorSource::subgaussian(2, {2, 1, 1, 2}), {});
    auto radii = linspace(0.25, 8.0, 64);
    std::string first = certify_ld(build_ld_field(model, 16, radii, 200, 7)).to_json();
    std::string second = certify_ld(build_ld_field(model, 16, radii, 200, 7)).to_json();
    CHECK(first == second);
    CHECK(first.find("\"seed\":7") != std::string::npos);
}

TEST_CASE("build_ld_field input guards") {
    MvModel model = MvModel::power_law(1.0, 2);
    CHECK_THROWS_AS(build_ld_field(model, 1, linspace(0.25, 8.0, 64), 10, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_ld_field(model, 4, linspace(0.25, 8.0, 4), 10, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_ld_field(model, 4, {-1.0, 1.0, 2.0, 3.0, 4.0}, 10, 1),
                    std::invalid_argument);
}

TEST_CASE("euclidean_v_convexity_margin encodes the condition-number-2 rule") {
    CHECK(euclidean_v_convexity_margin({1, 0, 0, 1}, 2) == doctest::Approx(0.5));
    CHECK(euclidean_v_convexity_margin({2, 1, 1, 2}, 2) == doctest::Approx(-0.5));
    // kappa = 2 exactly: margin 0 (the boundary of raw-Euclidean convexity).
    CHECK(euclidean_v_convexity_margin({2, 0, 0, 1}, 2) == doctest::Approx(0.0));
    CHECK_THROWS_AS(euclidean_v_convexity_margin({1, 2, 2, 1}, 2), std::invalid_argument);
    CHECK_THROWS_AS(euclidean_v_convexity_margin({1, 0, 0}, 2), std::invalid_argument);
}
