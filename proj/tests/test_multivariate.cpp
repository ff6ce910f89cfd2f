#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "tiltbound/multivariate.hpp"
#include "tiltbound/random_source.hpp"

using namespace tiltbound;

TEST_CASE("subgaussian model: log_q is the exact quadratic form") {
    VectorSource src = VectorSource::subgaussian(2, {2, 1, 1, 2});
    MvModel model = MvModel::from_source(src, {});
    CHECK(model.dim() == 2);
    CHECK_FALSE(model.sampled());
    CHECK(model.log_q({1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(model.log_q({1.0, 1.0}) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(model.log_q({0.5, -0.5}) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(model.log_q_standard_error({1.0, 1.0}) == 0.0);
    CHECK(model.v({0.0, 0.0}) == 0.0);
    // v = log_q / |lambda|: at (1,1) that is 3 / sqrt(2).
    CHECK(model.v({1.0, 1.0}) == doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(model.log_q({1.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("whitened model divides by the B-norm") {
    MvOptions w;
    w.whiten = true;
    MvModel model = MvModel::from_source(VectorSource::subgaussian(2, {2, 1, 1, 2}), w);
    CHECK(model.whitened());
    // v = (1/2) |lambda|_B: at (1,1), |lambda|_B = sqrt(6).
    CHECK(model.v({1.0, 1.0}) == doctest::Approx(0.5 * std::sqrt(6.0)).epsilon(1e-12));
    CHECK(model.v({2.0, 2.0}) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-12));
    CHECK(model.v({0.0, 0.0}) == 0.0);
}

TEST_CASE("power-law model") {
    MvModel model = MvModel::power_law(0.8, 3);
    CHECK(model.dim() == 3);
    CHECK(model.log_q({2.0, 0.0, 0.0}) == doctest::Approx(std::pow(2.0, 0.8)).epsilon(1e-14));
    CHECK(model.v({2.0, 0.0, 0.0}) == doctest::Approx(std::pow(2.0, -0.2)).epsilon(1e-14));
    CHECK(model.log_q_standard_error({1.0, 1.0, 1.0}) == 0.0);
    CHECK_THROWS_AS(MvModel::power_law(0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(MvModel::power_law(-1.0, 2), std::invalid_argument);
}

TEST_CASE("product_of model: sampled log_q tracks the independent closed form") {
    VectorSource src = VectorSource::product_of(
        {RandomSource::gaussian(1), RandomSource::gaussian(2)});
    MvOptions opts;
    opts.n = 200'000;
    opts.seed = 5;
    MvModel model = MvModel::from_source(src, opts);
    CHECK(model.sampled());
    for (auto [l1, l2] : {std::pair{0.5, 0.25}, std::pair{-0.3, 0.2}, std::pair{0.8, 0.0}}) {
        double truth = 0.5 * l1 * l1 + 2.0 * l2 * l2;
        double se = model.log_q_standard_error({l1, l2});
        CHECK(se > 0.0);
        CHECK(std::abs(model.log_q({l1, l2}) - truth) <= 6.0 * se + 1e-3);
    }
    MvOptions tiny;
    tiny.n = 100;
    CHECK_THROWS_AS(MvModel::from_source(src, tiny), std::invalid_argument);
}

TEST_CASE("product_of covariance is diagonal in the component variances") {
    VectorSource src = VectorSource::product_of(
        {RandomSource::gaussian(1), RandomSource::gaussian(2)});
    auto cov = src.covariance();
    REQUIRE(cov.size() == 4);
    CHECK(cov[0] == doctest::Approx(1.0));
    CHECK(cov[1] == doctest::Approx(0.0));
    CHECK(cov[2] == doctest::Approx(0.0));
    CHECK(cov[3] == doctest::Approx(4.0));
}

TEST_CASE("vector source JSON: parse and structured error") {
    VectorSource src = VectorSource::from_json(
        R"({"kind":"subgaussian_matrix","B":[[2,1],[1,2]]})");
    CHECK(src.dim() == 2);
    CHECK(src.covariance() == std::vector<double>{2, 1, 1, 2});
    bool caught = false;
    try {
        VectorSource::from_json(R"({"kind":"subgaussian_matrix","b":[[1,0],[0,1]]})");
    } catch (const std::runtime_error& e) {
        caught = true;
        CHECK(std::string(e.what()).find("vector source JSON field error") != std::string::npos);
    }
    CHECK(caught);
    CHECK_THROWS_AS(VectorSource::from_json(R"({"kind":"banana"})"), std::runtime_error);
}

TEST_CASE("ray_grid walks ray-major") {
    auto rays = unit_circle_rays(4);
    REQUIRE(rays.size() == 4);
    CHECK(rays[0][0] == doctest::Approx(1.0));
    CHECK(rays[0][1] == doctest::Approx(0.0).scale(1.0));
    CHECK(rays[1][0] == doctest::Approx(0.0).scale(1.0));
    CHECK(rays[1][1] == doctest::Approx(1.0));
    auto points = ray_grid(rays, {1.0, 2.0});
    REQUIRE(points.size() == 8);
    CHECK(points[0] == std::vector<double>{rays[0][0], rays[0][1]});
    CHECK(points[1][0] == doctest::Approx(2.0 * rays[0][0]));
    CHECK(points[2][0] == doctest::Approx(rays[1][0]).scale(1.0));
    CHECK(points[3][1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(unit_circle_rays(0), std::invalid_argument);
}

TEST_CASE("evaluate_multivariate fills the table and its CSV schema") {
    MvModel model = MvModel::from_source(VectorSource::subgaussian(2, {1, 0, 0, 1}), {});
    auto points = ray_grid(unit_circle_rays(2), {1.0, 2.0, 3.0});
    MultivariateMgf mv = evaluate_multivariate(model, points);
    CHECK(mv.dim == 2);
    REQUIRE(mv.points.size() == 6);
    for (std::size_t i = 0; i < mv.points.size(); ++i) {
        double r2 = mv.points[i][0] * mv.points[i][0] + mv.points[i][1] * mv.points[i][1];
        CHECK(mv.log_q[i] == doctest::Approx(0.5 * r2).epsilon(1e-12));
        CHECK(mv.v[i] == doctest::Approx(0.5 * std::sqrt(r2)).epsilon(1e-12));
    }
    std::string csv = mv.to_csv();
    CHECK(csv.rfind("lambda_1,lambda_2,log_q,v\n", 0) == 0);
    CHECK_FALSE(mv.whitened);
}

TEST_CASE("vector sampling is deterministic") {
    VectorSource src = VectorSource::subgaussian(2, {2, 1, 1, 2});
    auto a = src.sample(5000, 9);
    auto b = src.sample(5000, 9);
    CHECK(a == b);
    CHECK(a.size() == 10000);
    CHECK(a != src.sample(5000, 10));
}
