#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "tiltbound/csv.hpp"
#include "tiltbound/generating_function.hpp"
#include "tiltbound/grid_function.hpp"
#include "tiltbound/grids.hpp"

using namespace tiltbound;

TEST_CASE("phi2 and scaled variants evaluate and invert") {
    GeneratingFunction phi = GeneratingFunction::phi2();
    CHECK(phi(3.0) == doctest::Approx(4.5));
    CHECK(phi(-3.0) == doctest::Approx(4.5));  // even
    CHECK(phi.inverse(4.5) == doctest::Approx(3.0));
    CHECK(phi.inverse(0.0) == 0.0);
    CHECK(phi.inverse(-1.0) == 0.0);
    GeneratingFunction twice = GeneratingFunction::parse("2*phi2");
    CHECK(twice(3.0) == doctest::Approx(9.0));
    CHECK(GeneratingFunction::parse("3*phi2")(2.0) == doctest::Approx(6.0));
    CHECK_FALSE(phi.window().finite);
    CHECK_FALSE(phi.inverse_uses_envelope());
}

TEST_CASE("family evaluation matches the stitched closed form") {
    // m=2, gamma=0, Z=3: C0 = 1, so the quadratic and the tail coincide scale-wise.
    GeneratingFunction a = GeneratingFunction::family(2, 0, 3);
    CHECK(a(3.0) == doctest::Approx(9.0));
    CHECK(a(1.0) == doctest::Approx(1.0));
    CHECK(a(5.0) == doctest::Approx(25.0));
    // m=1, gamma=1, Z=e^2: phi(e^3) = e^3 * 3.
    double e2 = std::exp(2.0), e3 = std::exp(3.0);
    GeneratingFunction b = GeneratingFunction::family(1, 1, e2);
    CHECK(b(e3) == doctest::Approx(3.0 * e3).epsilon(1e-12));
    CHECK(b(e3) == doctest::Approx(60.256610769563004).epsilon(1e-9));
    // Continuity at the stitch point.
    GeneratingFunction c = GeneratingFunction::family(1.5, -1, 10, 2.0);
    CHECK(c(10.0 - 1e-9) == doctest::Approx(c(10.0 + 1e-9)).epsilon(1e-6));
}

TEST_CASE("family honors a slowly varying hook") {
    auto slow = [](double u) { return 1.0 + 1.0 / u; };  // argument is ln lambda
    GeneratingFunction f = GeneratingFunction::family(2, 1, 10, 1.0, slow);
    double z = 10, lz = std::log(z);
    double c0 = 1.0 * std::pow(z, 0.0) * lz * (1.0 + 1.0 / lz);
    CHECK(f(2.0) == doctest::Approx(c0 * 4.0));
    double x = 50, lx = std::log(x);
    CHECK(f(x) == doctest::Approx(x * x * lx * (1.0 + 1.0 / lx)));
    // Still continuous at the stitch.
    CHECK(f(z - 1e-9) == doctest::Approx(f(z + 1e-9)).epsilon(1e-6));
}

TEST_CASE("family inverse round-trips on both branches") {
    GeneratingFunction f = GeneratingFunction::family(3, 2, 10);
    for (double x : {0.5, 3.0, 9.0, 10.0, 15.0, 120.0, 4000.0}) {
        double y = f(x);
        CHECK(f.inverse(y) == doctest::Approx(x).epsilon(1e-9));
    }
}

TEST_CASE("the envelope inverse handles the post-stitch dip") {
    // gamma < 0 and m ln Z + gamma < 0: the raw tail dips below phi(Z) just
    // past the stitch before growing again.
    GeneratingFunction dip = GeneratingFunction::family(0.5, -2, 10);
    CHECK(dip.inverse_uses_envelope());
    CHECK(dip(10.5) < dip(10.0));  // the raw dip is real
    // The inverse of phi(Z) must sit at (or before) Z, not inside the dip.
    double z_level = dip(10.0);
    CHECK(dip.inverse(z_level) <= 10.0 + 1e-9);
    // Monotonicity of the inverse across the dip region.
    double last = 0.0;
    for (double y : linspace(z_level * 0.5, z_level * 3.0, 40)) {
        double x = dip.inverse(y);
        CHECK(x >= last - 1e-12);
        last = x;
    }
    // A family with m ln Z + gamma > 0 has no dip even with gamma < 0.
    CHECK_FALSE(GeneratingFunction::family(1, -1, 10).inverse_uses_envelope());
    CHECK_FALSE(GeneratingFunction::family(2, 0, 3).inverse_uses_envelope());
}

TEST_CASE("parse handles specs and rejects malformed ones") {
    CHECK(GeneratingFunction::parse("phi2").name() == "phi2");
    CHECK(GeneratingFunction::parse(" family:m=2,gamma=0,Z=5 ")(1.0) > 0);
    // Below the stitch: C0 * lambda^2 with C0 = C1 * Z^(m-2) * ln(Z).
    CHECK(GeneratingFunction::parse("family:m=1,gamma=1,Z=9,C1=2")(2.0) ==
          doctest::Approx(2.0 * std::pow(9.0, -1.0) * std::log(9.0) * 4.0));
    CHECK_THROWS_AS(GeneratingFunction::parse("nonsense"), std::invalid_argument);
    CHECK_THROWS_AS(GeneratingFunction::parse("family:m=2"), std::invalid_argument);
    CHECK_THROWS_AS(GeneratingFunction::parse("family:gamma=0"), std::invalid_argument);
    CHECK_THROWS_AS(GeneratingFunction::parse("0*phi2"), std::invalid_argument);
    // Z must exceed e for ln^gamma Z to behave.
    CHECK_THROWS_AS(GeneratingFunction::family(2, 0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(GeneratingFunction::family(-1, 0, 10), std::invalid_argument);
}

TEST_CASE("custom shapes load from CSV with an optional sidecar") {
    std::string csv_path =
        (std::filesystem::temp_directory_path() / "tiltbound_test_phi.csv").string();
    std::vector<double> grid = linspace(0.0, 4.0, 41);
    std::vector<double> values;
    for (double x : grid) values.push_back(std::abs(x * x * x) / 3.0);
    ConvexGridFunction shape(grid, values);
    shape.right_extension = Extension::plus_infinity_outside;
    atomic_write_file(csv_path, shape.to_csv());
    atomic_write_file(csv_path + ".json", shape.sidecar_json());
    GeneratingFunction phi = GeneratingFunction::parse("custom:" + csv_path);
    CHECK(phi.name() == "custom");
    CHECK(phi(2.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-3));
    CHECK(phi(-2.0) == doctest::Approx(phi(2.0)));  // symmetrized
    // plus_infinity_outside on the right makes the window finite.
    KramerWindow w = phi.window();
    CHECK(w.finite);
    CHECK(w.lambda0 == doctest::Approx(4.0));
    CHECK_THROWS_AS(phi(4.5), std::domain_error);
    CHECK(phi.inverse(8.0 / 3.0) == doctest::Approx(2.0).epsilon(1e-3));
    std::remove(csv_path.c_str());
    std::remove((csv_path + ".json").c_str());
}

TEST_CASE("sample_shape tabulates the function with hard domain edges") {
    GeneratingFunction f = GeneratingFunction::family(2, 0, 3);
    auto grid = linspace(-5.0, 5.0, 101);
    ConvexGridFunction shape = f.sample_shape(grid);
    REQUIRE(shape.grid.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(shape.values[i] == doctest::Approx(f(grid[i])));
    CHECK(shape.left_extension == Extension::plus_infinity_outside);
    CHECK(shape.right_extension == Extension::plus_infinity_outside);
}

TEST_CASE("inverse tolerance is tight") {
    GeneratingFunction f = GeneratingFunction::family(1.2, 0.5, 10);
    for (double y : {0.01, 1.0, 7.7, 300.0, 1e6}) {
        double x = f.inverse(y);
        if (x > 0) CHECK(f(x) == doctest::Approx(y).epsilon(1e-9));
    }
}
