#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "tiltbound/cgf.hpp"
#include "tiltbound/convexity.hpp"
#include "tiltbound/generating_function.hpp"
#include "tiltbound/gls.hpp"
#include "tiltbound/grids.hpp"
#include "tiltbound/legendre.hpp"
#include "tiltbound/multivariate.hpp"
#include "tiltbound/random_source.hpp"

namespace {

using namespace tiltbound;

void BM_conjugate(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto grid = linspace(-6.0, 6.0, n);
    std::vector<double> values;
    values.reserve(n);
    for (double x : grid) values.push_back(0.5 * x * x + std::abs(x));
    ConvexGridFunction f(grid, values);
    auto out = linspace(-5.0, 5.0, n);
    for (auto _ : state) benchmark::DoNotOptimize(conjugate(f, out));
    state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_conjugate)->Arg(1000)->Arg(10000)->Arg(100000)->Complexity();

void BM_cgf_quadrature_weibull(benchmark::State& state) {
    RandomSource w = RandomSource::weibull_symmetric(3, 1);
    auto grid = linspace(-3.0, 3.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_cgf(w, grid, {}));
}
BENCHMARK(BM_cgf_quadrature_weibull)->Arg(81);

void BM_bphi_norm(benchmark::State& state) {
    RandomSource g = RandomSource::gaussian(1);
    GeneratingFunction phi = GeneratingFunction::phi2();
    auto grid = default_norm_grid(g);
    for (auto _ : state) benchmark::DoNotOptimize(bphi_norm(g, phi, grid));
}
BENCHMARK(BM_bphi_norm);

void BM_sample(benchmark::State& state) {
    RandomSource g = RandomSource::gaussian(1);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(g.sample(n, 42));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(n));
}
BENCHMARK(BM_sample)->Arg(1 << 16)->Arg(1 << 20);

void BM_tilted_variance(benchmark::State& state) {
    RandomSource w = RandomSource::weibull_symmetric(2, 1);
    PolynomialTau tau = PolynomialTau::identity();
    for (auto _ : state) {
        TiltedMeasure tilt(w, 1.25);
        benchmark::DoNotOptimize(tilt.variance(tau));
    }
}
BENCHMARK(BM_tilted_variance);

void BM_certify_ld(benchmark::State& state) {
    MvModel model =
        MvModel::from_source(VectorSource::subgaussian(2, {2, 1, 1, 2}), MvOptions{});
    auto radii = linspace(0.25, 8.0, 64);
    for (auto _ : state) {
        LdField field = build_ld_field(model, 16, radii, 200, 42);
        benchmark::DoNotOptimize(certify_ld(field));
    }
}
BENCHMARK(BM_certify_ld);

void BM_mgf_bound_search(benchmark::State& state) {
    TailModel tail = TailModel::weibull(2, 0.5);
    GeneratingFunction phi = GeneratingFunction::phi2();
    auto grid = linspace(0.25, 4.0, 16);
    for (auto _ : state) benchmark::DoNotOptimize(mgf_bound_from_tail(tail, phi, grid));
}
BENCHMARK(BM_mgf_bound_search);

}  // namespace

BENCHMARK_MAIN();
