#include <random>

#include <benchmark/benchmark.h>

#include "dphase/energy.hpp"
#include "dphase/orlicz.hpp"
#include "dphase/solver.hpp"

namespace {

using namespace dphase;

ScalarField random_field(const Mesh& mesh, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> values(mesh.nodeCount());
    for (double& v : values) v = unif(rng);
    return project_mean_zero(mesh, ScalarField(mesh, std::move(values)));
}

void bench_energy_2d(benchmark::State& state) {
    Mesh mesh = build_unit_square_mesh(static_cast<int>(state.range(0)));
    WeightField a = WeightField::constant(mesh, 1.0);
    ExponentPair pq(1.5, 1.9, mesh.dim);
    BoundaryData g = BoundaryData::constant(mesh, 0.0);
    ScalarField u = random_field(mesh, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(approx_energy(mesh, a, pq, g, u, 1e-4));
}
BENCHMARK(bench_energy_2d)->Arg(8)->Arg(16)->Arg(32);

void bench_gradient_2d(benchmark::State& state) {
    Mesh mesh = build_unit_square_mesh(static_cast<int>(state.range(0)));
    WeightField a = WeightField::constant(mesh, 1.0);
    ExponentPair pq(1.5, 1.9, mesh.dim);
    BoundaryData g = BoundaryData::constant(mesh, 0.0);
    ScalarField u = random_field(mesh, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(approx_gradient(mesh, a, pq, g, u, 1e-4));
}
BENCHMARK(bench_gradient_2d)->Arg(8)->Arg(16)->Arg(32);

void bench_luxemburg(benchmark::State& state) {
    Mesh mesh = build_unit_square_mesh(static_cast<int>(state.range(0)));
    WeightField a = WeightField::constant(mesh, 0.5);
    ExponentPair pq(1.5, 2.0, mesh.dim);
    ScalarField u = random_field(mesh, 11);
    auto grads = gradient_operator(mesh, u);
    for (auto _ : state)
        benchmark::DoNotOptimize(luxemburg_norm(mesh, a, pq, grads));
}
BENCHMARK(bench_luxemburg)->Arg(16)->Arg(64);

void bench_solve_1d(benchmark::State& state) {
    Mesh mesh = build_interval_mesh(static_cast<int>(state.range(0)));
    WeightField a = WeightField::constant(mesh, 1.0);
    ExponentPair pq(1.5, 1.9, mesh.dim);
    std::vector<double> gv(mesh.boundaryFacets.size());
    for (size_t f = 0; f < gv.size(); ++f)
        gv[f] = mesh.boundaryFacets[f].normal.x < 0.0 ? -0.06 : 0.06;
    BoundaryData g(mesh, std::move(gv));
    for (auto _ : state)
        benchmark::DoNotOptimize(minimize_approx(mesh, a, pq, g, SolveOptions{}));
}
BENCHMARK(bench_solve_1d)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
