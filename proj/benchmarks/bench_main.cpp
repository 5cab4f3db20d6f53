#include <benchmark/benchmark.h>

#include "ctqw/bessel.hpp"
#include "ctqw/graph.hpp"
#include "ctqw/polya.hpp"
#include "ctqw/spectral.hpp"

using namespace ctqw;

static void BM_BesselJ0(benchmark::State& state)
{
    const double x = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bessel_j(0, x));
}
BENCHMARK(BM_BesselJ0)->Arg(1)->Arg(10)->Arg(40)->Arg(200);

static void BM_BesselSequence(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(bessel_j_sequence(64, 150.0));
}
BENCHMARK(BM_BesselSequence);

static void BM_SpectralDecompose(benchmark::State& state)
{
    const auto h = build_hamiltonian(GraphSpec::cycle(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(spectral_decompose(h));
}
BENCHMARK(BM_SpectralDecompose)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_SpectralP0(benchmark::State& state)
{
    const auto form = spectral_decompose(build_hamiltonian(GraphSpec::torus(2, 16)));
    double t = 0.0;
    for (auto _ : state) benchmark::DoNotOptimize(form.return_probability(t += 0.01));
}
BENCHMARK(BM_SpectralP0);

static void BM_MonteCarlo(benchmark::State& state)
{
    for (auto _ : state) {
        benchmark::DoNotOptimize(monte_carlo_expectation(LatticeBessel{3}, PoissonLaw{1.0}, 3, 100000, 42, {1}));
    }
    state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_MonteCarlo)->Unit(benchmark::kMillisecond);

static void BM_Quadrature(benchmark::State& state)
{
    const int nodes = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(quadrature_expectation(LatticeBessel{3}, 1.0, 3, nodes, {1}));
}
BENCHMARK(BM_Quadrature)->Arg(32)->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);

static void BM_DivergenceDiagnostic(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(divergence_diagnostic(LineBessel{}, PoissonLaw{1.0}, 100000, 42));
}
BENCHMARK(BM_DivergenceDiagnostic)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
