// Microbenchmarks for the hot paths: banded solves, Crank-Nicolson stepping,
// Monte-Carlo batches and the 2-D ADI sweep.
#include <benchmark/benchmark.h>

#include <complex>

#include "qmart/banded.hpp"
#include "qmart/evolution.hpp"
#include "qmart/evolution2d.hpp"
#include "qmart/feynman_kac.hpp"
#include "qmart/kernels.hpp"
#include "qmart/martingale.hpp"

using namespace qmart;

static void BM_BandedLUSolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Banded<double> m(n, 1);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 4.0;
        if (i > 0) m(i, i - 1) = -1.0;
        if (i < n - 1) m(i, i + 1) = -1.0;
    }
    BandedLU<double> lu(m);
    std::vector<double> rhs(n, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(lu.solve(rhs));
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_BandedLUSolve)->Arg(1024)->Arg(4096)->Arg(16384);

static void BM_CrankNicolsonStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const bool unitary = state.range(1) != 0;
    const Grid g = centered_grid(0.0, 6.0, n);
    auto h = build_gaussian_hamiltonian(g, 0.2, PotentialSpec::constant(0.005));
    WaveFunction psi = heat_kernel_state(g, 0.05, 0.2);
    const EvolutionConfig cfg{1e-3, 1,
                              unitary ? EvolutionMode::unitary : EvolutionMode::diffusive};
    for (auto _ : state) benchmark::DoNotOptimize(evolve(psi, h, cfg));
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_CrankNicolsonStep)->Args({2048, 0})->Args({8192, 0})->Args({2048, 1});

static void BM_McBatch(benchmark::State& state) {
    McConfig cfg;
    cfg.n_paths = state.range(0);
    cfg.seed = 1;
    auto payout = [](double x) { return std::exp(x / 2.0); };
    const auto c = PotentialSpec::constant(0.005);
    for (auto _ : state) benchmark::DoNotOptimize(mc_price(payout, c, cfg));
    state.SetItemsProcessed(state.iterations() * cfg.n_paths * cfg.n_steps);
}
BENCHMARK(BM_McBatch)->Arg(1000)->Arg(10000);

static void BM_AdiStep2D(benchmark::State& state) {
    const int nx = static_cast<int>(state.range(0)), ny = nx / 2;
    const Grid2D g{centered_grid(0.0, 6.0, nx), centered_grid(0.0, 6.0, ny)};
    const Field2D c = calibrate_potential_2d(0.2, 0.2, DiscountFactorModel{0.1}, g);
    Field2D psi = Field2D::from_function(g, [](double x, double y) {
        return heat_kernel(x, 0.05, 0.2) * heat_kernel(y, 0.05, 0.2);
    });
    for (auto _ : state)
        benchmark::DoNotOptimize(evolve_diffusive_2d(psi, 0.2, 0.2, c, 1e-3, 1));
    state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_AdiStep2D)->Arg(256)->Arg(512);

BENCHMARK_MAIN();
