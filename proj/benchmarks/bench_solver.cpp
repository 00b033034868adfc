#include <benchmark/benchmark.h>

#include "frame/evalsim.hpp"
#include "frame/solver.hpp"
#include "frame/tuning.hpp"

using namespace frame;

namespace {

SimOutput bench_sim(int n) {
    SimConfig cfg;
    cfg.n = n;
    cfg.n_test = 0;
    cfg.seed = 42;
    return generate(cfg);
}

void bm_fitter_build(benchmark::State& state) {
    const SimOutput sim = bench_sim(static_cast<int>(state.range(0)));
    const Dataset centered = center(sim.train);
    const BasisConfig bases;
    for (auto _ : state) {
        FrameFitter fitter(centered, bases);
        benchmark::DoNotOptimize(fitter.lambda_max());
    }
}
BENCHMARK(bm_fitter_build)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void bm_block_sweep(benchmark::State& state) {
    const SimOutput sim = bench_sim(200);
    const Dataset centered = center(sim.train);
    FrameFitter fitter(centered, BasisConfig{});
    const double lambda = 0.2 * fitter.lambda_max();
    const Eigen::VectorXd le = Eigen::VectorXd::Constant(fitter.p() + fitter.q(), lambda);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fitter.block_sweep(le));
    }
}
BENCHMARK(bm_block_sweep)->Unit(benchmark::kMillisecond);

void bm_full_fit(benchmark::State& state) {
    const SimOutput sim = bench_sim(100);
    FitConfig fc;
    FrameFitter probe(center(sim.train), fc.bases);
    fc.lambda = 0.2 * probe.lambda_max();
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit(sim.train, fc));
    }
}
BENCHMARK(bm_full_fit)->Unit(benchmark::kMillisecond);

void bm_lambda_path(benchmark::State& state) {
    const SimOutput sim = bench_sim(100);
    const Dataset centered = center(sim.train);
    for (auto _ : state) {
        FrameFitter fitter(centered, BasisConfig{});
        const Eigen::VectorXd grid = lambda_grid(fitter.lambda_max(), 20, 1e-3);
        for (Eigen::Index g = 0; g < grid.size(); ++g) {
            const Eigen::VectorXd le =
                Eigen::VectorXd::Constant(fitter.p() + fitter.q(), grid[g]);
            fitter.sweeps_to_convergence(le, 500, 1e-7);
        }
        benchmark::DoNotOptimize(fitter.alpha());
    }
}
BENCHMARK(bm_lambda_path)->Unit(benchmark::kMillisecond);

void bm_predict_matrix(benchmark::State& state) {
    const SimOutput sim = bench_sim(100);
    FitConfig fc;
    FrameFitter probe(center(sim.train), fc.bases);
    fc.lambda = 0.05 * probe.lambda_max();
    const FrameModel model = fit(sim.train, fc).first;
    for (auto _ : state) {
        benchmark::DoNotOptimize(predict_matrix(model, sim.train));
    }
}
BENCHMARK(bm_predict_matrix)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
