#include <benchmark/benchmark.h>

#include <cmath>
#include <map>
#include <memory>

#include "qgpatch/bifurcation.hpp"
#include "qgpatch/nonlinear.hpp"
#include "qgpatch/specfun.hpp"

using namespace qgpatch;

namespace {

const kernels::KernelContext& ctx() {
    static const auto c = kernels::make_context(profiles::make_ellipsoid_sphere_config(1.5, 2.0, 1.0));
    return c;
}

const spectral::SpectralProblem& problem(int N) {
    static std::map<int, std::unique_ptr<spectral::SpectralProblem>> cache;
    auto& p = cache[N];
    if (!p) p = std::make_unique<spectral::SpectralProblem>(ctx(), N);
    return *p;
}

void BM_hyp_Fn(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    double x = 0.1;
    for (auto _ : st) {
        benchmark::DoNotOptimize(specfun::hyp_Fn(n, x));
        x = x < 0.99 ? x + 0.01 : 0.1;
    }
}
BENCHMARK(BM_hyp_Fn)->Arg(1)->Arg(10)->Arg(40);

void BM_H_n(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::H_n(ctx(), 1, 2, n, 1.0, 1.3));
}
BENCHMARK(BM_H_n)->Arg(2)->Arg(20);

void BM_build_kernel_matrices(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    const auto grid = spectral::build_grid(N);
    const auto nodes = std::make_shared<const spectral::NodeData>(spectral::compute_node_data(ctx(), grid));
    for (auto _ : st) benchmark::DoNotOptimize(spectral::build_kernel_matrices(5, ctx(), grid, nodes));
}
BENCHMARK(BM_build_kernel_matrices)->Arg(64)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_eigensolve(benchmark::State& st) {
    const auto& P = problem(static_cast<int>(st.range(0)));
    const auto op = P.assemble(5, P.window().mid());
    for (auto _ : st) benchmark::DoNotOptimize(spectral::largest_eigenpair(op));
}
BENCHMARK(BM_eigensolve)->Arg(64)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_find_omega_m(benchmark::State& st) {
    const auto& P = problem(160);
    P.matrices(5);
    for (auto _ : st) benchmark::DoNotOptimize(bifurcation::find_omega_m(5, P));
}
BENCHMARK(BM_find_omega_m)->Unit(benchmark::kMillisecond);

void BM_functional_Ftilde(benchmark::State& st) {
    const auto grid = std::make_shared<const spectral::QuadratureGrid>(spectral::build_grid(static_cast<int>(st.range(0))));
    nonlinear::SurfacePerturbation f(grid, 3);
    std::vector<double> v(grid->size());
    for (int k = 0; k < grid->size(); ++k) v[k] = 0.01 * std::pow(std::sin(grid->nodes[k]), 3);
    f.set_mode(1, 3, v);
    for (auto _ : st) benchmark::DoNotOptimize(nonlinear::functional_Ftilde(0.2, f, ctx().config));
}
BENCHMARK(BM_functional_Ftilde)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
