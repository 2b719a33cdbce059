#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "eisp/forward.hpp"
#include "eisp/inversion.hpp"
#include "eisp/neural.hpp"
#include "eisp/special.hpp"

using namespace eisp;

namespace {

const PhysicsConfig physics;

SensorLayout layout(int n_tx) { return circle_layout(n_tx, 32, 3.0, IncidentModel::LineSource); }

Scene disc(int cells, double radius, double eps) {
    const auto grid = make_grid(2.0, cells);
    RVector e = RVector::Ones(grid.cell_count());
    for (int i = 0; i < grid.cell_count(); ++i)
        if (std::hypot(grid.center(i).x, grid.center(i).y) < radius) e[i] = eps;
    return {grid, e};
}

CVector random_vector(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    CVector v(n);
    for (auto& x : v) x = {d(rng), d(rng)};
    return v;
}

void BM_Hankel(benchmark::State& state) {
    double x = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(special::hankel1_0(x));
        x = x < 40.0 ? x * 1.01 : 0.01;
    }
}
BENCHMARK(BM_Hankel);

void BM_BesselJ1(benchmark::State& state) {
    double x = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(special::bessel_j1(x));
        x = x < 40.0 ? x * 1.01 : 0.01;
    }
}
BENCHMARK(BM_BesselJ1);

void BM_GreenAssembly(benchmark::State& state) {
    const auto grid = make_grid(2.0, static_cast<int>(state.range(0)));
    const auto lay = layout(16);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_green(grid, lay, physics));
}
BENCHMARK(BM_GreenAssembly)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_DomainProductFft(benchmark::State& state) {
    const auto grid = make_grid(2.0, static_cast<int>(state.range(0)));
    const auto ops = assemble_green(grid, layout(1), physics);
    const CVector x = random_vector(grid.cell_count(), 1);
    for (auto _ : state) benchmark::DoNotOptimize(ops.apply_domain(x));
}
BENCHMARK(BM_DomainProductFft)->Arg(16)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_DomainProductDense(benchmark::State& state) {
    const auto grid = make_grid(2.0, static_cast<int>(state.range(0)));
    const auto ops = assemble_green(grid, layout(1), physics);
    const CMatrix dense = ops.domain_dense();
    const CVector x = random_vector(grid.cell_count(), 1);
    CVector y(grid.cell_count());
    for (auto _ : state) {
        y.noalias() = dense * x;
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_DomainProductDense)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_ForwardSolve(benchmark::State& state) {
    const auto scene = disc(static_cast<int>(state.range(0)), 0.5, 1.5);
    const auto ops = assemble_green(scene.grid(), layout(4), physics);
    for (auto _ : state) benchmark::DoNotOptimize(forward_solve(scene, ops, physics));
}
BENCHMARK(BM_ForwardSolve)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ForwardSolveIterative(benchmark::State& state) {
    const auto scene = disc(static_cast<int>(state.range(0)), 0.5, 1.5);
    const auto ops = assemble_green(scene.grid(), layout(4), physics);
    SolveOptions opt;
    opt.method = SolveMethod::Iterative;
    for (auto _ : state) benchmark::DoNotOptimize(forward_solve(scene, ops, physics, opt));
}
BENCHMARK(BM_ForwardSolveIterative)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

// Full-size estimator network evaluated on every cell of a 32 x 32 grid.
struct NetFixture {
    DenseNet net;
    RMatrix scene;
    RMatrix points;
    RMatrix upstream;

    NetFixture(int width, int layers) {
        EstimatorConfig c;
        c.hidden_width = width;
        c.hidden_layers = layers;
        net = make_dense_net(estimator_widths(c), 1.0, 3);
        for (auto& p : net.parameters()) p += 0.01;
        scene = RMatrix::Random(2 * c.n_receivers, 1);
        points = encode_grid(make_grid(2.0, 32), c.encoding);
        upstream = RMatrix::Random(2, points.cols());
    }
};

void BM_NetForward(benchmark::State& state) {
    const NetFixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(net_forward_factored(f.net, f.scene, f.points));
}
BENCHMARK(BM_NetForward)->Args({64, 3})->Args({256, 7})->Unit(benchmark::kMillisecond);

void BM_NetForwardBackward(benchmark::State& state) {
    const NetFixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        ForwardContext ctx;
        (void)net_forward_factored(f.net, f.scene, f.points, &ctx);
        benchmark::DoNotOptimize(net_backward(f.net, ctx, f.upstream));
    }
}
BENCHMARK(BM_NetForwardBackward)->Args({64, 3})->Args({256, 7})->Unit(benchmark::kMillisecond);

void BM_PermittivitySolve(benchmark::State& state) {
    const auto scene = disc(static_cast<int>(state.range(0)), 0.5, 1.5);
    const auto ops = assemble_green(scene.grid(), layout(1), physics);
    const auto b = forward_solve(scene, ops, physics);
    const CVector j = b.current.row(0).transpose();
    const CVector ei = b.incident.row(0).transpose();
    for (auto _ : state) benchmark::DoNotOptimize(solve_permittivity(j, ei, ops));
}
BENCHMARK(BM_PermittivitySolve)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
