#include <gtest/gtest.h>

#include <random>

#include "eisp/forward.hpp"
#include "eisp/mie.hpp"
#include "eisp/special.hpp"

using namespace eisp;

namespace {

Scene disc(int cells, double radius, double eps, Point2 c = {0.0, 0.0}) {
    const auto grid = make_grid(2.0, cells);
    RVector e = RVector::Ones(grid.cell_count());
    for (int i = 0; i < grid.cell_count(); ++i)
        if (distance(grid.center(i), c) < radius) e[i] = eps;
    return {grid, e};
}

Scene random_scene(int cells, std::uint64_t seed, double eps_max = 1.5) {
    const auto grid = make_grid(2.0, cells);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(1.0, eps_max);
    std::bernoulli_distribution on(0.4);
    RVector e = RVector::Ones(grid.cell_count());
    for (auto& v : e)
        if (on(rng)) v = u(rng);
    return {grid, e};
}

double mie_error(int cells, const GreenOptions& gopt = {}) {
    const PhysicsConfig phys;
    const auto layout = circle_layout(16, 32, 3.0, IncidentModel::LineSource);
    const auto scene = disc(cells, 0.5, 1.5);
    const auto ops = assemble_green(scene.grid(), layout, phys, gopt);
    const auto bundle = forward_solve(scene, ops, phys);
    double num = 0.0, den = 0.0;
    for (int t = 0; t < 16; ++t) {
        const CVector ref = mie_cylinder(0.5, 1.5, phys, layout, t).values;
        num += (bundle.scattered.row(t).transpose() - ref).squaredNorm();
        den += ref.squaredNorm();
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST(IncidentField, LineSourceMagnitudeAtThreeMetres) {
    const PhysicsConfig phys;
    const auto grid = make_grid(2.0, 3);  // center cell sits at the origin
    const auto layout = circle_layout(1, 4, 3.0, IncidentModel::LineSource);
    const auto f = incident_field(layout, grid, phys, 0);
    const double z = phys.wavenumber() * 3.0;
    const double asymptotic = std::sqrt(2.0 / (std::numbers::pi * z)) / 4.0;
    EXPECT_NEAR(std::abs(f.values[4]), asymptotic, 0.005 * asymptotic);
    const cplx exact = cplx(0.0, 0.25) * cplx(std::cyl_bessel_j(0.0, z), std::cyl_neumann(0.0, z));
    EXPECT_LT(std::abs(f.values[4] - exact), 1e-13);
    EXPECT_EQ(f.role, FieldRole::Incident);
}

TEST(IncidentField, PlaneWaveHasUnitMagnitudeAndTravelsInward) {
    const PhysicsConfig phys;
    const auto grid = make_grid(2.0, 3);
    const auto layout = circle_layout(1, 4, 3.0, IncidentModel::PlaneWave);
    const auto f = incident_field(layout, grid, phys, 0);
    for (auto v : f.values) EXPECT_NEAR(std::abs(v), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(f.values[4] - cplx(1.0, 0.0)), 0.0, 1e-14);
    // transmitter on +x: wave propagates toward -x, phase exp(-i k0 x)
    const double x = grid.center(5).x;
    EXPECT_LT(std::abs(f.values[5] - std::exp(cplx(0.0, -phys.wavenumber() * x))), 1e-14);
}

TEST(ForwardSolve, VacuumProducesNoScattering) {
    const PhysicsConfig phys;
    const auto layout = circle_layout(4, 8, 3.0, IncidentModel::LineSource);
    const auto scene = uniform_scene(make_grid(2.0, 16), 1.0);
    const auto ops = assemble_green(scene.grid(), layout, phys);
    const auto b = forward_solve(scene, ops, phys);
    EXPECT_EQ(b.scattered.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(b.current.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((b.total - b.incident).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ForwardSolve, MatchesMieSeriesAtSixtyFour) { EXPECT_LT(mie_error(64), 0.03); }

TEST(ForwardSolve, RefinementReducesMieError) {
    const double e16 = mie_error(16), e32 = mie_error(32), e64 = mie_error(64);
    EXPECT_GT(e16, e32);
    EXPECT_GT(e32, e64);
}

TEST(ForwardSolve, FlippedSelfTermIsWrong) {
    GreenOptions bad;
    bad.flip_self_term_sign = true;
    EXPECT_GT(mie_error(32, bad), 0.2);
}

TEST(ForwardSolve, SmallContrastApproachesBorn) {
    const PhysicsConfig phys;
    const auto layout = circle_layout(4, 16, 3.0, IncidentModel::LineSource);
    const auto scene = disc(32, 0.4, 1.001);
    const auto ops = assemble_green(scene.grid(), layout, phys);
    const auto b = forward_solve(scene, ops, phys);
    const RVector xi = scene.contrast();
    for (int t = 0; t < 4; ++t) {
        const CVector born = ops.measure_op() * (xi.cast<cplx>().cwiseProduct(b.incident.row(t).transpose()));
        const CVector es = b.scattered.row(t).transpose();
        EXPECT_LT((es - born).norm() / es.norm(), 1e-2);
    }
}

TEST(ForwardSolve, ResidualsAreTight) {
    const PhysicsConfig phys;
    const auto layout = circle_layout(4, 16, 3.0, IncidentModel::LineSource);
    const auto scene = random_scene(24, 1);
    const auto ops = assemble_green(scene.grid(), layout, phys);
    for (auto method : {SolveMethod::Direct, SolveMethod::Iterative}) {
        SolveOptions o;
        o.method = method;
        const auto b = forward_solve(scene, ops, phys, o);
        const auto r = bundle_residuals(b, scene, ops);
        EXPECT_LT(r.state, method == SolveMethod::Direct ? 1e-10 : 1e-8);
        EXPECT_LT(r.polarization, 1e-14);
        EXPECT_LT(r.data, 1e-14);
        EXPECT_LT(b.max_residual, method == SolveMethod::Direct ? 1e-10 : 1e-8);
    }
}

TEST(ForwardSolve, DirectAndIterativeAgree) {
    const PhysicsConfig phys;
    const auto layout = circle_layout(4, 16, 3.0, IncidentModel::PlaneWave);
    const auto scene = random_scene(20, 2, 2.0);
    const auto ops = assemble_green(scene.grid(), layout, phys);
    SolveOptions d, it;
    d.method = SolveMethod::Direct;
    it.method = SolveMethod::Iterative;
    const auto a = forward_solve(scene, ops, phys, d);
    const auto b = forward_solve(scene, ops, phys, it);
    EXPECT_LT((a.scattered - b.scattered).norm() / a.scattered.norm(), 1e-7);
    EXPECT_LT((a.total - b.total).norm() / a.total.norm(), 1e-7);
}

TEST(ForwardSolve, ThreadCountDoesNotChangeResult) {
    const PhysicsConfig phys;
    const auto layout = circle_layout(4, 8, 3.0, IncidentModel::LineSource);
    const auto scene = random_scene(16, 3);
    const auto ops = assemble_green(scene.grid(), layout, phys);
    for (auto method : {SolveMethod::Direct, SolveMethod::Iterative}) {
        SolveOptions one, two;
        one.method = two.method = method;
        two.threads = 3;
        const auto a = forward_solve(scene, ops, phys, one);
        const auto b = forward_solve(scene, ops, phys, two);
        EXPECT_EQ(a.scattered, b.scattered);
    }
}

TEST(ForwardSolve, Reciprocity) {
    const PhysicsConfig phys;
    const auto scene = random_scene(16, 4);
    const Point2 p{3.0, 0.4}, q{-1.2, 2.7};
    SensorLayout ab, ba;
    ab.transmitters = {p};
    ab.receivers = {q};
    ba.transmitters = {q};
    ba.receivers = {p};
    const auto b1 = forward_solve(scene, assemble_green(scene.grid(), ab, phys), phys);
    const auto b2 = forward_solve(scene, assemble_green(scene.grid(), ba, phys), phys);
    EXPECT_LT(std::abs(b1.scattered(0, 0) - b2.scattered(0, 0)), 1e-10 * std::abs(b1.scattered(0, 0)));
}

TEST(ForwardSolve, ScatteredEnergyGrowsWithContrast) {
    const PhysicsConfig phys;
    const auto layout = circle_layout(4, 16, 3.0, IncidentModel::LineSource);
    double prev = 0.0;
    for (double eps : {1.02, 1.05, 1.1, 1.2, 1.3}) {
        const auto scene = disc(24, 0.3, eps);
        const auto b = forward_solve(scene, assemble_green(scene.grid(), layout, phys), phys);
        const double energy = b.scattered.squaredNorm();
        EXPECT_GT(energy, prev) << eps;
        prev = energy;
    }
}

TEST(ForwardSolve, GridMismatchRejected) {
    const PhysicsConfig phys;
    const auto layout = circle_layout(1, 4, 3.0, IncidentModel::LineSource);
    const auto ops = assemble_green(make_grid(2.0, 8), layout, phys);
    EXPECT_THROW(forward_solve(uniform_scene(make_grid(2.0, 16), 1.2), ops, phys), Error);
}

TEST(ScatterFromCurrent, IsLinear) {
    const PhysicsConfig phys;
    const auto layout = circle_layout(1, 12, 3.0, IncidentModel::LineSource);
    const auto ops = assemble_green(make_grid(2.0, 8), layout, phys);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    CVector a(64), b(64);
    for (auto& v : a) v = {nd(rng), nd(rng)};
    for (auto& v : b) v = {nd(rng), nd(rng)};
    const cplx alpha{0.3, -1.7};
    const CVector lhs = scatter_from_current(CVector(alpha * a + b), ops);
    const CVector rhs = alpha * scatter_from_current(a, ops) + scatter_from_current(b, ops);
    EXPECT_LT((lhs - rhs).norm() / rhs.norm(), 1e-13);
    ComplexField f{a, FieldRole::Current};
    EXPECT_EQ(scatter_from_current(f, ops).role, FieldRole::Scattered);
    EXPECT_THROW(scatter_from_current(CVector(CVector::Zero(10)), ops), Error);
}
