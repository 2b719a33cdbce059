#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eisp/green.hpp"
#include "eisp/special.hpp"

using namespace eisp;

namespace {

constexpr double pi = std::numbers::pi;

cplx h0_std(double x) { return {std::cyl_bessel_j(0.0, x), std::cyl_neumann(0.0, x)}; }

SensorLayout ring(int n_tx = 4, int n_rx = 8) { return circle_layout(n_tx, n_rx, 3.0, IncidentModel::LineSource); }

}  // namespace

TEST(Green, EquivalentRadiusPreservesArea) {
    const auto ops = assemble_green(make_grid(2.0, 16), ring(), PhysicsConfig{});
    const double a = ops.equivalent_radius();
    EXPECT_NEAR(pi * a * a, ops.grid().cell_area(), 1e-15);
}

TEST(Green, OffDiagonalMatchesSubCellQuadrature) {
    const auto grid = make_grid(2.0, 16);  // cell width 0.125 m
    const PhysicsConfig phys;
    const double k0 = phys.wavenumber();
    const auto ops = assemble_green(grid, ring(), phys);
    const int m = grid.index(8, 4);
    const int n = grid.index(8, 8);  // 0.5 m apart
    ASSERT_NEAR(distance(grid.center(m), grid.center(n)), 0.5, 1e-14);

    const int sub = 8;
    const double h = grid.spacing() / sub;
    const Point2 xm = grid.center(m);
    const Point2 xn = grid.center(n);
    cplx sum{0.0, 0.0};
    for (int i = 0; i < sub; ++i) {
        for (int j = 0; j < sub; ++j) {
            const Point2 p{xn.x - grid.spacing() / 2 + (j + 0.5) * h, xn.y - grid.spacing() / 2 + (i + 0.5) * h};
            sum += h0_std(k0 * distance(xm, p));
        }
    }
    const cplx oracle = k0 * k0 * cplx(0.0, 0.25) * sum * h * h;
    const cplx entry = ops.domain_entry(m, n);
    EXPECT_LT(std::abs(entry - oracle) / std::abs(oracle), 0.01);
}

TEST(Green, SelfTermMatchesEquivalentCircleIntegral) {
    for (int cells : {8, 16, 32, 64}) {
        const auto grid = make_grid(2.0, cells);
        const PhysicsConfig phys;
        const double k0 = phys.wavenumber();
        const auto ops = assemble_green(grid, ring(), phys);
        const double a = ops.equivalent_radius();
        // k0^2 (i/4) * int_0^a H0(k0 rho) 2 pi rho d rho, with rho = a t^2 to tame the log singularity
        const int steps = 20000;
        cplx acc{0.0, 0.0};
        for (int s = 0; s < steps; ++s) {
            const double t = (s + 0.5) / steps;
            const double rho = a * t * t;
            acc += h0_std(k0 * rho) * rho * 2.0 * a * t;
        }
        const cplx oracle = k0 * k0 * cplx(0.0, 0.25) * 2.0 * pi * acc / static_cast<double>(steps);
        EXPECT_LT(std::abs(ops.self_term() - oracle) / std::abs(oracle), 0.02) << cells;

        GreenOptions flipped;
        flipped.flip_self_term_sign = true;
        const auto bad = assemble_green(grid, ring(), phys, flipped);
        EXPECT_GT(std::abs(bad.self_term() - oracle) / std::abs(oracle), 0.1) << cells;
    }
}

TEST(Green, DomainOperatorIsSymmetric) {
    const auto grid = make_grid(2.0, 24);
    const auto ops = assemble_green(grid, ring(), PhysicsConfig{});
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> pick(0, grid.cell_count() - 1);
    for (int k = 0; k < 100; ++k) {
        const int m = pick(rng), n = pick(rng);
        EXPECT_EQ(ops.domain_entry(m, n), ops.domain_entry(n, m));
    }
}

TEST(Green, FftProductMatchesDense) {
    for (int cells : {5, 16, 33}) {
        const auto grid = make_grid(2.0, cells);
        const auto ops = assemble_green(grid, ring(), PhysicsConfig{});
        const CMatrix dense = ops.domain_dense();
        std::mt19937_64 rng(cells);
        std::normal_distribution<double> nd;
        CVector x(grid.cell_count());
        for (auto& v : x) v = {nd(rng), nd(rng)};
        const CVector fast = ops.apply_domain(x);
        const CVector ref = dense * x;
        EXPECT_LT((fast - ref).norm() / ref.norm(), 1e-12) << cells;
        const CVector adj = ops.apply_domain_adjoint(x);
        const CVector adj_ref = dense.adjoint() * x;
        EXPECT_LT((adj - adj_ref).norm() / adj_ref.norm(), 1e-12) << cells;
    }
}

TEST(Green, DomainBlockMatchesEntries) {
    const auto grid = make_grid(2.0, 8);
    const auto ops = assemble_green(grid, ring(), PhysicsConfig{});
    const std::vector<int> rows{0, 9, 63};
    const std::vector<int> cols{5, 9};
    const CMatrix b = ops.domain_block(rows, cols);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_EQ(b(i, j), ops.domain_entry(rows[i], cols[j]));
}

TEST(Green, MeasurementOperatorUsesCellFactor) {
    const auto grid = make_grid(2.0, 8);
    const PhysicsConfig phys;
    const auto layout = ring(2, 5);
    const auto ops = assemble_green(grid, layout, phys);
    ASSERT_EQ(ops.measure_op().rows(), 5);
    ASSERT_EQ(ops.measure_op().cols(), 64);
    const double k0 = phys.wavenumber();
    const double a = ops.equivalent_radius();
    const cplx factor = cplx(0.0, pi * k0 * a / 2.0) * std::cyl_bessel_j(1.0, k0 * a);
    for (int r = 0; r < 5; ++r) {
        for (int n : {0, 17, 63}) {
            const cplx ref = factor * h0_std(k0 * distance(layout.receivers[r], grid.center(n)));
            EXPECT_LT(std::abs(ops.measure_op()(r, n) - ref), 1e-11 * std::abs(ref));
        }
    }
}

TEST(Green, ReceiverInsideRegionRejected) {
    SensorLayout l = ring();
    l.receivers.push_back({0.0625, 0.0625});
    try {
        assemble_green(make_grid(2.0, 16), l, PhysicsConfig{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::invalid_geometry);
    }
}
