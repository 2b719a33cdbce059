#include <gtest/gtest.h>

#include <random>

#include "eisp/grid.hpp"

using namespace eisp;

TEST(MakeGrid, TwoByTwoCentersAreSymmetric) {
    const auto g = make_grid(2.0, 2);
    ASSERT_EQ(g.cell_count(), 4);
    EXPECT_EQ(g.center(0), (Point2{-0.5, -0.5}));
    EXPECT_EQ(g.center(1), (Point2{0.5, -0.5}));
    EXPECT_EQ(g.center(2), (Point2{-0.5, 0.5}));
    EXPECT_EQ(g.center(3), (Point2{0.5, 0.5}));
}

TEST(MakeGrid, SixtyFourGridSpacing) {
    const auto g = make_grid(2.0, 64);
    EXPECT_DOUBLE_EQ(g.spacing(), 0.03125);
    EXPECT_EQ(g.centers().size(), 4096u);
}

TEST(MakeGrid, OddGridHasCellAtOrigin) {
    const auto g = make_grid(2.0, 3);
    EXPECT_NEAR(g.center(4).x, 0.0, 1e-15);
    EXPECT_NEAR(g.center(4).y, 0.0, 1e-15);
}

TEST(MakeGrid, RejectsBadArguments) {
    EXPECT_THROW(make_grid(0.0, 8), Error);
    EXPECT_THROW(make_grid(-1.0, 8), Error);
    EXPECT_THROW(make_grid(2.0, 1), Error);
    try {
        make_grid(2.0, 1);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::invalid_argument);
    }
}

TEST(MakeGrid, CellAreasSumToRegionArea) {
    for (int m : {2, 3, 7, 32, 64}) {
        const auto g = make_grid(2.0, m);
        EXPECT_NEAR(g.cell_area() * g.cell_count(), 4.0, 1e-12 * m * m);
        double cx = 0.0, cy = 0.0;
        for (const auto& c : g.centers()) {
            cx += c.x;
            cy += c.y;
        }
        EXPECT_NEAR(cx, 0.0, 1e-12 * m * m);
        EXPECT_NEAR(cy, 0.0, 1e-12 * m * m);
    }
}

TEST(PhysicsConfig, WavenumberIsDerived) {
    const PhysicsConfig p(400e6);
    EXPECT_NEAR(p.wavenumber(), 2.0 * std::numbers::pi * 400e6 / speed_of_light, 1e-15);
    EXPECT_THROW(PhysicsConfig(0.0), Error);
}

TEST(CircleLayout, ReferenceGeometry) {
    const auto l = circle_layout(16, 32, 3.0, IncidentModel::LineSource);
    ASSERT_EQ(l.n_transmitters(), 16);
    ASSERT_EQ(l.n_receivers(), 32);
    for (const auto& p : l.transmitters) EXPECT_NEAR(std::hypot(p.x, p.y), 3.0, 1e-14);
    for (const auto& p : l.receivers) EXPECT_NEAR(std::hypot(p.x, p.y), 3.0, 1e-14);
    EXPECT_NO_THROW(l.validate(make_grid(2.0, 32)));
}

TEST(CircleLayout, SingleTransmitterAtAngleZero) {
    const auto l = circle_layout(1, 32, 3.0, IncidentModel::PlaneWave);
    ASSERT_EQ(l.n_transmitters(), 1);
    EXPECT_EQ(l.transmitters[0], (Point2{3.0, 0.0}));
}

TEST(CircleLayout, QuarterSymmetry) {
    const auto l = circle_layout(4, 4, 3.0, IncidentModel::LineSource);
    const Point2 expected[] = {{3, 0}, {0, 3}, {-3, 0}, {0, -3}};
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(l.transmitters[k].x, expected[k].x, 1e-14);
        EXPECT_NEAR(l.transmitters[k].y, expected[k].y, 1e-14);
    }
}

TEST(CircleLayout, RadiusInsideRegionRejected) {
    EXPECT_THROW(circle_layout(4, 4, 1.2, IncidentModel::LineSource), Error);
    EXPECT_THROW(circle_layout(0, 4, 3.0, IncidentModel::LineSource), Error);
}

TEST(SensorLayout, SensorInsideRegionIsInvalidGeometry) {
    SensorLayout l;
    l.transmitters = {{3.0, 0.0}};
    l.receivers = {{0.5, 0.5}};
    try {
        l.validate(make_grid(2.0, 4));
        FAIL() << "expected invalid-geometry";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::invalid_geometry);
    }
}

TEST(Scene, RejectsSubVacuumPermittivity) {
    const auto g = make_grid(2.0, 2);
    EXPECT_THROW(Scene(g, RVector::Constant(4, 0.9)), Error);
    EXPECT_THROW(Scene(g, RVector::Constant(3, 1.0)), Error);
    const Scene s(g, RVector::Constant(4, 1.25));
    EXPECT_TRUE((s.contrast().array() >= 0.0).all());
    EXPECT_DOUBLE_EQ(s.contrast()[0], 0.25);
}

TEST(DownsampleScene, UniformStaysUniform) {
    const auto s = uniform_scene(make_grid(2.0, 12), 1.5);
    for (int target : {2, 3, 4, 6}) {
        const auto d = downsample_scene(s, target);
        EXPECT_EQ(d.grid().cells_per_side(), target);
        EXPECT_TRUE((d.permittivity().array() == 1.5).all());
    }
}

TEST(DownsampleScene, QuadrantBlockAverage) {
    const auto g = make_grid(2.0, 4);
    RVector eps = RVector::Ones(16);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) eps[g.index(r, c)] = 2.0;
    const auto d = downsample_scene(Scene(g, eps), 2);
    EXPECT_DOUBLE_EQ(d.permittivity()[0], 2.0);
    EXPECT_DOUBLE_EQ(d.permittivity()[1], 1.0);
    EXPECT_DOUBLE_EQ(d.permittivity()[2], 1.0);
    EXPECT_DOUBLE_EQ(d.permittivity()[3], 1.0);
}

TEST(DownsampleScene, PreservesMeanOfRandomScene) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(1.0, 2.5);
    RVector eps(128 * 128);
    for (auto& v : eps) v = u(rng);
    const Scene s(make_grid(2.0, 128), eps);
    const auto d = downsample_scene(s, 32);
    EXPECT_NEAR(d.permittivity().mean(), eps.mean(), 1e-12);
    EXPECT_GE(d.permittivity().minCoeff(), 1.0);
}

TEST(DownsampleScene, NestedPoolingComposes) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(1.0, 2.0);
    RVector eps(64 * 64);
    for (auto& v : eps) v = u(rng);
    const Scene s(make_grid(2.0, 64), eps);
    const auto twice = downsample_scene(downsample_scene(s, 16), 4);
    const auto once = downsample_scene(s, 4);
    EXPECT_LT((twice.permittivity() - once.permittivity()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(DownsampleScene, NonDivisorRejected) {
    const auto s = uniform_scene(make_grid(2.0, 10), 1.0);
    EXPECT_THROW(downsample_scene(s, 3), Error);
}
