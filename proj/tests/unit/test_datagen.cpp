#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "eisp/datagen.hpp"
#include "eisp/dataset.hpp"
#include "eisp/hash.hpp"

using namespace eisp;

namespace {

CylinderSceneParams one_cylinder(std::uint64_t seed) {
    CylinderSceneParams p;
    p.count_min = p.count_max = 1;
    p.radius_m = {0.3, 0.3};
    p.permittivity = {1.5, 1.5};
    p.seed = seed;
    return p;
}

Bytes idx_header(std::uint32_t magic, std::uint32_t n, std::uint32_t rows, std::uint32_t cols) {
    Bytes b;
    for (std::uint32_t v : {magic, n, rows, cols}) {
        b.push_back(static_cast<std::uint8_t>(v >> 24));
        b.push_back(static_cast<std::uint8_t>(v >> 16));
        b.push_back(static_cast<std::uint8_t>(v >> 8));
        b.push_back(static_cast<std::uint8_t>(v));
    }
    return b;
}

Errc code_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no eisp::Error raised";
    return Errc::invalid_argument;
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("eisp_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

DatasetConfig small_config(int n_scenes) {
    DatasetConfig c;
    c.n_scenes = n_scenes;
    c.m_fwd = 32;
    c.m_inv = 16;
    c.layout = circle_layout(2, 8, 3.0, IncidentModel::LineSource);
    c.seed = 17;
    return c;
}

}  // namespace

TEST(GenCylinders, DeterministicInSeed) {
    const auto g = make_grid(2.0, 32);
    const auto a = gen_cylinders(one_cylinder(5), g);
    const auto b = gen_cylinders(one_cylinder(5), g);
    const auto c = gen_cylinders(one_cylinder(6), g);
    EXPECT_EQ(a.permittivity(), b.permittivity());
    EXPECT_NE(a.permittivity(), c.permittivity());
}

TEST(GenCylinders, CoveringCylinderGivesUniformScene) {
    const auto g = make_grid(2.0, 16);
    auto p = one_cylinder(1);
    p.radius_m = {g.half_diagonal(), g.half_diagonal()};
    p.center_extent = 0.0;
    const auto s = gen_cylinders(p, g);
    EXPECT_TRUE((s.permittivity().array() == 1.5).all());
}

TEST(GenCylinders, ValuesStayInPermittivityRange) {
    const auto g = make_grid(2.0, 16);
    CylinderSceneParams p;
    double lo = 2.0, hi = 0.0;
    for (int s = 0; s < 10000; ++s) {
        p.seed = static_cast<std::uint64_t>(s);
        const auto scene = gen_cylinders(p, g);
        lo = std::min(lo, scene.permittivity().minCoeff());
        hi = std::max(hi, scene.permittivity().maxCoeff());
    }
    EXPECT_GE(lo, 1.0);
    EXPECT_LE(hi, 1.5);
    EXPECT_GT(hi, 1.4);
}

TEST(GenCylinders, CylindersLieInsideRegion) {
    // a disc clipped by the border would lose area
    const auto g = make_grid(2.0, 64);
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto scene = gen_cylinders(one_cylinder(s), g);
        const double area = (scene.permittivity().array() > 1.0).count() * g.cell_area();
        EXPECT_NEAR(area, std::numbers::pi * 0.09, 0.02);
    }
    auto p = one_cylinder(0);
    p.radius_m = {0.9, 0.9};
    for (std::uint64_t s = 0; s < 20; ++s) {
        p.seed = s;
        const auto scene = gen_cylinders(p, g);
        EXPECT_NEAR((scene.permittivity().array() > 1.0).count() * g.cell_area(), std::numbers::pi * 0.81, 0.05);
    }
}

TEST(GenCylinders, OverlapTakesMaximum) {
    const auto g = make_grid(2.0, 16);
    CylinderSceneParams p;
    p.count_min = p.count_max = 3;
    p.radius_m = {0.5, 0.5};
    p.permittivity = {1.0, 1.5};
    p.center_extent = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        p.seed = s;
        const auto scene = gen_cylinders(p, g);
        // all three share a center, so the covered cells hold a single value
        const double inner = scene.permittivity()[g.index(8, 8)];
        for (int i = 0; i < g.cell_count(); ++i) {
            const double e = scene.permittivity()[i];
            EXPECT_TRUE(e == 1.0 || e == inner);
        }
    }
}

TEST(GenCylinders, ImpossiblePlacementFails) {
    const auto g = make_grid(2.0, 16);
    auto p = one_cylinder(0);
    p.radius_m = {1.2, 1.2};
    EXPECT_EQ(code_of([&] { (void)gen_cylinders(p, g); }), Errc::generation_failure);
}

TEST(GenCylinders, RejectsInvalidParams) {
    const auto g = make_grid(2.0, 16);
    auto p = one_cylinder(0);
    p.permittivity = {0.5, 1.5};
    EXPECT_EQ(code_of([&] { (void)gen_cylinders(p, g); }), Errc::invalid_argument);
    p = one_cylinder(0);
    p.count_min = 3;
    p.count_max = 2;
    EXPECT_EQ(code_of([&] { (void)gen_cylinders(p, g); }), Errc::invalid_argument);
    p = one_cylinder(0);
    p.radius_m = {0.4, 0.2};
    EXPECT_EQ(code_of([&] { (void)gen_cylinders(p, g); }), Errc::invalid_argument);
}

TEST(ParseIdx, TwoTwoByTwoRasters) {
    auto bytes = idx_header(idx3_magic, 2, 2, 2);
    for (std::uint8_t v = 1; v <= 8; ++v) bytes.push_back(v);
    const auto r = parse_idx(bytes);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].rows, 2);
    EXPECT_EQ(r[0].cols, 2);
    EXPECT_EQ(r[0].pixels, (std::vector<std::uint8_t>{1, 2, 3, 4}));
    EXPECT_EQ(r[1].pixels, (std::vector<std::uint8_t>{5, 6, 7, 8}));
    EXPECT_EQ(r[1].at(1, 0), 7);
}

TEST(ParseIdx, LabelMagicIsRejected) {
    auto bytes = idx_header(0x00000801, 2, 2, 2);
    bytes.resize(bytes.size() + 8);
    EXPECT_EQ(code_of([&] { (void)parse_idx(bytes); }), Errc::format_error);
}

TEST(ParseIdx, EmptyStreamIsRejected) {
    EXPECT_EQ(code_of([] { (void)parse_idx({}); }), Errc::format_error);
}

TEST(ParseIdx, TruncatedPayloadReportsLengths) {
    auto bytes = idx_header(idx3_magic, 2, 2, 2);
    bytes.resize(bytes.size() + 7);
    try {
        (void)parse_idx(bytes);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::format_error);
        const std::string what = e.what();
        EXPECT_NE(what.find('8'), std::string::npos) << what;
        EXPECT_NE(what.find('7'), std::string::npos) << what;
    }
}

TEST(ParseIdx, TrailingBytesAreRejected) {
    auto bytes = idx_header(idx3_magic, 1, 1, 1);
    bytes.push_back(3);
    bytes.push_back(4);
    EXPECT_EQ(code_of([&] { (void)parse_idx(bytes); }), Errc::format_error);
}

TEST(ParseIdx, WriteParseRoundTrip) {
    const auto digits = synth_digits(5, 3);
    const auto bytes = write_idx(digits);
    EXPECT_EQ(bytes.size(), 16u + 5u * 28u * 28u);
    const auto back = parse_idx(bytes);
    EXPECT_EQ(back, digits);
    EXPECT_EQ(write_idx(back), bytes);
}

TEST(SynthDigits, DeterministicAndNonTrivial) {
    const auto a = synth_digits(20, 9);
    const auto b = synth_digits(20, 9);
    EXPECT_EQ(a, b);
    for (const auto& r : a) {
        ASSERT_EQ(r.rows, 28);
        ASSERT_EQ(r.cols, 28);
        const auto lit = std::count_if(r.pixels.begin(), r.pixels.end(), [](auto p) { return p > 0; });
        EXPECT_GT(lit, 30);
        EXPECT_LT(lit, 28 * 28 / 2);
        // glyphs keep a clear border like MNIST
        for (int i = 0; i < 28; ++i) {
            EXPECT_EQ(r.at(0, i), 0);
            EXPECT_EQ(r.at(i, 0), 0);
        }
    }
    EXPECT_NE(synth_digits(20, 10), a);
}

TEST(RasterToScene, BackgroundAndEndpoints) {
    const auto g = make_grid(2.0, 32);
    ByteRaster zero{28, 28, std::vector<std::uint8_t>(28 * 28, 0)};
    ByteRaster full{28, 28, std::vector<std::uint8_t>(28 * 28, 255)};
    EXPECT_TRUE((raster_to_scene(zero, g, 2.0, 2.5).permittivity().array() == 1.0).all());
    EXPECT_TRUE((raster_to_scene(full, g, 2.0, 2.5).permittivity().array() == 2.5).all());
}

TEST(RasterToScene, MidGrayLinearMap) {
    ByteRaster gray{2, 2, std::vector<std::uint8_t>(4, 128)};
    const auto s = raster_to_scene(gray, make_grid(2.0, 2), 2.0, 2.5);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(s.permittivity()[i], 2.0 + 128.0 / 255.0 * 0.5, 1e-15);
    EXPECT_NEAR(s.permittivity()[0], 2.251, 5e-4);
}

TEST(RasterToScene, ImageIsUpright) {
    ByteRaster r{2, 2, {255, 0, 0, 0}};  // top-left pixel lit
    const auto g = make_grid(2.0, 2);
    const auto s = raster_to_scene(r, g, 2.0, 2.5);
    EXPECT_EQ(s.permittivity()[g.index(1, 0)], 2.5);
    EXPECT_EQ(s.permittivity()[g.index(0, 0)], 1.0);
    EXPECT_EQ(s.permittivity()[g.index(1, 1)], 1.0);
}

TEST(RasterToScene, BilinearMidpoint) {
    // 1 x 2 raster upsampled to 4 columns: pixel centers at 0.25 and 0.75 of the width
    ByteRaster r{2, 2, {0, 200, 0, 200}};
    const auto s = raster_to_scene(r, make_grid(2.0, 4), 1.0, 2.0);
    // columns at 1/8, 3/8, 5/8, 7/8 of the width: weights 0, 0.25, 0.75, 1 on the right pixel
    EXPECT_EQ(s.permittivity()[0], 1.0);
    EXPECT_NEAR(s.permittivity()[1], 1.0 + 50.0 / 255.0, 1e-12);
    EXPECT_NEAR(s.permittivity()[2], 1.0 + 150.0 / 255.0, 1e-12);
    EXPECT_NEAR(s.permittivity()[3], 1.0 + 200.0 / 255.0, 1e-12);
}

TEST(RasterToScene, RejectsBadRange) {
    ByteRaster r{2, 2, std::vector<std::uint8_t>(4, 1)};
    EXPECT_THROW((void)raster_to_scene(r, make_grid(2.0, 4), 2.5, 2.0), Error);
    EXPECT_THROW((void)raster_to_scene(r, make_grid(2.0, 4), 0.5, 2.0), Error);
}

TEST(AddNoise, ZeroRatioIsIdentity) {
    CRowMatrix e = CRowMatrix::Random(3, 16);
    EXPECT_EQ(add_noise(e, 0.0, 1), e);
}

TEST(AddNoise, DeterministicPerSeed) {
    CRowMatrix e = CRowMatrix::Random(3, 16);
    EXPECT_EQ(add_noise(e, 0.05, 4), add_noise(e, 0.05, 4));
    EXPECT_NE(add_noise(e, 0.05, 4), add_noise(e, 0.05, 5));
}

TEST(AddNoise, MeanRatioCalibrated) {
    CRowMatrix e = CRowMatrix::Random(1, 32);
    for (double ratio : {0.05, 0.30}) {
        double sum = 0.0;
        for (std::uint64_t s = 0; s < 100; ++s) sum += (add_noise(e, ratio, s) - e).norm() / e.norm();
        const double mean = sum / 100.0;
        EXPECT_GE(mean, 0.9 * ratio);
        EXPECT_LE(mean, 1.1 * ratio);
    }
}

TEST(AddNoise, AdditiveAndIndependentOfFieldGivenNorm) {
    CRowMatrix a = CRowMatrix::Random(2, 12);
    CRowMatrix b = CRowMatrix::Random(2, 12);
    for (int t = 0; t < 2; ++t) b.row(t) *= a.row(t).norm() / b.row(t).norm();
    const CRowMatrix na = add_noise(a, 0.1, 8) - a;
    const CRowMatrix nb = add_noise(b, 0.1, 8) - b;
    EXPECT_LT((na - nb).norm(), 1e-14 * na.norm());
}

TEST(AddNoise, PerTransmitterScaling) {
    CRowMatrix e(2, 32);
    e.row(0).setConstant(cplx(1.0, 0.0));
    e.row(1).setConstant(cplx(1000.0, 0.0));
    double r0 = 0.0, r1 = 0.0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const CRowMatrix n = add_noise(e, 0.05, s) - e;
        r0 += n.row(0).norm() / e.row(0).norm();
        r1 += n.row(1).norm() / e.row(1).norm();
    }
    EXPECT_NEAR(r0 / 50, 0.05, 0.005);
    EXPECT_NEAR(r1 / 50, 0.05, 0.005);
}

TEST(AddNoise, RejectsNegativeRatio) {
    CRowMatrix e = CRowMatrix::Random(1, 4);
    EXPECT_THROW((void)add_noise(e, -0.1, 0), Error);
}

TEST(RecordSeeds, DistinctAcrossRecordsAndTrials) {
    EXPECT_EQ(record_scene_seed(10, 3), 10u ^ 3u);
    EXPECT_NE(record_noise_seed(10, 3, 0), record_noise_seed(10, 3, 1));
    EXPECT_NE(record_noise_seed(10, 3, 0), record_noise_seed(10, 4, 0));
    EXPECT_EQ(record_noise_seed(10, 3, 2), record_noise_seed(10, 3, 2));
}

TEST(BuildDataset, ShapesAndMetadata) {
    const auto ds = build_dataset(small_config(3), CylinderSceneParams{});
    ASSERT_EQ(ds.size(), 3u);
    EXPECT_EQ(ds.incident.rows(), 2);
    EXPECT_EQ(ds.incident.cols(), 256);
    for (const auto& r : ds.records) {
        EXPECT_EQ(r.permittivity.size(), 256);
        EXPECT_EQ(r.current.rows(), 2);
        EXPECT_EQ(r.current.cols(), 256);
        EXPECT_EQ(r.measured.rows(), 2);
        EXPECT_EQ(r.measured.cols(), 8);
        EXPECT_NE(r.measured, r.clean_measured);
    }
    EXPECT_EQ(ds.meta.m_fwd, 32);
    EXPECT_EQ(ds.meta.m_inv, 16);
    EXPECT_EQ(ds.meta.noise_ratio, 0.05);
    EXPECT_TRUE(ds.meta.skipped.empty());
}

TEST(BuildDataset, RecordsSatisfyFieldInvariants) {
    const auto ds = build_dataset(small_config(2), CylinderSceneParams{});
    const auto ops = assemble_green(ds.grid(), ds.meta.layout, ds.physics());
    for (const auto& r : ds.records) {
        FieldBundle b{ds.incident, r.total, r.current, r.scattered, 0.0};
        const auto res = bundle_residuals(b, Scene(ds.grid(), r.permittivity), ops);
        EXPECT_LT(res.state, 1e-8);
        EXPECT_LT(res.polarization, 1e-8);
        EXPECT_LT(res.data, 1e-12);
    }
}

TEST(BuildDataset, MatchedGridNoNoiseMeasuresGroundTruth) {
    auto c = small_config(1);
    c.m_fwd = c.m_inv = 16;
    c.noise_ratio = 0.0;
    const auto ds = build_dataset(c, CylinderSceneParams{});
    const auto& r = ds.records[0];
    EXPECT_EQ(r.measured, r.clean_measured);
    EXPECT_LT((r.measured - r.scattered).norm(), 1e-8 * r.scattered.norm());
}

TEST(BuildDataset, FineAndCoarseScatteringAgree) {
    DatasetConfig c;
    c.n_scenes = 1;
    c.m_fwd = 128;
    c.m_inv = 32;
    c.noise_ratio = 0.0;
    c.layout = circle_layout(4, 32, 3.0, IncidentModel::LineSource);
    c.seed = 3;
    const auto ds = build_dataset(c, CylinderSceneParams{});
    const auto& r = ds.records[0];
    EXPECT_LT((r.clean_measured - r.scattered).norm() / r.clean_measured.norm(), 0.05);
}

TEST(BuildDataset, DownsampleSupervisionKnob) {
    auto c = small_config(1);
    c.supervision = Supervision::Downsample;
    const auto ds = build_dataset(c, CylinderSceneParams{});
    EXPECT_EQ(ds.meta.supervision, Supervision::Downsample);
    const auto& r = ds.records[0];
    EXPECT_EQ(r.current.cols(), 256);
    EXPECT_GT(r.current.norm(), 0.0);
}

TEST(BuildDataset, RasterSource) {
    auto c = small_config(2);
    const auto ds = build_dataset(c, RasterSource{synth_digits(2, 1)});
    ASSERT_EQ(ds.size(), 2u);
    EXPECT_GE(ds.records[0].permittivity.maxCoeff(), 2.0);
    EXPECT_LE(ds.records[0].permittivity.maxCoeff(), 2.5);
    EXPECT_EQ(ds.records[0].permittivity.minCoeff(), 1.0);
}

TEST(BuildDataset, RejectsNonDividingGrids) {
    auto c = small_config(1);
    c.m_fwd = 30;
    EXPECT_THROW((void)build_dataset(c, CylinderSceneParams{}), Error);
}

TEST(BuildDataset, BadSceneIsSkippedNotFatal) {
    auto c = small_config(2);
    CylinderSceneParams p;
    p.radius_m = {1.5, 1.5};
    const auto ds = build_dataset(c, p);
    EXPECT_EQ(ds.size(), 0u);
    ASSERT_EQ(ds.meta.skipped.size(), 2u);
    EXPECT_NE(ds.meta.skipped[0].reason.find("generation"), std::string::npos);
}

TEST(BuildDataset, ProgressReportsEveryRecord) {
    int calls = 0, last = 0;
    (void)build_dataset(small_config(3), CylinderSceneParams{}, [&](int done, int total) {
        ++calls;
        last = done;
        EXPECT_EQ(total, 3);
    });
    EXPECT_EQ(calls, 3);
    EXPECT_EQ(last, 3);
}

TEST(DatasetContainer, SameSeedBitIdentical) {
    const auto a = scratch_dir("ds_a");
    const auto b = scratch_dir("ds_b");
    write_dataset(build_dataset(small_config(2), CylinderSceneParams{}), a);
    write_dataset(build_dataset(small_config(2), CylinderSceneParams{}), b);
    for (const auto& entry : std::filesystem::directory_iterator(a)) {
        EXPECT_EQ(read_file(entry.path()), read_file(b / entry.path().filename())) << entry.path();
    }
}

TEST(DatasetContainer, RoundTripIsBitExact) {
    const auto ds = build_dataset(small_config(2), CylinderSceneParams{});
    const auto a = scratch_dir("rt_a");
    const auto b = scratch_dir("rt_b");
    write_dataset(ds, a);
    const auto back = read_dataset(a);
    ASSERT_EQ(back.size(), ds.size());
    EXPECT_EQ(back.incident, ds.incident);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        EXPECT_EQ(back.records[i].id, ds.records[i].id);
        EXPECT_EQ(back.records[i].permittivity, ds.records[i].permittivity);
        EXPECT_EQ(back.records[i].current, ds.records[i].current);
        EXPECT_EQ(back.records[i].total, ds.records[i].total);
        EXPECT_EQ(back.records[i].scattered, ds.records[i].scattered);
        EXPECT_EQ(back.records[i].clean_measured, ds.records[i].clean_measured);
        EXPECT_EQ(back.records[i].measured, ds.records[i].measured);
    }
    EXPECT_EQ(layout_hash(back.meta.layout), layout_hash(ds.meta.layout));
    write_dataset(back, b);
    for (const auto& entry : std::filesystem::directory_iterator(a)) {
        EXPECT_EQ(read_file(entry.path()), read_file(b / entry.path().filename())) << entry.path();
    }
}

TEST(DatasetContainer, CorruptBlobIsDetected) {
    const auto dir = scratch_dir("corrupt");
    write_dataset(build_dataset(small_config(1), CylinderSceneParams{}), dir);
    auto blob = read_file(dir / "current.f64");
    blob[5] ^= 0x01;
    write_file(dir / "current.f64", blob);
    EXPECT_EQ(code_of([&] { (void)read_dataset(dir); }), Errc::format_error);
}

TEST(DatasetContainer, MissingDirectoryIsIoError) {
    EXPECT_EQ(code_of([] { (void)read_dataset("/nonexistent/eisp/dataset"); }), Errc::io_error);
}

TEST(DatasetOps, SelectTransmitters) {
    const auto ds = build_dataset(small_config(2), CylinderSceneParams{});
    const std::vector<int> keep{1};
    const auto sub = select_transmitters(ds, keep);
    EXPECT_EQ(sub.n_transmitters(), 1);
    EXPECT_EQ(sub.incident.row(0), ds.incident.row(1));
    EXPECT_EQ(sub.records[1].measured.row(0), ds.records[1].measured.row(1));
    EXPECT_EQ(sub.records[1].current.row(0), ds.records[1].current.row(1));
    EXPECT_NE(layout_hash(sub.meta.layout), layout_hash(ds.meta.layout));
    const std::vector<int> bad{2};
    EXPECT_THROW((void)select_transmitters(ds, bad), Error);
}

TEST(DatasetOps, ReseedNoise) {
    auto ds = build_dataset(small_config(2), CylinderSceneParams{});
    const auto original = ds.records[0].measured;
    reseed_noise(ds, 0.05, 0);
    EXPECT_EQ(ds.records[0].measured, original);
    reseed_noise(ds, 0.05, 1);
    EXPECT_NE(ds.records[0].measured, original);
    reseed_noise(ds, 0.30, 1);
    EXPECT_EQ(ds.meta.noise_ratio, 0.30);
    const auto& r = ds.records[0];
    EXPECT_NEAR((r.measured - r.clean_measured).norm() / r.clean_measured.norm(), 0.30, 0.15);
}

TEST(LayoutHash, SensitiveToGeometry) {
    const auto a = circle_layout(4, 8, 3.0, IncidentModel::LineSource);
    auto b = a;
    EXPECT_EQ(layout_hash(a), layout_hash(b));
    b.receivers[0].x += 1e-9;
    EXPECT_NE(layout_hash(a), layout_hash(b));
    EXPECT_NE(layout_hash(a), layout_hash(circle_layout(4, 8, 3.0, IncidentModel::PlaneWave)));
    EXPECT_EQ(layout_hash(a).size(), 64u);
}
