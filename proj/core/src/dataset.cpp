#include "eisp/dataset.hpp"

#include "json.hpp"

#include <atomic>
#include <mutex>
#include <optional>

#include "eisp/hash.hpp"
#include "eisp/parallel.hpp"

namespace eisp {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string layout_hash(const SensorLayout& layout) {
    Bytes b;
    append_u32_le(b, layout.incident_model == IncidentModel::LineSource ? 0u : 1u);
    append_u64_le(b, layout.transmitters.size());
    for (const auto& p : layout.transmitters) {
        append_f64(b, p.x);
        append_f64(b, p.y);
    }
    append_u64_le(b, layout.receivers.size());
    for (const auto& p : layout.receivers) {
        append_f64(b, p.x);
        append_f64(b, p.y);
    }
    return sha256_hex(b);
}

std::uint64_t record_scene_seed(std::uint64_t dataset_seed, int record_id) {
    return dataset_seed ^ static_cast<std::uint64_t>(record_id);
}

std::uint64_t record_noise_seed(std::uint64_t dataset_seed, int record_id, int trial) {
    return splitmix64(splitmix64(record_scene_seed(dataset_seed, record_id)) + static_cast<std::uint64_t>(trial));
}

namespace {

std::string source_description(const SceneSource& source) {
    ordered_json j;
    if (const auto* c = std::get_if<CylinderSceneParams>(&source)) {
        j["kind"] = "cylinders";
        j["count"] = {c->count_min, c->count_max};
        j["radius_m"] = {c->radius_m.lo, c->radius_m.hi};
        j["permittivity"] = {c->permittivity.lo, c->permittivity.hi};
        if (c->center_extent) j["center_extent_m"] = *c->center_extent;
    } else {
        const auto& r = std::get<RasterSource>(source);
        Sha256 h;
        for (const auto& raster : r.rasters) h.update(raster.pixels);
        j["kind"] = "raster";
        j["rasters"] = r.rasters.size();
        j["permittivity"] = {r.eps_min, r.eps_max};
        j["raster_sha256"] = h.hex_digest();
    }
    return j.dump();
}

Scene make_scene(const SceneSource& source, const GridSpec& grid, std::uint64_t seed, int id) {
    if (const auto* c = std::get_if<CylinderSceneParams>(&source)) {
        CylinderSceneParams p = *c;
        p.seed = seed;
        return gen_cylinders(p, grid);
    }
    const auto& r = std::get<RasterSource>(source);
    return raster_to_scene(r.rasters[static_cast<std::size_t>(id)], grid, r.eps_min, r.eps_max);
}

CRowMatrix downsample_rows(const CRowMatrix& fine, int m_fwd, int m_inv) {
    CRowMatrix out(fine.rows(), m_inv * m_inv);
    for (Eigen::Index t = 0; t < fine.rows(); ++t) {
        out.row(t) = downsample_field(fine.row(t).transpose(), m_fwd, m_inv).transpose();
    }
    return out;
}

}  // namespace

Dataset build_dataset(const DatasetConfig& config, const SceneSource& source, const ProgressFn& progress) {
    require(config.n_scenes >= 0, Errc::invalid_argument, "n_scenes must be >= 0");
    require(config.m_inv >= 2 && config.m_fwd % config.m_inv == 0, Errc::invalid_argument,
            "m_inv must divide m_fwd");
    require(config.noise_ratio >= 0.0, Errc::invalid_argument, "noise ratio must be >= 0");
    if (const auto* r = std::get_if<RasterSource>(&source)) {
        require(static_cast<int>(r->rasters.size()) >= config.n_scenes, Errc::invalid_argument,
                "raster source has fewer images than requested scenes");
    } else {
        std::get<CylinderSceneParams>(source).validate();
    }
    const GridSpec fine = make_grid(config.side_m, config.m_fwd);
    const GridSpec coarse = make_grid(config.side_m, config.m_inv);
    const auto ops_fine = assemble_green(fine, config.layout, config.physics);
    const auto ops_coarse = assemble_green(coarse, config.layout, config.physics);

    Dataset ds;
    ds.meta.schema_version = dataset_schema_version;
    ds.meta.side_m = config.side_m;
    ds.meta.m_fwd = config.m_fwd;
    ds.meta.m_inv = config.m_inv;
    ds.meta.layout = config.layout;
    ds.meta.frequency_hz = config.physics.frequency();
    ds.meta.noise_ratio = config.noise_ratio;
    ds.meta.seed = config.seed;
    ds.meta.supervision = config.supervision;
    ds.meta.source = source_description(source);
    ds.incident = incident_fields(config.layout, coarse, config.physics);

    std::vector<std::optional<DatasetRecord>> slots(static_cast<std::size_t>(config.n_scenes));
    std::vector<std::string> errors(static_cast<std::size_t>(config.n_scenes));
    std::atomic<int> done{0};
    std::mutex progress_mutex;
    SolveOptions solve = config.solve;
    solve.threads = 1;

    parallel_for(config.n_scenes, config.threads, [&](int id) {
        const auto slot = static_cast<std::size_t>(id);
        try {
            const Scene scene = make_scene(source, fine, record_scene_seed(config.seed, id), id);
            const FieldBundle fb = forward_solve(scene, ops_fine, config.physics, solve);
            DatasetRecord rec;
            rec.id = id;
            rec.clean_measured = fb.scattered;
            rec.measured = add_noise(fb.scattered, config.noise_ratio, record_noise_seed(config.seed, id));
            const Scene small = downsample_scene(scene, config.m_inv);
            rec.permittivity = small.permittivity();
            if (config.supervision == Supervision::Resolve) {
                const FieldBundle cb = forward_solve(small, ops_coarse, config.physics, solve);
                rec.current = cb.current;
                rec.total = cb.total;
                rec.scattered = cb.scattered;
            } else {
                rec.current = downsample_rows(fb.current, config.m_fwd, config.m_inv);
                rec.total = downsample_rows(fb.total, config.m_fwd, config.m_inv);
                rec.scattered = (ops_coarse.measure_op() * rec.current.transpose()).transpose();
            }
            slots[slot] = std::move(rec);
        } catch (const Error& e) {
            if (e.code() == Errc::invalid_argument) throw;
            errors[slot] = e.what();
        }
        const int n = ++done;
        if (progress) {
            std::lock_guard lock(progress_mutex);
            progress(n, config.n_scenes);
        }
    });

    for (int id = 0; id < config.n_scenes; ++id) {
        auto& slot = slots[static_cast<std::size_t>(id)];
        if (slot) {
            ds.records.push_back(std::move(*slot));
        } else {
            ds.meta.skipped.push_back({id, errors[static_cast<std::size_t>(id)]});
        }
    }
    return ds;
}

void reseed_noise(Dataset& dataset, double ratio, int trial) {
    for (auto& rec : dataset.records) {
        rec.measured = add_noise(rec.clean_measured, ratio, record_noise_seed(dataset.meta.seed, rec.id, trial));
    }
    dataset.meta.noise_ratio = ratio;
}

Dataset select_transmitters(const Dataset& dataset, std::span<const int> tx) {
    require(!tx.empty(), Errc::invalid_argument, "transmitter selection is empty");
    for (int t : tx) {
        require(t >= 0 && t < dataset.n_transmitters(), Errc::invalid_argument, "transmitter index out of range");
    }
    const auto pick = [&](const CRowMatrix& m) {
        CRowMatrix out(static_cast<Eigen::Index>(tx.size()), m.cols());
        for (std::size_t k = 0; k < tx.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = m.row(tx[k]);
        return out;
    };
    Dataset out;
    out.meta = dataset.meta;
    out.meta.layout.transmitters.clear();
    for (int t : tx) out.meta.layout.transmitters.push_back(dataset.meta.layout.transmitters[static_cast<std::size_t>(t)]);
    out.incident = pick(dataset.incident);
    out.records.reserve(dataset.records.size());
    for (const auto& r : dataset.records) {
        out.records.push_back({r.id, r.permittivity, pick(r.current), pick(r.total), pick(r.scattered),
                               pick(r.clean_measured), pick(r.measured)});
    }
    return out;
}

namespace {

const char* supervision_name(Supervision s) { return s == Supervision::Resolve ? "resolve" : "downsample"; }

ordered_json points_json(const std::vector<Point2>& pts) {
    ordered_json a = ordered_json::array();
    for (const auto& p : pts) a.push_back({p.x, p.y});
    return a;
}

std::vector<Point2> points_from(const ordered_json& a) {
    std::vector<Point2> out;
    for (const auto& p : a) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return out;
}

struct ArraySpec {
    const char* name;
    bool complex;
};

constexpr ArraySpec array_specs[] = {
    {"incident", true},  {"permittivity", false}, {"current", true},  {"total", true},
    {"scattered", true}, {"clean_measured", true}, {"measured", true},
};

Bytes encode_array(const Dataset& ds, std::string_view name) {
    Bytes b;
    if (name == "incident") {
        append_c128(b, std::span(ds.incident.data(), static_cast<std::size_t>(ds.incident.size())));
        return b;
    }
    for (const auto& r : ds.records) {
        if (name == "permittivity") {
            append_f64(b, std::span(r.permittivity.data(), static_cast<std::size_t>(r.permittivity.size())));
            continue;
        }
        const CRowMatrix& m = name == "current"       ? r.current
                              : name == "total"       ? r.total
                              : name == "scattered"   ? r.scattered
                              : name == "clean_measured" ? r.clean_measured
                                                      : r.measured;
        append_c128(b, std::span(m.data(), static_cast<std::size_t>(m.size())));
    }
    return b;
}

}  // namespace

void write_dataset(const Dataset& ds, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(Errc::io_error, "cannot create " + dir.string() + ": " + ec.message());
    const int n = ds.n_transmitters();
    const int nr = ds.n_receivers();
    const int cells = ds.meta.m_inv * ds.meta.m_inv;
    const auto count = static_cast<long long>(ds.records.size());

    ordered_json m;
    m["schema"] = "eisp-dataset";
    m["schema_version"] = ds.meta.schema_version;
    m["grid"] = {{"side_m", ds.meta.side_m}, {"m_fwd", ds.meta.m_fwd}, {"m_inv", ds.meta.m_inv}};
    m["physics"] = {{"frequency_hz", ds.meta.frequency_hz}};
    m["layout"] = {{"incident_model", ds.meta.layout.incident_model == IncidentModel::LineSource ? "line_source"
                                                                                             : "plane_wave"},
                   {"transmitters", points_json(ds.meta.layout.transmitters)},
                   {"receivers", points_json(ds.meta.layout.receivers)},
                   {"hash", layout_hash(ds.meta.layout)}};
    m["noise_ratio"] = ds.meta.noise_ratio;
    m["seed"] = ds.meta.seed;
    m["supervision"] = supervision_name(ds.meta.supervision);
    m["source"] = ordered_json::parse(ds.meta.source.empty() ? "{}" : ds.meta.source);
    ordered_json recs = ordered_json::array();
    for (const auto& r : ds.records) recs.push_back(r.id);
    m["records"] = recs;
    ordered_json skipped = ordered_json::array();
    for (const auto& s : ds.meta.skipped) skipped.push_back({{"id", s.id}, {"reason", s.reason}});
    m["skipped"] = skipped;

    ordered_json arrays = ordered_json::object();
    for (const auto& spec : array_specs) {
        const std::string name = spec.name;
        ordered_json shape;
        if (name == "incident") shape = {n, cells};
        else if (name == "permittivity") shape = {count, cells};
        else if (name == "current" || name == "total") shape = {count, n, cells};
        else shape = {count, n, nr};
        const Bytes blob = encode_array(ds, name);
        const std::string file = name + ".f64";
        write_file(dir / file, blob);
        arrays[name] = {{"file", file},
                        {"dtype", spec.complex ? "complex128" : "float64"},
                        {"shape", shape},
                        {"sha256", sha256_hex(blob)}};
    }
    m["arrays"] = arrays;
    write_text(dir / "manifest.json", m.dump(2) + "\n");
}

Dataset read_dataset(const fs::path& dir) {
    ordered_json m;
    try {
        m = ordered_json::parse(read_text(dir / "manifest.json"));
    } catch (const ordered_json::exception& e) {
        fail(Errc::format_error, "malformed dataset manifest: " + std::string(e.what()));
    }
    Dataset ds;
    try {
        require(m.at("schema").get<std::string>() == "eisp-dataset", Errc::format_error, "not a dataset manifest");
        ds.meta.schema_version = m.at("schema_version").get<int>();
        require(ds.meta.schema_version == dataset_schema_version, Errc::format_error,
                "unsupported dataset schema version " + std::to_string(ds.meta.schema_version));
        ds.meta.side_m = m.at("grid").at("side_m").get<double>();
        ds.meta.m_fwd = m.at("grid").at("m_fwd").get<int>();
        ds.meta.m_inv = m.at("grid").at("m_inv").get<int>();
        ds.meta.frequency_hz = m.at("physics").at("frequency_hz").get<double>();
        const auto& lay = m.at("layout");
        const auto model = lay.at("incident_model").get<std::string>();
        require(model == "line_source" || model == "plane_wave", Errc::format_error, "unknown incident model");
        ds.meta.layout.incident_model = model == "line_source" ? IncidentModel::LineSource : IncidentModel::PlaneWave;
        ds.meta.layout.transmitters = points_from(lay.at("transmitters"));
        ds.meta.layout.receivers = points_from(lay.at("receivers"));
        require(lay.at("hash").get<std::string>() == layout_hash(ds.meta.layout), Errc::format_error,
                "layout hash does not match the stored layout");
        ds.meta.noise_ratio = m.at("noise_ratio").get<double>();
        ds.meta.seed = m.at("seed").get<std::uint64_t>();
        const auto sup = m.at("supervision").get<std::string>();
        require(sup == "resolve" || sup == "downsample", Errc::format_error, "unknown supervision mode");
        ds.meta.supervision = sup == "resolve" ? Supervision::Resolve : Supervision::Downsample;
        ds.meta.source = m.at("source").dump();
        for (const auto& s : m.at("skipped")) {
            ds.meta.skipped.push_back({s.at("id").get<int>(), s.at("reason").get<std::string>()});
        }
        const int n = ds.n_transmitters();
        const int nr = ds.n_receivers();
        const int cells = ds.meta.m_inv * ds.meta.m_inv;
        const auto& ids = m.at("records");
        const auto count = ids.size();
        ds.records.resize(count);
        for (std::size_t i = 0; i < count; ++i) ds.records[i].id = ids[i].get<int>();

        for (const auto& spec : array_specs) {
            const std::string name = spec.name;
            const auto& a = m.at("arrays").at(name);
            const Bytes blob = read_file(dir / a.at("file").get<std::string>());
            if (sha256_hex(blob) != a.at("sha256").get<std::string>()) {
                fail(Errc::format_error, "checksum mismatch for array " + name);
            }
            ByteReader in(blob);
            if (name == "incident") {
                ds.incident.resize(n, cells);
                in.c128(std::span(ds.incident.data(), static_cast<std::size_t>(ds.incident.size())));
            } else {
                for (auto& r : ds.records) {
                    if (name == "permittivity") {
                        r.permittivity.resize(cells);
                        in.f64(std::span(r.permittivity.data(), static_cast<std::size_t>(cells)));
                        continue;
                    }
                    CRowMatrix& target = name == "current"       ? r.current
                                         : name == "total"       ? r.total
                                         : name == "scattered"   ? r.scattered
                                         : name == "clean_measured" ? r.clean_measured
                                                                 : r.measured;
                    const int cols = (name == "current" || name == "total") ? cells : nr;
                    target.resize(n, cols);
                    in.c128(std::span(target.data(), static_cast<std::size_t>(target.size())));
                }
            }
            require(in.remaining() == 0, Errc::format_error, "trailing bytes in array " + name);
        }
    } catch (const ordered_json::exception& e) {
        fail(Errc::format_error, "malformed dataset manifest: " + std::string(e.what()));
    }
    return ds;
}

}  // namespace eisp
