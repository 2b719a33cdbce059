#include "eisp_cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

#include <spdlog/spdlog.h>

#include "eisp/hash.hpp"
#include "eisp/mie.hpp"
#include "eisp/parallel.hpp"

namespace eisp::cli {

using nlohmann::json;

namespace {

std::string file_sha256(const fs::path& path) { return sha256_hex(read_file(path)); }

void write_run_manifest(const fs::path& out, const std::string& command, const RunConfig& config, json inputs,
                        json outputs, json extra = json::object()) {
    json m;
    m["command"] = command;
    m["config"] = to_json(config);
    m["inputs"] = std::move(inputs);
    m["outputs"] = std::move(outputs);
    for (auto& [k, v] : extra.items()) m[k] = v;
    write_text(out / "run.json", m.dump(2) + "\n");
}

fs::path required_path(const fs::path& given, const std::string& fallback, const std::string& what) {
    if (!given.empty()) return given;
    if (!fallback.empty()) return fallback;
    fail(Errc::config_error, "no " + what + " given (flag or paths." + what + ")");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Scene disc_scene(const GridSpec& grid, double radius, double eps) {
    RVector e = RVector::Ones(grid.cell_count());
    for (int i = 0; i < grid.cell_count(); ++i)
        if (std::hypot(grid.center(i).x, grid.center(i).y) < radius) e[i] = eps;
    return {grid, e};
}

CurrentEstimator load_model(const fs::path& path, const Dataset& ds) {
    auto model = load_weights(read_file(path));
    if (model.n_transmitters() != ds.n_transmitters())
        fail(Errc::config_error, "transmitter count mismatch: model " + path.string() + " has " +
                                     std::to_string(model.n_transmitters()) + " transmitters, dataset has " +
                                     std::to_string(ds.n_transmitters()));
    if (model.n_receivers() != ds.n_receivers())
        fail(Errc::config_error, "receiver count mismatch: model has " + std::to_string(model.n_receivers()) +
                                     " receivers, dataset has " + std::to_string(ds.n_receivers()));
    if (model.config().side_m != ds.meta.side_m)
        fail(Errc::config_error, "region size mismatch: model side_m " + format_real(model.config().side_m) +
                                     ", dataset side_m " + format_real(ds.meta.side_m));
    return model;
}

std::string scene_name(int id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "scene_%05d", id);
    return buf;
}

}  // namespace

std::vector<PhysicsCheck> cmd_validate_physics(const RunConfig& config, const fs::path& out, bool flip_self_term) {
    const PhysicsConfig physics(config.physics.frequency_hz);
    const auto layout = make_layout(config);
    GreenOptions gopt;
    gopt.flip_self_term_sign = flip_self_term;
    SolveOptions sopt;
    sopt.threads = config.threads;
    const auto& v = config.validate;
    std::vector<PhysicsCheck> checks;

    for (std::size_t i = 0; i < v.mie_cells.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        const int m = v.mie_cells[i];
        const auto scene = disc_scene(make_grid(config.grid.side_m, m), v.mie_radius_m, v.mie_eps);
        const auto ops = assemble_green(scene.grid(), layout, physics, gopt);
        const auto bundle = forward_solve(scene, ops, physics, sopt);
        double num = 0.0, den = 0.0;
        for (int t = 0; t < layout.n_transmitters(); ++t) {
            const CVector ref = mie_cylinder(v.mie_radius_m, v.mie_eps, physics, layout, t).values;
            num += (bundle.scattered.row(t).transpose() - ref).squaredNorm();
            den += ref.squaredNorm();
        }
        checks.push_back({"mie_error_M" + std::to_string(m), std::sqrt(num / den), v.mie_tolerance[i]});
        spdlog::info("Mie comparison at M={} took {:.2f} s", m, seconds_since(t0));
    }

    {
        CylinderSceneParams p;
        p.seed = config.seed;
        const auto scene = gen_cylinders(p, make_grid(config.grid.side_m, 16));
        const Point2 a = layout.transmitters.front();
        const Point2 b = layout.receivers[layout.receivers.size() / 3];
        SensorLayout ab, ba;
        ab.transmitters = {a};
        ab.receivers = {b};
        ba.transmitters = {b};
        ba.receivers = {a};
        const auto s1 = forward_solve(scene, assemble_green(scene.grid(), ab, physics, gopt), physics, sopt);
        const auto s2 = forward_solve(scene, assemble_green(scene.grid(), ba, physics, gopt), physics, sopt);
        const double mag = std::max(std::abs(s1.scattered(0, 0)), 1e-300);
        checks.push_back({"reciprocity", std::abs(s1.scattered(0, 0) - s2.scattered(0, 0)) / mag,
                          v.reciprocity_tolerance});
    }

    if (v.roundtrip_scenes > 0) {
        const auto grid = make_grid(config.grid.side_m, config.grid.m_inv);
        const auto ops = assemble_green(grid, layout, physics, gopt);
        double worst = 0.0;
        for (int s = 0; s < v.roundtrip_scenes; ++s) {
            CylinderSceneParams p;
            p.seed = record_scene_seed(config.seed, s);
            const auto scene = gen_cylinders(p, grid);
            const auto bundle = forward_solve(scene, ops, physics, sopt);
            for (int t = 0; t < layout.n_transmitters(); ++t) {
                const RVector eps = solve_permittivity(CVector(bundle.current.row(t).transpose()),
                                                       CVector(bundle.incident.row(t).transpose()), ops);
                worst = std::max(worst, (eps - scene.permittivity()).cwiseAbs().maxCoeff());
            }
        }
        checks.push_back({"permittivity_roundtrip", worst, v.roundtrip_tolerance});
    }

    std::ostringstream txt, csv;
    csv << "check,value,tolerance,status\n";
    for (const auto& c : checks) {
        const char* status = c.passed() ? "PASS" : "FAIL";
        txt << status << "  " << c.name << " = " << format_real(c.value) << " (tolerance " << format_real(c.tolerance)
            << ")\n";
        csv << c.name << ',' << format_real(c.value) << ',' << format_real(c.tolerance) << ',' << status << '\n';
    }
    fs::create_directories(out);
    write_text(out / "physics_report.txt", txt.str());
    write_text(out / "physics_report.csv", csv.str());
    write_run_manifest(out, "validate-physics", config, json::object(),
                       {{"physics_report.csv", sha256_hex(csv.str())}},
                       {{"flip_self_term", flip_self_term}});
    std::fputs(txt.str().c_str(), stdout);
    return checks;
}

void cmd_gen_data(const RunConfig& config, const fs::path& out) {
    json inputs = json::object();
    if (config.scenes.source == "idx") inputs["idx"] = file_sha256(config.scenes.raster.idx_path);
    const auto t0 = std::chrono::steady_clock::now();
    int last_decile = -1;
    const auto progress = [&](int done, int total) {
        const int decile = done * 10 / total;
        if (decile != last_decile) {
            last_decile = decile;
            spdlog::info("generated {}/{} scenes", done, total);
        }
    };
    const auto ds = build_dataset(make_dataset_config(config), make_scene_source(config), progress);
    write_dataset(ds, out);
    write_run_manifest(out, "gen-data", config, inputs, {{"manifest.json", file_sha256(out / "manifest.json")}});
    for (const auto& s : ds.meta.skipped) spdlog::warn("skipped scene {}: {}", s.id, s.reason);
    spdlog::info("dataset generation took {:.1f} s", seconds_since(t0));
    std::printf("wrote %zu records (%zu skipped) to %s\n", ds.records.size(), ds.meta.skipped.size(),
                out.string().c_str());
}

void cmd_train(const RunConfig& config, const TrainArgs& args) {
    const auto ds_path = required_path(args.dataset, config.paths.dataset, "dataset");
    const auto ds = read_dataset(ds_path);
    check_geometry(config, ds.meta);
    const auto ops = assemble_green(ds.grid(), ds.meta.layout, ds.physics());

    json inputs = {{"dataset", file_sha256(ds_path / "manifest.json")}};
    std::optional<TrainCheckpoint> resume;
    if (args.resume) {
        const auto bytes = read_file(*args.resume);
        inputs["checkpoint"] = sha256_hex(bytes);
        resume = load_checkpoint(bytes);
        if (estimator_widths(resume->model.config()) != estimator_widths(make_estimator_config(config, ds)))
            fail(Errc::config_error, "checkpoint architecture does not match the model section of the config");
    }

    CurrentEstimator model(make_estimator_config(config, ds), config.seed);
    fit_statistics(model, ds);

    auto tc = make_train_config(config);
    fs::create_directories(args.out);
    if (tc.checkpoint_every > 0) tc.checkpoint_path = args.out / "checkpoint.ckpt";
    const auto t0 = std::chrono::steady_clock::now();
    tc.on_epoch = [&](const EpochLoss& e) {
        spdlog::info("epoch {} l_curr {:.6g} l_perm {:.6g} l_scat {:.6g} total {:.6g} ({:.1f} s)", e.epoch, e.l_curr,
                     e.l_perm, e.l_scat, e.total, seconds_since(t0));
    };
    const auto result = train(ds, model, ops, tc, resume ? &*resume : nullptr);

    const auto weights = save_weights(result.model);
    const auto csv = history_csv(result.history);
    write_file(args.out / "model.weights", weights);
    write_text(args.out / "loss.csv", csv);
    write_run_manifest(
        args.out, "train", config, inputs,
        {{"model.weights", sha256_hex(weights)}, {"loss.csv", sha256_hex(csv)}},
        {{"loss_weights", {{"curr", tc.weights.curr}, {"perm", tc.weights.perm}, {"scat", tc.weights.scat}}}});
    std::printf("trained %d epochs on %zu scenes; model written to %s\n", static_cast<int>(result.history.size()),
                ds.size(), (args.out / "model.weights").string().c_str());
}

void cmd_infer(const RunConfig& config, const InferArgs& args) {
    if (args.baseline_bp == args.model.has_value())
        fail(Errc::config_error, "infer needs exactly one of --model or --baseline bp");
    const auto ds_path = required_path(args.dataset, config.paths.dataset, "dataset");
    const auto ds = read_dataset(ds_path);
    const auto ops = assemble_green(ds.grid(), ds.meta.layout, ds.physics());
    json inputs = {{"dataset", file_sha256(ds_path / "manifest.json")}};
    std::optional<CurrentEstimator> model;
    if (args.model) {
        model = load_model(*args.model, ds);
        inputs["model"] = file_sha256(*args.model);
    }

    const int n = static_cast<int>(ds.size());
    std::vector<RVector> maps(static_cast<std::size_t>(n));
    parallel_for(n, config.threads, [&](int i) {
        const auto& rec = ds.records[static_cast<std::size_t>(i)];
        maps[static_cast<std::size_t>(i)] = model ? infer(*model, rec.measured, ops, ds.incident).fused
                                                  : bp_reconstruct(rec.measured, ops, ds.incident).fused;
    });

    fs::create_directories(args.out);
    Bytes blob;
    json ids = json::array();
    for (int i = 0; i < n; ++i) {
        append_f64(blob, std::span<const double>(maps[static_cast<std::size_t>(i)].data(),
                                                 static_cast<std::size_t>(maps[static_cast<std::size_t>(i)].size())));
        ids.push_back(ds.records[static_cast<std::size_t>(i)].id);
    }
    write_file(args.out / "reconstructions.f64", blob);
    json index = {{"method", model ? "model" : "bp"},
                  {"m_inv", ds.meta.m_inv},
                  {"scene_ids", ids},
                  {"blob", "reconstructions.f64"},
                  {"sha256", sha256_hex(blob)}};
    write_text(args.out / "reconstructions.json", index.dump(2) + "\n");

    json outputs = {{"reconstructions.f64", sha256_hex(blob)}};
    if (args.emit_heatmaps) {
        const auto dir = args.out / "heatmaps";
        fs::create_directories(dir);
        HeatmapOptions hopt;
        hopt.pixel_scale = config.heatmaps.pixel_scale;
        const std::string ext = "." + config.heatmaps.format;
        const int side = ds.meta.m_inv;
        for (int i = 0; i < n; ++i) {
            const auto& rec = ds.records[static_cast<std::size_t>(i)];
            const auto& pred = maps[static_cast<std::size_t>(i)];
            const double lo = 1.0;
            double hi = std::max(rec.permittivity.maxCoeff(), pred.maxCoeff());
            if (!(hi > lo)) hi = lo + 1.0;
            const auto base = scene_name(rec.id);
            emit_heatmap(rec.permittivity, side, lo, hi, dir / (base + "_gt" + ext), hopt);
            emit_heatmap(pred, side, lo, hi, dir / (base + "_pred" + ext), hopt);
        }
        spdlog::info("wrote {} heatmaps to {}", 2 * n, dir.string());
    }
    write_run_manifest(args.out, "infer", config, inputs, outputs,
                       {{"method", model ? "model" : "bp"}, {"emit_heatmaps", args.emit_heatmaps}});
    std::printf("reconstructed %d scenes (%s)\n", n, model ? "model" : "bp");
}

void cmd_eval(const RunConfig& config, const EvalArgs& args) {
    if (!args.model && !args.baseline_bp && !args.oracle)
        fail(Errc::config_error, "eval needs --model, --baseline bp or --oracle");
    const auto ds_path = required_path(args.dataset, config.paths.dataset, "dataset");
    const auto ds = read_dataset(ds_path);
    const auto ops = assemble_green(ds.grid(), ds.meta.layout, ds.physics());
    json inputs = {{"dataset", file_sha256(ds_path / "manifest.json")}};
    const auto options = make_eval_options(config);

    std::vector<std::pair<std::string, Predictor>> predictors;
    std::optional<CurrentEstimator> model;
    if (args.model) {
        model = load_model(*args.model, ds);
        inputs["model"] = file_sha256(*args.model);
        predictors.emplace_back("model", [&](const DatasetRecord&, const CRowMatrix& measured) {
            return infer(*model, measured, ops, ds.incident).fused;
        });
    }
    if (args.baseline_bp)
        predictors.emplace_back("bp", [&](const DatasetRecord&, const CRowMatrix& measured) {
            return bp_reconstruct(measured, ops, ds.incident).fused;
        });
    if (args.oracle)
        predictors.emplace_back("oracle", [](const DatasetRecord& rec, const CRowMatrix&) { return rec.permittivity; });

    fs::create_directories(args.out);
    json outputs = json::object();
    std::vector<MetricReport> reports;
    for (const auto& [name, predictor] : predictors) {
        auto report = evaluate(ds, predictor, options);
        report.metadata["predictor"] = name;
        const auto csv = report_csv(report);
        const auto file = "metrics_" + name + ".csv";
        write_text(args.out / file, csv);
        outputs[file] = sha256_hex(csv);
        for (const auto& f : report.failures) spdlog::warn("{}: scene {} failed: {}", name, f.id, f.reason);
        reports.push_back(std::move(report));
    }

    std::ostringstream summary;
    summary << "metric";
    for (const auto& p : predictors) summary << ',' << p.first;
    summary << '\n';
    const auto row = [&](const char* label, auto get) {
        summary << label;
        for (const auto& r : reports) summary << ',' << format_real(get(r));
        summary << '\n';
    };
    row("mse_rel_mean", [](const MetricReport& r) { return r.mean.mse_rel; });
    row("mse_rel_std", [](const MetricReport& r) { return r.std.mse_rel; });
    row("ssim_mean", [](const MetricReport& r) { return r.mean.ssim; });
    row("ssim_std", [](const MetricReport& r) { return r.std.ssim; });
    row("psnr_mean", [](const MetricReport& r) { return r.mean.psnr; });
    row("psnr_std", [](const MetricReport& r) { return r.std.psnr; });
    row("scenes", [](const MetricReport& r) { return static_cast<double>(r.scenes.size()); });
    row("failures", [](const MetricReport& r) { return static_cast<double>(r.failures.size()); });
    write_text(args.out / "summary.csv", summary.str());
    outputs["summary.csv"] = sha256_hex(summary.str());
    write_run_manifest(args.out, "eval", config, inputs, outputs, {{"metadata", reports.front().metadata}});
    std::fputs(summary.str().c_str(), stdout);
}

}  // namespace eisp::cli
