#include <algorithm>
#include <cstdio>

#include <CLI11.hpp>
#include <spdlog/sinks/basic_file_sink.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "eisp_cli/commands.hpp"

namespace eisp::cli {

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out;
    bool verbose{false};
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "JSON run configuration (defaults apply when omitted)");
    cmd->add_option("--seed", c.seed, "override the config seed");
    cmd->add_option("--threads", c.threads, "cap on worker threads; 1 gives bit-reproducible runs")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", c.out, "output directory (default paths.out)");
    cmd->add_flag("-v,--verbose", c.verbose, "log progress to stderr");
}

RunConfig resolve(const Common& c) {
    RunConfig config = c.config.empty() ? parse_config(nlohmann::json::object()) : load_config(c.config);
    if (c.seed) config.seed = *c.seed;
    if (c.threads) config.threads = *c.threads;
    if (!c.out.empty()) config.paths.out = c.out;
    return config;
}

/// Console sink plus a timestamped sidecar log in the output directory.
void setup_logging(const fs::path& out, bool verbose) {
    std::vector<spdlog::sink_ptr> sinks;
    auto console = std::make_shared<spdlog::sinks::stderr_sink_mt>();
    console->set_level(verbose ? spdlog::level::info : spdlog::level::warn);
    console->set_pattern("%l: %v");
    sinks.push_back(console);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (!ec) {
        auto file = std::make_shared<spdlog::sinks::basic_file_sink_mt>((out / "run.log").string(), true);
        file->set_level(spdlog::level::info);
        sinks.push_back(file);
    }
    auto logger = std::make_shared<spdlog::logger>("eisp", sinks.begin(), sinks.end());
    logger->set_level(spdlog::level::info);
    logger->flush_on(spdlog::level::info);
    spdlog::set_default_logger(logger);
    set_warning_handler([](std::string_view msg) { spdlog::warn("{}", msg); });
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Physics-embedded electromagnetic inverse scattering toolkit", "eisp"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "eisp 0.1.0");

    Common common;
    bool flip = false;
    auto* validate = app.add_subcommand("validate-physics", "check the forward solver against analytic oracles");
    add_common(validate, common);
    validate->add_flag("--flip-self-term", flip)->group("");

    std::optional<int> scenes;
    std::optional<double> noise;
    auto* gen = app.add_subcommand("gen-data", "simulate a dataset of scenes and measurements");
    add_common(gen, common);
    gen->add_option("--scenes", scenes, "number of scenes")->check(CLI::PositiveNumber);
    gen->add_option("--noise", noise, "measurement noise ratio")->check(CLI::NonNegativeNumber);

    std::string dataset, model, resume, baseline;
    std::optional<int> epochs;
    auto* tr = app.add_subcommand("train", "train per-transmitter current estimators");
    add_common(tr, common);
    tr->add_option("--dataset", dataset, "dataset directory (default paths.dataset)");
    tr->add_option("--resume", resume, "checkpoint to resume from");
    tr->add_option("--epochs", epochs, "override optimizer.epochs")->check(CLI::NonNegativeNumber);

    bool heatmaps = false;
    auto* inf = app.add_subcommand("infer", "reconstruct permittivity maps");
    add_common(inf, common);
    inf->add_option("--dataset", dataset, "dataset directory (default paths.dataset)");
    inf->add_option("--model", model, "trained weights file");
    inf->add_option("--baseline", baseline, "use a baseline instead of a model")->check(CLI::IsMember({"bp"}));
    inf->add_flag("--emit-heatmaps", heatmaps, "write ground-truth and predicted heatmaps per scene");

    std::optional<int> trials;
    bool oracle = false;
    auto* ev = app.add_subcommand("eval", "score reconstructions against ground truth");
    add_common(ev, common);
    ev->add_option("--dataset", dataset, "dataset directory (default paths.dataset)");
    ev->add_option("--model", model, "trained weights file");
    ev->add_option("--baseline", baseline, "also score a baseline")->check(CLI::IsMember({"bp"}));
    ev->add_option("--trials", trials, "independent noise draws per scene")->check(CLI::PositiveNumber);
    ev->add_option("--noise", noise, "redraw test noise at this ratio")->check(CLI::NonNegativeNumber);
    ev->add_flag("--oracle", oracle, "score the ground truth itself");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        RunConfig config = resolve(common);
        if (gen->parsed()) {
            if (scenes) config.scenes.count = *scenes;
            if (noise) config.noise_ratio = *noise;
        }
        if (tr->parsed() && epochs) config.optimizer.epochs = *epochs;
        if (ev->parsed()) {
            if (trials) config.eval.trials = *trials;
            if (noise) config.eval.noise_ratio = *noise;
        }
        const fs::path out = config.paths.out;
        setup_logging(out, common.verbose);
        if (!model.empty()) config.paths.model = model;

        if (validate->parsed()) {
            const auto checks = cmd_validate_physics(config, out, flip);
            bool ok = true;
            for (const auto& c : checks) {
                if (!c.passed()) {
                    ok = false;
                    std::fprintf(stderr, "physics check failed: %s\n", c.name.c_str());
                }
            }
            return ok ? exit_ok : exit_failure;
        }
        if (gen->parsed()) {
            cmd_gen_data(config, out);
        } else if (tr->parsed()) {
            cmd_train(config, {dataset, out, resume.empty() ? std::nullopt : std::optional<fs::path>(resume)});
        } else if (inf->parsed()) {
            InferArgs a;
            a.dataset = dataset;
            if (!model.empty()) a.model = model;
            a.baseline_bp = baseline == "bp";
            a.emit_heatmaps = heatmaps;
            a.out = out;
            cmd_infer(config, a);
        } else if (ev->parsed()) {
            EvalArgs a;
            a.dataset = dataset;
            if (!model.empty()) a.model = model;
            a.baseline_bp = baseline == "bp";
            a.oracle = oracle;
            a.out = out;
            cmd_eval(config, a);
        }
        return exit_ok;
    } catch (const Error& e) {
        std::fprintf(stderr, "eisp: %s\n", e.what());
        return e.code() == Errc::config_error ? exit_usage : exit_failure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "eisp: %s\n", e.what());
        return exit_failure;
    }
}

}  // namespace eisp::cli
