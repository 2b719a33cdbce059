#include "eisp_cli/config.hpp"

#include <fstream>
#include <set>

#include "eisp/blob.hpp"

namespace eisp::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) { fail(Errc::config_error, path + ": " + what); }

/// Reads the keys of one JSON object and remembers which were consumed.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) bad(path_.empty() ? "<root>" : path_, "expected an object");
    }

    Section sub(const std::string& key) {
        seen_.insert(key);
        static const json empty = json::object();
        const auto it = node_.find(key);
        return Section(it == node_.end() ? empty : *it, name(key));
    }

    void get(const std::string& key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) bad(name(key), "expected a number");
            out = v->get<double>();
        }
    }
    void get(const std::string& key, int& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer()) bad(name(key), "expected an integer");
            const auto x = v->get<std::int64_t>();
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                bad(name(key), "out of range");
            out = static_cast<int>(x);
        }
    }
    void get(const std::string& key, std::uint64_t& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_unsigned()) bad(name(key), "expected a non-negative integer");
            out = v->get<std::uint64_t>();
        }
    }
    void get(const std::string& key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) bad(name(key), "expected true or false");
            out = v->get<bool>();
        }
    }
    void get(const std::string& key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) bad(name(key), "expected a string");
            out = v->get<std::string>();
        }
    }
    void get(const std::string& key, std::optional<double>& out) {
        if (const json* v = find(key)) {
            if (v->is_null()) {
                out.reset();
            } else {
                if (!v->is_number()) bad(name(key), "expected a number or null");
                out = v->get<double>();
            }
        }
    }
    template <typename T>
    void get(const std::string& key, std::vector<T>& out) {
        if (const json* v = find(key)) {
            if (!v->is_array()) bad(name(key), "expected an array");
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_number() || (std::is_integral_v<T> && !e.is_number_integer()))
                    bad(name(key), "unexpected element type");
                out.push_back(e.get<T>());
            }
        }
    }

    /// Rejects every key that was never asked for.
    void finish() const {
        for (const auto& [key, _] : node_.items())
            if (!seen_.count(key)) bad(name(key), "unknown key");
    }

    [[nodiscard]] std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

void one_of(const std::string& path, const std::string& value, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (value == a) return;
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    bad(path, "'" + value + "' is not one of " + list);
}

void positive(const std::string& path, double v) {
    if (!(v > 0.0)) bad(path, "must be positive");
}

template <typename Fn>
void rethrow_as_config(const std::string& path, Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        bad(path, e.what());
    }
}

CylinderSceneParams cylinder_params(const RunConfig& c) {
    const auto& s = c.scenes.cylinders;
    CylinderSceneParams p;
    p.count_min = s.count_min;
    p.count_max = s.count_max;
    p.radius_m = {s.radius_min_m, s.radius_max_m};
    p.permittivity = {s.eps_min, s.eps_max};
    p.center_extent = s.center_extent_m;
    p.max_retries = s.max_retries;
    p.seed = c.seed;
    return p;
}

void validate(const RunConfig& c) {
    if (c.threads < 1) bad("threads", "must be at least 1");
    positive("physics.frequency_hz", c.physics.frequency_hz);
    positive("grid.side_m", c.grid.side_m);
    positive("grid.m_fwd", c.grid.m_fwd);
    positive("grid.m_inv", c.grid.m_inv);
    positive("layout.n_transmitters", c.layout.n_transmitters);
    positive("layout.n_receivers", c.layout.n_receivers);
    positive("layout.radius_m", c.layout.radius_m);
    one_of("layout.incident", c.layout.incident, {"line_source", "plane_wave"});
    positive("scenes.count", c.scenes.count);
    one_of("scenes.source", c.scenes.source, {"cylinders", "digits", "idx"});
    if (c.scenes.source == "idx" && c.scenes.raster.idx_path.empty())
        bad("scenes.raster.idx_path", "required when scenes.source is idx");
    if (!(c.scenes.raster.eps_min >= 1.0 && c.scenes.raster.eps_max >= c.scenes.raster.eps_min))
        bad("scenes.raster", "need 1 <= eps_min <= eps_max");
    rethrow_as_config("scenes.cylinders", [&] { cylinder_params(c).validate(); });
    if (!(c.noise_ratio >= 0.0)) bad("noise_ratio", "must be non-negative");
    one_of("supervision", c.supervision, {"resolve", "downsample"});
    positive("model.hidden_width", c.model.hidden_width);
    positive("model.hidden_layers", c.model.hidden_layers);
    positive("model.n_frequencies", c.model.n_frequencies);
    rethrow_as_config("loss", [&] { c.loss.validate(); });
    rethrow_as_config("optimizer", [&] { c.optimizer.validate(); });
    if (c.train.checkpoint_every < 0) bad("train.checkpoint_every", "must be non-negative");
    positive("eval.trials", c.eval.trials);
    if (c.eval.noise_ratio && !(*c.eval.noise_ratio >= 0.0)) bad("eval.noise_ratio", "must be non-negative");
    positive("eval.ssim_window", c.eval.ssim_window);
    one_of("heatmaps.format", c.heatmaps.format, {"ppm", "png"});
    positive("heatmaps.pixel_scale", c.heatmaps.pixel_scale);
    const auto& v = c.validate;
    if (v.mie_cells.size() != v.mie_tolerance.size())
        bad("validate.mie_tolerance", "needs one entry per validate.mie_cells entry");
    for (int m : v.mie_cells) positive("validate.mie_cells", m);
    positive("validate.mie_radius_m", v.mie_radius_m);
    if (!(v.mie_eps >= 1.0)) bad("validate.mie_eps", "must be at least 1");
    if (v.roundtrip_scenes < 0) bad("validate.roundtrip_scenes", "must be non-negative");
}

}  // namespace

RunConfig parse_config(const json& doc) {
    RunConfig c;
    Section root(doc, "");
    root.get("seed", c.seed);
    root.get("threads", c.threads);
    {
        auto s = root.sub("physics");
        s.get("frequency_hz", c.physics.frequency_hz);
        s.finish();
    }
    {
        auto s = root.sub("grid");
        s.get("side_m", c.grid.side_m);
        s.get("m_fwd", c.grid.m_fwd);
        s.get("m_inv", c.grid.m_inv);
        s.finish();
    }
    {
        auto s = root.sub("layout");
        s.get("n_transmitters", c.layout.n_transmitters);
        s.get("n_receivers", c.layout.n_receivers);
        s.get("radius_m", c.layout.radius_m);
        s.get("incident", c.layout.incident);
        s.get("tx_offset_rad", c.layout.tx_offset_rad);
        s.get("rx_offset_rad", c.layout.rx_offset_rad);
        s.finish();
    }
    {
        auto s = root.sub("scenes");
        s.get("count", c.scenes.count);
        s.get("source", c.scenes.source);
        auto cy = s.sub("cylinders");
        auto& p = c.scenes.cylinders;
        cy.get("count_min", p.count_min);
        cy.get("count_max", p.count_max);
        cy.get("radius_min_m", p.radius_min_m);
        cy.get("radius_max_m", p.radius_max_m);
        cy.get("eps_min", p.eps_min);
        cy.get("eps_max", p.eps_max);
        cy.get("center_extent_m", p.center_extent_m);
        cy.get("max_retries", p.max_retries);
        cy.finish();
        auto r = s.sub("raster");
        r.get("idx_path", c.scenes.raster.idx_path);
        r.get("eps_min", c.scenes.raster.eps_min);
        r.get("eps_max", c.scenes.raster.eps_max);
        r.finish();
        s.finish();
    }
    root.get("noise_ratio", c.noise_ratio);
    root.get("supervision", c.supervision);
    {
        auto s = root.sub("model");
        s.get("hidden_width", c.model.hidden_width);
        s.get("hidden_layers", c.model.hidden_layers);
        s.get("n_frequencies", c.model.n_frequencies);
        s.finish();
    }
    {
        auto s = root.sub("loss");
        s.get("curr", c.loss.curr);
        s.get("perm", c.loss.perm);
        s.get("scat", c.loss.scat);
        s.finish();
    }
    {
        auto s = root.sub("optimizer");
        auto& o = c.optimizer;
        s.get("learning_rate", o.learning_rate);
        s.get("beta1", o.beta1);
        s.get("beta2", o.beta2);
        s.get("epsilon", o.epsilon);
        s.get("step_size", o.step_size);
        s.get("gamma", o.gamma);
        s.get("clip_norm", o.clip_norm);
        s.get("epochs", o.epochs);
        s.get("batch_size", o.batch_size);
        s.finish();
    }
    {
        auto s = root.sub("train");
        s.get("average_over_transmitters", c.train.average_over_transmitters);
        s.get("checkpoint_every", c.train.checkpoint_every);
        s.finish();
    }
    {
        auto s = root.sub("eval");
        s.get("trials", c.eval.trials);
        s.get("noise_ratio", c.eval.noise_ratio);
        s.get("ssim_window", c.eval.ssim_window);
        s.finish();
    }
    {
        auto s = root.sub("heatmaps");
        s.get("format", c.heatmaps.format);
        s.get("pixel_scale", c.heatmaps.pixel_scale);
        s.finish();
    }
    {
        auto s = root.sub("validate");
        auto& v = c.validate;
        s.get("mie_cells", v.mie_cells);
        s.get("mie_tolerance", v.mie_tolerance);
        s.get("mie_radius_m", v.mie_radius_m);
        s.get("mie_eps", v.mie_eps);
        s.get("reciprocity_tolerance", v.reciprocity_tolerance);
        s.get("roundtrip_scenes", v.roundtrip_scenes);
        s.get("roundtrip_tolerance", v.roundtrip_tolerance);
        s.finish();
    }
    {
        auto s = root.sub("paths");
        s.get("dataset", c.paths.dataset);
        s.get("model", c.paths.model);
        s.get("out", c.paths.out);
        s.finish();
    }
    root.finish();
    validate(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::config_error, "cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        fail(Errc::config_error, path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

json to_json(const RunConfig& c) {
    const auto& cy = c.scenes.cylinders;
    const auto& o = c.optimizer;
    const auto& v = c.validate;
    json j;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["physics"] = {{"frequency_hz", c.physics.frequency_hz}};
    j["grid"] = {{"side_m", c.grid.side_m}, {"m_fwd", c.grid.m_fwd}, {"m_inv", c.grid.m_inv}};
    j["layout"] = {{"n_transmitters", c.layout.n_transmitters}, {"n_receivers", c.layout.n_receivers},
                   {"radius_m", c.layout.radius_m},           {"incident", c.layout.incident},
                   {"tx_offset_rad", c.layout.tx_offset_rad}, {"rx_offset_rad", c.layout.rx_offset_rad}};
    j["scenes"] = {
        {"count", c.scenes.count},
        {"source", c.scenes.source},
        {"cylinders",
         {{"count_min", cy.count_min},
          {"count_max", cy.count_max},
          {"radius_min_m", cy.radius_min_m},
          {"radius_max_m", cy.radius_max_m},
          {"eps_min", cy.eps_min},
          {"eps_max", cy.eps_max},
          {"center_extent_m", cy.center_extent_m ? json(*cy.center_extent_m) : json(nullptr)},
          {"max_retries", cy.max_retries}}},
        {"raster",
         {{"idx_path", c.scenes.raster.idx_path},
          {"eps_min", c.scenes.raster.eps_min},
          {"eps_max", c.scenes.raster.eps_max}}}};
    j["noise_ratio"] = c.noise_ratio;
    j["supervision"] = c.supervision;
    j["model"] = {{"hidden_width", c.model.hidden_width},
                  {"hidden_layers", c.model.hidden_layers},
                  {"n_frequencies", c.model.n_frequencies}};
    j["loss"] = {{"curr", c.loss.curr}, {"perm", c.loss.perm}, {"scat", c.loss.scat}};
    j["optimizer"] = {{"learning_rate", o.learning_rate}, {"beta1", o.beta1},         {"beta2", o.beta2},
                      {"epsilon", o.epsilon},             {"step_size", o.step_size}, {"gamma", o.gamma},
                      {"clip_norm", o.clip_norm},         {"epochs", o.epochs},       {"batch_size", o.batch_size}};
    j["train"] = {{"average_over_transmitters", c.train.average_over_transmitters},
                  {"checkpoint_every", c.train.checkpoint_every}};
    j["eval"] = {{"trials", c.eval.trials},
                 {"noise_ratio", c.eval.noise_ratio ? json(*c.eval.noise_ratio) : json(nullptr)},
                 {"ssim_window", c.eval.ssim_window}};
    j["heatmaps"] = {{"format", c.heatmaps.format}, {"pixel_scale", c.heatmaps.pixel_scale}};
    j["validate"] = {{"mie_cells", v.mie_cells},
                     {"mie_tolerance", v.mie_tolerance},
                     {"mie_radius_m", v.mie_radius_m},
                     {"mie_eps", v.mie_eps},
                     {"reciprocity_tolerance", v.reciprocity_tolerance},
                     {"roundtrip_scenes", v.roundtrip_scenes},
                     {"roundtrip_tolerance", v.roundtrip_tolerance}};
    j["paths"] = {{"dataset", c.paths.dataset}, {"model", c.paths.model}, {"out", c.paths.out}};
    return j;
}

SensorLayout make_layout(const RunConfig& c) {
    CircleLayoutOptions opt;
    opt.roi_side_m = c.grid.side_m;
    opt.tx_offset_rad = c.layout.tx_offset_rad;
    opt.rx_offset_rad = c.layout.rx_offset_rad;
    const auto model = c.layout.incident == "plane_wave" ? IncidentModel::PlaneWave : IncidentModel::LineSource;
    return circle_layout(c.layout.n_transmitters, c.layout.n_receivers, c.layout.radius_m, model, opt);
}

DatasetConfig make_dataset_config(const RunConfig& c) {
    DatasetConfig d;
    d.n_scenes = c.scenes.count;
    d.side_m = c.grid.side_m;
    d.m_fwd = c.grid.m_fwd;
    d.m_inv = c.grid.m_inv;
    d.layout = make_layout(c);
    d.physics = PhysicsConfig(c.physics.frequency_hz);
    d.noise_ratio = c.noise_ratio;
    d.seed = c.seed;
    d.supervision = c.supervision == "downsample" ? Supervision::Downsample : Supervision::Resolve;
    d.threads = c.threads;
    return d;
}

SceneSource make_scene_source(const RunConfig& c) {
    if (c.scenes.source == "cylinders") return cylinder_params(c);
    RasterSource r;
    r.eps_min = c.scenes.raster.eps_min;
    r.eps_max = c.scenes.raster.eps_max;
    if (c.scenes.source == "digits") {
        r.rasters = synth_digits(c.scenes.count, c.seed);
    } else {
        r.rasters = parse_idx(read_file(c.scenes.raster.idx_path));
        if (static_cast<int>(r.rasters.size()) > c.scenes.count) r.rasters.resize(static_cast<std::size_t>(c.scenes.count));
    }
    return r;
}

EstimatorConfig make_estimator_config(const RunConfig& c, const Dataset& dataset) {
    EstimatorConfig e;
    e.n_transmitters = dataset.n_transmitters();
    e.n_receivers = dataset.n_receivers();
    e.hidden_width = c.model.hidden_width;
    e.hidden_layers = c.model.hidden_layers;
    e.encoding.n_frequencies = c.model.n_frequencies;
    e.side_m = dataset.meta.side_m;
    return e;
}

TrainConfig make_train_config(const RunConfig& c) {
    TrainConfig t;
    t.optimizer = c.optimizer;
    t.weights = c.loss;
    t.seed = c.seed;
    t.threads = c.threads;
    t.average_over_transmitters = c.train.average_over_transmitters;
    t.checkpoint_every = c.train.checkpoint_every;
    return t;
}

EvalOptions make_eval_options(const RunConfig& c) {
    EvalOptions e;
    e.trials = c.eval.trials;
    e.noise_ratio = c.eval.noise_ratio;
    e.threads = c.threads;
    e.ssim.window = c.eval.ssim_window;
    return e;
}

void check_geometry(const RunConfig& c, const DatasetMeta& meta) {
    const auto mismatch = [](const std::string& field, const std::string& cfg, const std::string& ds) {
        fail(Errc::config_error, "dataset does not match config: " + field + " is " + cfg + " in the config but " +
                                     ds + " in the dataset");
    };
    if (c.grid.m_inv != meta.m_inv) mismatch("grid.m_inv", std::to_string(c.grid.m_inv), std::to_string(meta.m_inv));
    if (c.grid.side_m != meta.side_m) mismatch("grid.side_m", format_real(c.grid.side_m), format_real(meta.side_m));
    if (c.physics.frequency_hz != meta.frequency_hz)
        mismatch("physics.frequency_hz", format_real(c.physics.frequency_hz), format_real(meta.frequency_hz));
    if (c.layout.n_transmitters != meta.layout.n_transmitters())
        mismatch("layout.n_transmitters", std::to_string(c.layout.n_transmitters),
                 std::to_string(meta.layout.n_transmitters()));
    if (c.layout.n_receivers != meta.layout.n_receivers())
        mismatch("layout.n_receivers", std::to_string(c.layout.n_receivers),
                 std::to_string(meta.layout.n_receivers()));
    const auto expected = layout_hash(make_layout(c));
    const auto actual = layout_hash(meta.layout);
    if (expected != actual) mismatch("layout", expected.substr(0, 12), actual.substr(0, 12));
}

}  // namespace eisp::cli
