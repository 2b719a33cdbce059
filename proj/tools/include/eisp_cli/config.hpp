#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eisp/dataset.hpp"
#include "eisp/eval.hpp"
#include "eisp/inversion.hpp"

namespace eisp::cli {

/// Resolved run configuration. Every field has a default, so `{}` is a valid config file.
/// Unknown keys anywhere in the file are a config-error naming the key's JSON path.
struct RunConfig {
    std::uint64_t seed{0};
    int threads{1};

    struct Physics {
        double frequency_hz{400e6};
    } physics;

    struct Grid {
        double side_m{2.0};
        int m_fwd{128};
        int m_inv{32};
    } grid;

    struct Layout {
        int n_transmitters{16};
        int n_receivers{32};
        double radius_m{3.0};
        std::string incident{"line_source"};  ///< line_source | plane_wave
        double tx_offset_rad{0.0};
        double rx_offset_rad{0.0};
    } layout;

    struct Cylinders {
        int count_min{1};
        int count_max{3};
        double radius_min_m{0.15};
        double radius_max_m{0.4};
        double eps_min{1.0};
        double eps_max{1.5};
        std::optional<double> center_extent_m;
        int max_retries{100};
    };

    struct Raster {
        std::string idx_path;  ///< empty: procedural digits
        double eps_min{2.0};
        double eps_max{2.5};
    };

    struct Scenes {
        int count{100};
        std::string source{"cylinders"};  ///< cylinders | digits | idx
        Cylinders cylinders;
        Raster raster;
    } scenes;

    double noise_ratio{0.05};
    std::string supervision{"resolve"};  ///< resolve | downsample

    struct Model {
        int hidden_width{256};
        int hidden_layers{7};
        int n_frequencies{10};
    } model;

    LossWeights loss;
    OptimizerConfig optimizer;

    struct Train {
        bool average_over_transmitters{false};
        int checkpoint_every{0};
    } train;

    struct Eval {
        int trials{1};
        std::optional<double> noise_ratio;
        int ssim_window{7};
    } eval;

    struct Heatmaps {
        std::string format{"ppm"};  ///< ppm | png
        int pixel_scale{4};
    } heatmaps;

    struct Validate {
        std::vector<int> mie_cells{64, 128};
        std::vector<double> mie_tolerance{0.03, 0.015};
        double mie_radius_m{0.5};
        double mie_eps{1.5};
        double reciprocity_tolerance{1e-8};
        int roundtrip_scenes{10};
        double roundtrip_tolerance{1e-8};
    } validate;

    struct Paths {
        std::string dataset;
        std::string model;
        std::string out{"eisp-out"};
    } paths;
};

/// Parses a config document; throws config-error on unknown keys, wrong types or invalid values.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

SensorLayout make_layout(const RunConfig& config);
DatasetConfig make_dataset_config(const RunConfig& config);
SceneSource make_scene_source(const RunConfig& config);
EstimatorConfig make_estimator_config(const RunConfig& config, const Dataset& dataset);
TrainConfig make_train_config(const RunConfig& config);
EvalOptions make_eval_options(const RunConfig& config);

/// Config-error naming the first field where the dataset disagrees with the config geometry.
void check_geometry(const RunConfig& config, const DatasetMeta& meta);

}  // namespace eisp::cli
