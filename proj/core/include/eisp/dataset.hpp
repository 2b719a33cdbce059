#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "eisp/datagen.hpp"
#include "eisp/forward.hpp"

namespace eisp {

/// How ground-truth currents on the inversion grid are produced.
enum class Supervision {
    Resolve,     ///< forward solve again on the downsampled scene (fields exactly consistent)
    Downsample,  ///< block-mean the fine-grid current and total field
};

struct RasterSource {
    std::vector<ByteRaster> rasters;
    double eps_min{2.0};
    double eps_max{2.5};
};

using SceneSource = std::variant<CylinderSceneParams, RasterSource>;

struct DatasetConfig {
    int n_scenes{1};
    double side_m{2.0};
    int m_fwd{128};
    int m_inv{32};
    SensorLayout layout;
    PhysicsConfig physics;
    double noise_ratio{0.05};
    std::uint64_t seed{0};
    Supervision supervision{Supervision::Resolve};
    SolveOptions solve;
    int threads{1};
};

struct DatasetRecord {
    int id{0};
    RVector permittivity;        ///< M_inv^2
    CRowMatrix current;          ///< N x M_inv^2
    CRowMatrix total;            ///< N x M_inv^2
    CRowMatrix scattered;        ///< N x N_r, G^s J on the inversion grid
    CRowMatrix clean_measured;   ///< N x N_r, simulated on the fine grid
    CRowMatrix measured;         ///< clean_measured plus noise
};

struct SkippedRecord {
    int id{0};
    std::string reason;
};

struct DatasetMeta {
    int schema_version{1};
    double side_m{2.0};
    int m_fwd{0};
    int m_inv{0};
    SensorLayout layout;
    double frequency_hz{400e6};
    double noise_ratio{0.0};
    std::uint64_t seed{0};
    Supervision supervision{Supervision::Resolve};
    std::string source;  ///< JSON description of the scene source
    std::vector<SkippedRecord> skipped;
};

struct Dataset {
    DatasetMeta meta;
    CRowMatrix incident;  ///< N x M_inv^2, shared by all records
    std::vector<DatasetRecord> records;

    [[nodiscard]] GridSpec grid() const { return make_grid(meta.side_m, meta.m_inv); }
    [[nodiscard]] PhysicsConfig physics() const { return PhysicsConfig(meta.frequency_hz); }
    [[nodiscard]] int n_transmitters() const { return meta.layout.n_transmitters(); }
    [[nodiscard]] int n_receivers() const { return meta.layout.n_receivers(); }
    [[nodiscard]] std::size_t size() const { return records.size(); }
};

inline constexpr int dataset_schema_version = 1;

/// Hex SHA-256 over the canonical byte encoding of a layout.
std::string layout_hash(const SensorLayout& layout);

std::uint64_t record_scene_seed(std::uint64_t dataset_seed, int record_id);
std::uint64_t record_noise_seed(std::uint64_t dataset_seed, int record_id, int trial = 0);

using ProgressFn = std::function<void(int done, int total)>;

/// Records failing the forward solve are skipped and listed in meta.skipped.
Dataset build_dataset(const DatasetConfig& config, const SceneSource& source, const ProgressFn& progress = {});

/// Redraws the measurement noise of every record from its clean fine-grid field.
void reseed_noise(Dataset& dataset, double ratio, int trial);

/// Restriction to a subset of transmitters (layout, incident fields and all per-tx arrays).
Dataset select_transmitters(const Dataset& dataset, std::span<const int> tx);

/// Directory container: manifest.json plus one little-endian float64 blob per array.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace eisp
