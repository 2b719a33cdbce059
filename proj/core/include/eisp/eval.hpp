#pragma once

#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eisp/blob.hpp"
#include "eisp/dataset.hpp"

namespace eisp {

/// Root-mean of squared per-cell relative errors ((pred - gt) / gt).
double mse_rel(const RVector& pred, const RVector& gt);

/// Default data range of a permittivity map: max(gt) - 1.
double contrast_range(const RVector& gt);

/// 10 log10(range^2 / MSE); +infinity when pred == gt.
double psnr(const RVector& pred, const RVector& gt, std::optional<double> data_range = std::nullopt);

struct SsimOptions {
    int window{7};
    double k1{0.01};
    double k2{0.03};
    std::optional<double> data_range;  ///< default contrast_range(gt)
};

/// Mean SSIM over all valid window positions of a square image with uniform windows
/// and population (1/n) moments.
double ssim(const RVector& pred, const RVector& gt, int side, const SsimOptions& options = {});

struct Rgb {
    std::uint8_t r, g, b;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// The 256-entry viridis table used by heatmaps.
const std::array<Rgb, 256>& heatmap_palette();

struct HeatmapOptions {
    int pixel_scale{1};  ///< nearest-neighbour upscaling factor
};

/// Binary PPM (P6) of a square map; value lo maps to palette[0], hi to palette[255],
/// linear in between, clamped outside. Grid row 0 (smallest y) is the bottom image row.
Bytes heatmap_ppm(const RVector& map, int side, double lo, double hi, const HeatmapOptions& options = {});

/// Writes PPM, or PNG when the path ends in ".png" and PNG support was built in.
void emit_heatmap(const RVector& map, int side, double lo, double hi, const std::filesystem::path& path,
                  const HeatmapOptions& options = {});

[[nodiscard]] bool png_supported() noexcept;

struct SceneMetrics {
    int scene_id{0};
    double mse_rel{0.0};
    double ssim{0.0};
    double psnr{0.0};
};

struct MetricSummary {
    double mse_rel{0.0};
    double ssim{0.0};
    double psnr{0.0};
};

struct MetricReport {
    std::vector<SceneMetrics> scenes;
    MetricSummary mean;
    MetricSummary std;
    int trials{1};
    std::optional<MetricSummary> trial_std;  ///< std over trials of the per-trial means
    std::vector<SkippedRecord> failures;
    std::map<std::string, std::string> metadata;
};

/// Maps (record, measured field) to a permittivity estimate on the inversion grid.
using Predictor = std::function<RVector(const DatasetRecord& record, const CRowMatrix& measured)>;

struct EvalOptions {
    int trials{1};
    std::optional<double> noise_ratio;  ///< redraw measurement noise at this ratio
    int threads{1};
    SsimOptions ssim;
};

/// Runs the predictor on every record and aggregates the three metrics. With trials > 1
/// or a noise override the measurement noise is redrawn per trial from the clean field;
/// per-scene values are trial means. Records whose prediction or metrics fail are listed
/// in failures and excluded from the aggregates.
MetricReport evaluate(const Dataset& dataset, const Predictor& predictor, const EvalOptions& options = {});

/// scene_id,mse_rel,ssim,psnr rows, then #mean, #std and (trials > 1) #trial_std rows.
std::string report_csv(const MetricReport& report);

}  // namespace eisp
