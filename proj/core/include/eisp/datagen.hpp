#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eisp/blob.hpp"
#include "eisp/grid.hpp"

namespace eisp {

struct Interval {
    double lo{0.0};
    double hi{0.0};
};

struct CylinderSceneParams {
    int count_min{1};
    int count_max{3};
    Interval radius_m{0.15, 0.4};
    Interval permittivity{1.0, 1.5};
    /// Centers are drawn from [-e, e]^2. Unset: e = half_side - radius, so each
    /// cylinder lies fully inside the region of interest.
    std::optional<double> center_extent;
    int max_retries{100};
    std::uint64_t seed{0};

    void validate() const;
};

/// Random union of dielectric cylinders, rasterized by cell-center membership.
/// Overlaps take the maximum permittivity. Deterministic in params.seed.
Scene gen_cylinders(const CylinderSceneParams& params, const GridSpec& grid);

struct ByteRaster {
    int rows{0};
    int cols{0};
    std::vector<std::uint8_t> pixels;  ///< row-major, row 0 at the top

    [[nodiscard]] std::uint8_t at(int r, int c) const { return pixels[static_cast<std::size_t>(r * cols + c)]; }
    friend bool operator==(const ByteRaster&, const ByteRaster&) = default;
};

inline constexpr std::uint32_t idx3_magic = 0x00000803;

/// IDX3 unsigned-byte image file (MNIST layout).
std::vector<ByteRaster> parse_idx(std::span<const std::uint8_t> bytes);
Bytes write_idx(std::span<const ByteRaster> rasters);

/// Procedural handwritten-style digits (28 x 28): glyph strokes with random affine
/// jitter, stroke width and intensity, rendered with anti-aliasing.
std::vector<ByteRaster> synth_digits(int count, std::uint64_t seed);
ByteRaster render_digit(int digit, std::uint64_t seed);

/// Bilinear resize (pixel-center aligned) onto the M x M grid, then
/// eps = eps_min + p / 255 * (eps_max - eps_min) for p > 0 and eps = 1 for p = 0.
/// The image is upright: raster row 0 maps to the top grid row (largest y).
Scene raster_to_scene(const ByteRaster& raster, const GridSpec& grid, double eps_min, double eps_max);

/// Adds ratio * ||E_t|| / sqrt(2 N_r) * (n_re + i n_im) to each transmitter row,
/// with n_re, n_im i.i.d. standard normal.
CRowMatrix add_noise(const CRowMatrix& scattered, double ratio, std::uint64_t seed);

}  // namespace eisp
