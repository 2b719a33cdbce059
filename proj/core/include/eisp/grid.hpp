#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "eisp/error.hpp"
#include "eisp/types.hpp"

namespace eisp {

/// Uniform M x M partition of a square region of interest centered at the origin.
/// Cells are ordered row-major with x varying fastest: index = row * M + col.
class GridSpec {
public:
    GridSpec(double side_length_m, int cells_per_side);

    [[nodiscard]] double side_length() const noexcept { return side_; }
    [[nodiscard]] int cells_per_side() const noexcept { return m_; }
    [[nodiscard]] int cell_count() const noexcept { return m_ * m_; }
    [[nodiscard]] double spacing() const noexcept { return side_ / m_; }
    [[nodiscard]] double cell_area() const noexcept { return spacing() * spacing(); }
    [[nodiscard]] double half_side() const noexcept { return 0.5 * side_; }
    [[nodiscard]] double half_diagonal() const noexcept { return side_ / std::numbers::sqrt2; }

    [[nodiscard]] Point2 center(int index) const { return centers_[static_cast<std::size_t>(index)]; }
    [[nodiscard]] std::span<const Point2> centers() const noexcept { return centers_; }
    [[nodiscard]] int index(int row, int col) const noexcept { return row * m_ + col; }

    /// True iff p lies in the closed region-of-interest square.
    [[nodiscard]] bool contains(Point2 p) const noexcept {
        return std::abs(p.x) <= half_side() && std::abs(p.y) <= half_side();
    }

    friend bool operator==(const GridSpec& a, const GridSpec& b) noexcept {
        return a.side_ == b.side_ && a.m_ == b.m_;
    }

private:
    double side_;
    int m_;
    std::vector<Point2> centers_;
};

GridSpec make_grid(double side_length_m, int cells_per_side);

inline constexpr double speed_of_light = 299792458.0;

/// Operating frequency; the wavenumber k0 = 2*pi*f/c is always derived, never stored.
/// (Some texts call k0 "the wavelength"; here it is the free-space wavenumber in rad/m.)
class PhysicsConfig {
public:
    explicit PhysicsConfig(double frequency_hz = 400e6);

    [[nodiscard]] double frequency() const noexcept { return f_; }
    [[nodiscard]] double wavenumber() const noexcept { return 2.0 * std::numbers::pi * f_ / speed_of_light; }
    [[nodiscard]] double wavelength() const noexcept { return speed_of_light / f_; }

private:
    double f_;
};

enum class IncidentModel { LineSource, PlaneWave };

struct SensorLayout {
    std::vector<Point2> transmitters;
    std::vector<Point2> receivers;
    IncidentModel incident_model{IncidentModel::LineSource};

    [[nodiscard]] int n_transmitters() const noexcept { return static_cast<int>(transmitters.size()); }
    [[nodiscard]] int n_receivers() const noexcept { return static_cast<int>(receivers.size()); }

    /// Throws invalid-geometry if any sensor lies inside (or on) the region of interest.
    void validate(const GridSpec& grid) const;
};

struct CircleLayoutOptions {
    double roi_side_m{2.0};
    double tx_offset_rad{0.0};
    double rx_offset_rad{0.0};
};

SensorLayout circle_layout(int n_tx, int n_rx, double radius_m, IncidentModel model,
                           const CircleLayoutOptions& options = {});

/// Discretized relative-permittivity map. The contrast xi = eps - 1 is derived on demand.
class Scene {
public:
    Scene(GridSpec grid, RVector permittivity);

    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
    [[nodiscard]] const RVector& permittivity() const noexcept { return eps_; }
    [[nodiscard]] RVector contrast() const { return eps_.array() - 1.0; }

private:
    GridSpec grid_;
    RVector eps_;
};

Scene uniform_scene(const GridSpec& grid, double eps);

/// Mean-pools a scene onto a coarser grid; target_cells must divide the current resolution.
Scene downsample_scene(const Scene& scene, int target_cells);

/// Same block-mean pooling applied to any per-cell complex field (row-major M x M).
CVector downsample_field(const CVector& values, int cells_per_side, int target_cells);

enum class FieldRole { Incident, Total, Scattered, Current };

struct ComplexField {
    CVector values;
    FieldRole role{FieldRole::Current};

    [[nodiscard]] Eigen::Index length() const noexcept { return values.size(); }
};

}  // namespace eisp
