#include "eisp/grid.hpp"

#include <string>

namespace eisp {

GridSpec::GridSpec(double side_length_m, int cells_per_side) : side_(side_length_m), m_(cells_per_side) {
    require(side_length_m > 0.0 && std::isfinite(side_length_m), Errc::invalid_argument,
            "grid side length must be positive, got " + std::to_string(side_length_m));
    require(cells_per_side >= 2, Errc::invalid_argument,
            "grid needs at least 2 cells per side, got " + std::to_string(cells_per_side));
    const double h = spacing();
    centers_.reserve(static_cast<std::size_t>(m_) * m_);
    for (int row = 0; row < m_; ++row) {
        const double y = -half_side() + (row + 0.5) * h;
        for (int col = 0; col < m_; ++col) {
            centers_.push_back({-half_side() + (col + 0.5) * h, y});
        }
    }
}

GridSpec make_grid(double side_length_m, int cells_per_side) { return GridSpec(side_length_m, cells_per_side); }

PhysicsConfig::PhysicsConfig(double frequency_hz) : f_(frequency_hz) {
    require(frequency_hz > 0.0 && std::isfinite(frequency_hz), Errc::invalid_argument,
            "frequency must be positive");
}

void SensorLayout::validate(const GridSpec& grid) const {
    require(!transmitters.empty(), Errc::invalid_geometry, "layout has no transmitters");
    require(!receivers.empty(), Errc::invalid_geometry, "layout has no receivers");
    for (const auto& p : transmitters) {
        require(!grid.contains(p), Errc::invalid_geometry, "transmitter inside the region of interest");
    }
    for (const auto& p : receivers) {
        require(!grid.contains(p), Errc::invalid_geometry, "receiver inside the region of interest");
    }
}

SensorLayout circle_layout(int n_tx, int n_rx, double radius_m, IncidentModel model,
                           const CircleLayoutOptions& options) {
    require(n_tx >= 1 && n_rx >= 1, Errc::invalid_argument, "need at least one transmitter and one receiver");
    require(options.roi_side_m > 0.0, Errc::invalid_argument, "region side must be positive");
    const double half_diag = options.roi_side_m / std::numbers::sqrt2;
    require(radius_m > half_diag, Errc::invalid_argument,
            "sensor radius " + std::to_string(radius_m) + " m does not clear the region half-diagonal " +
                std::to_string(half_diag) + " m");
    SensorLayout layout;
    layout.incident_model = model;
    const auto ring = [radius_m](int count, double offset) {
        std::vector<Point2> pts;
        pts.reserve(static_cast<std::size_t>(count));
        for (int k = 0; k < count; ++k) {
            const double a = offset + 2.0 * std::numbers::pi * k / count;
            pts.push_back({radius_m * std::cos(a), radius_m * std::sin(a)});
        }
        return pts;
    };
    layout.transmitters = ring(n_tx, options.tx_offset_rad);
    layout.receivers = ring(n_rx, options.rx_offset_rad);
    return layout;
}

Scene::Scene(GridSpec grid, RVector permittivity) : grid_(std::move(grid)), eps_(std::move(permittivity)) {
    require(eps_.size() == grid_.cell_count(), Errc::invalid_argument,
            "permittivity length " + std::to_string(eps_.size()) + " does not match grid cell count " +
                std::to_string(grid_.cell_count()));
    require(eps_.allFinite(), Errc::invalid_argument, "permittivity contains non-finite values");
    require(eps_.minCoeff() >= 1.0, Errc::invalid_argument, "relative permittivity must be >= 1");
}

Scene uniform_scene(const GridSpec& grid, double eps) {
    return Scene(grid, RVector::Constant(grid.cell_count(), eps));
}

namespace {

template <typename Vec>
Vec block_mean(const Vec& values, int m, int target) {
    require(target >= 1 && m % target == 0, Errc::invalid_argument,
            "target resolution " + std::to_string(target) + " does not divide " + std::to_string(m));
    const int f = m / target;
    const double inv = 1.0 / (static_cast<double>(f) * f);
    Vec out = Vec::Zero(static_cast<Eigen::Index>(target) * target);
    for (int r = 0; r < target; ++r) {
        for (int c = 0; c < target; ++c) {
            typename Vec::Scalar acc{0.0};
            for (int i = 0; i < f; ++i) {
                for (int j = 0; j < f; ++j) acc += values[(r * f + i) * m + (c * f + j)];
            }
            out[r * target + c] = acc * inv;
        }
    }
    return out;
}

}  // namespace

Scene downsample_scene(const Scene& scene, int target_cells) {
    const int m = scene.grid().cells_per_side();
    RVector coarse = block_mean(scene.permittivity(), m, target_cells);
    // Averages of values >= 1 are >= 1 up to rounding; keep the invariant exact.
    coarse = coarse.cwiseMax(1.0);
    return Scene(GridSpec(scene.grid().side_length(), target_cells), std::move(coarse));
}

CVector downsample_field(const CVector& values, int cells_per_side, int target_cells) {
    require(values.size() == static_cast<Eigen::Index>(cells_per_side) * cells_per_side, Errc::invalid_argument,
            "field length does not match grid");
    return block_mean(values, cells_per_side, target_cells);
}

}  // namespace eisp
