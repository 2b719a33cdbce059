#pragma once

#include <optional>

#include "eisp/grid.hpp"

namespace eisp {

struct MieOptions {
    int extra_orders{10};          ///< base truncation is ceil(k_max * radius) + extra_orders
    double tail_tolerance{1e-12};  ///< last retained term relative to the field magnitude
    int max_order{200};
    std::optional<int> fixed_order;  ///< evaluate exactly this truncation, no tail check
};

struct MieResult {
    ComplexField field;  ///< scattered field at the receivers
    int order{0};        ///< highest |n| retained
    double tail{0.0};    ///< magnitude of the last retained term relative to the field
};

/// Scattered field of a homogeneous dielectric circular cylinder centered at the origin,
/// from the partial-wave (Bessel/Hankel) series. Same incident normalization and time
/// convention as incident_field(): line source (i/4) H0(k0 |x - x_t|) or unit plane wave.
MieResult mie_cylinder_series(double radius_m, double eps_r, const PhysicsConfig& physics,
                              const SensorLayout& layout, int tx_index, const MieOptions& options = {});

ComplexField mie_cylinder(double radius_m, double eps_r, const PhysicsConfig& physics, const SensorLayout& layout,
                          int tx_index, const MieOptions& options = {});

}  // namespace eisp
