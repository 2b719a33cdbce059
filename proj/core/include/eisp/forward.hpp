#pragma once

#include "eisp/green.hpp"
#include "eisp/grid.hpp"

namespace eisp {

enum class SolveMethod {
    Auto,       ///< direct when the scatterer support is small enough, iterative otherwise
    Direct,     ///< dense LU on the scatterer support
    Iterative,  ///< BiCGSTAB with FFT-accelerated products
};

struct SolveOptions {
    SolveMethod method{SolveMethod::Auto};
    double tolerance{1e-10};            ///< residual bound for the direct solve
    double iterative_tolerance{1e-8};   ///< residual bound for the iterative solve
    int max_iterations{5000};
    int direct_max_unknowns{1024};      ///< Auto switches to iterative above this support size
    int threads{1};
};

/// Per-transmitter fields; row t belongs to transmitter t.
struct FieldBundle {
    CRowMatrix incident;   ///< N x M^2
    CRowMatrix total;      ///< N x M^2
    CRowMatrix current;    ///< N x M^2
    CRowMatrix scattered;  ///< N x N_r
    double max_residual{0.0};  ///< max_t ||E^t - E^i - G^d J|| / ||E^i||
};

ComplexField incident_field(const SensorLayout& layout, const GridSpec& grid, const PhysicsConfig& physics,
                            int tx_index);
/// All transmitters stacked, N x M^2.
CRowMatrix incident_fields(const SensorLayout& layout, const GridSpec& grid, const PhysicsConfig& physics);

/// Solves (I - Diag(xi) G^d) J = Diag(xi) E^i per transmitter, then E^t = E^i + G^d J,
/// J = Diag(xi) E^t and E^s = G^s J.
FieldBundle forward_solve(const Scene& scene, const GreenOperators& ops, const PhysicsConfig& physics,
                          const SolveOptions& options = {});

/// E^s = G^s J.
CVector scatter_from_current(const CVector& current, const GreenOperators& ops);
ComplexField scatter_from_current(const ComplexField& current, const GreenOperators& ops);

struct BundleResiduals {
    double state{0.0};         ///< max_t ||E^t - E^i - G^d J|| / ||E^i||
    double polarization{0.0};  ///< max_t ||J - Diag(xi) E^t|| / max(||J||, tiny)
    double data{0.0};          ///< max_t ||E^s - G^s J|| / max(||E^s||, tiny)
};

BundleResiduals bundle_residuals(const FieldBundle& bundle, const Scene& scene, const GreenOperators& ops);

}  // namespace eisp
