#pragma once

#include <memory>

#include "eisp/fft.hpp"
#include "eisp/grid.hpp"

namespace eisp {

struct GreenOptions {
    /// Negative-control knob: flips the sign of the static part of the self term,
    /// producing a deliberately wrong operator. Never set outside validation harnesses.
    bool flip_self_term_sign{false};
};

/// Discrete Green operators for a (grid, layout, frequency) triple, using the
/// equivalent-circle (Richmond) rule: each square cell is replaced by the circle of
/// equal area, radius a = h / sqrt(pi). With time convention exp(-i w t):
///   G^d[m,n] = (i pi k0 a / 2) J1(k0 a) H0(k0 |x_m - x_n|),  m != n
///   G^d[m,m] = (i / 2) (pi k0 a H1(k0 a) + 2i)
///   G^s[r,n] = (i pi k0 a / 2) J1(k0 a) H0(k0 |x_r - x_n|)
/// G^d is stored as its two-level Toeplitz generator; products use 2D FFTs.
class GreenOperators {
public:
    GreenOperators(GridSpec grid, SensorLayout layout, double wavenumber, const GreenOptions& options = {});

    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
    [[nodiscard]] const SensorLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] double wavenumber() const noexcept { return k0_; }
    [[nodiscard]] double equivalent_radius() const noexcept { return radius_; }
    [[nodiscard]] cplx cell_factor() const noexcept { return cell_factor_; }
    [[nodiscard]] cplx self_term() const noexcept { return kernel_[0]; }

    [[nodiscard]] cplx domain_entry(int m, int n) const;
    /// Materializes the full M^2 x M^2 matrix (memory: 16 M^4 bytes).
    [[nodiscard]] CMatrix domain_dense() const;
    /// Dense sub-block G^d[rows, cols].
    [[nodiscard]] CMatrix domain_block(std::span<const int> rows, std::span<const int> cols) const;

    [[nodiscard]] const CMatrix& measure_op() const noexcept { return measure_; }

    [[nodiscard]] CVector apply_domain(const CVector& x) const;
    void apply_domain(std::span<const cplx> in, std::span<cplx> out) const;
    /// (G^d)^H x; G^d is symmetric so this is conj(G^d conj(x)).
    [[nodiscard]] CVector apply_domain_adjoint(const CVector& x) const;

private:
    GridSpec grid_;
    SensorLayout layout_;
    double k0_;
    double radius_;
    cplx cell_factor_;
    std::vector<cplx> kernel_;  // M x M, indexed by (|dr|, |dc|)
    std::shared_ptr<const ToeplitzConvolver> conv_;
    CMatrix measure_;
};

GreenOperators assemble_green(const GridSpec& grid, const SensorLayout& layout, const PhysicsConfig& physics,
                              const GreenOptions& options = {});

}  // namespace eisp
