#pragma once

#include <memory>
#include <span>
#include <vector>

#include "eisp/types.hpp"

namespace eisp {

/// Fast product with a symmetric two-level Toeplitz matrix on an M x M grid, whose
/// entry for cells (r1,c1),(r2,c2) is kernel(|r1-r2|, |c1-c2|). The kernel is embedded
/// in a 2M x 2M circulant and applied with 2D FFTs. Immutable after construction;
/// FFT scratch buffers are thread-local, so concurrent apply() calls are safe.
class ToeplitzConvolver {
public:
    /// kernel is M x M row-major: kernel[dr * M + dc].
    ToeplitzConvolver(int cells_per_side, std::span<const cplx> kernel);

    [[nodiscard]] int cells_per_side() const noexcept { return m_; }

    void apply(std::span<const cplx> in, std::span<cplx> out) const;

private:
    int m_;
    int p_;
    std::vector<cplx> spectrum_;
};

}  // namespace eisp
