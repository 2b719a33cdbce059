#include "eisp/green.hpp"

#include <cmath>
#include <numbers>

#include "eisp/special.hpp"

namespace eisp {

GreenOperators::GreenOperators(GridSpec grid, SensorLayout layout, double wavenumber, const GreenOptions& options)
    : grid_(std::move(grid)), layout_(std::move(layout)), k0_(wavenumber) {
    require(k0_ > 0.0, Errc::invalid_argument, "wavenumber must be positive");
    const int m = grid_.cells_per_side();
    const double h = grid_.spacing();
    radius_ = h / std::sqrt(std::numbers::pi);
    const double ka = k0_ * radius_;
    const cplx i{0.0, 1.0};
    cell_factor_ = i * (std::numbers::pi * ka / 2.0) * special::bessel_j1(ka);

    for (const auto& r : layout_.receivers) {
        for (const auto& c : grid_.centers()) {
            require(distance(r, c) > 0.0, Errc::invalid_geometry, "receiver coincides with a cell center");
        }
    }
    layout_.validate(grid_);

    kernel_.resize(static_cast<std::size_t>(m) * m);
    for (int dr = 0; dr < m; ++dr) {
        for (int dc = 0; dc < m; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const double rho = h * std::hypot(static_cast<double>(dr), static_cast<double>(dc));
            kernel_[static_cast<std::size_t>(dr) * m + dc] = cell_factor_ * special::hankel1_0(k0_ * rho);
        }
    }
    const double sign = options.flip_self_term_sign ? -1.0 : 1.0;
    kernel_[0] = (i / 2.0) * (std::numbers::pi * ka * special::hankel1_1(ka) + sign * 2.0 * i);
    conv_ = std::make_shared<const ToeplitzConvolver>(m, kernel_);

    const auto cells = grid_.cell_count();
    measure_.resize(layout_.n_receivers(), cells);
    for (int r = 0; r < layout_.n_receivers(); ++r) {
        const Point2 rx = layout_.receivers[static_cast<std::size_t>(r)];
        for (int n = 0; n < cells; ++n) {
            measure_(r, n) = cell_factor_ * special::hankel1_0(k0_ * distance(rx, grid_.center(n)));
        }
    }
}

cplx GreenOperators::domain_entry(int m, int n) const {
    const int side = grid_.cells_per_side();
    const int dr = std::abs(m / side - n / side);
    const int dc = std::abs(m % side - n % side);
    return kernel_[static_cast<std::size_t>(dr) * side + dc];
}

CMatrix GreenOperators::domain_dense() const {
    const int cells = grid_.cell_count();
    CMatrix g(cells, cells);
    for (int n = 0; n < cells; ++n) {
        for (int m = 0; m < cells; ++m) g(m, n) = domain_entry(m, n);
    }
    return g;
}

CMatrix GreenOperators::domain_block(std::span<const int> rows, std::span<const int> cols) const {
    CMatrix g(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = domain_entry(rows[r], cols[c]);
        }
    }
    return g;
}

void GreenOperators::apply_domain(std::span<const cplx> in, std::span<cplx> out) const { conv_->apply(in, out); }

CVector GreenOperators::apply_domain(const CVector& x) const {
    require(x.size() == grid_.cell_count(), Errc::invalid_argument, "domain operand length mismatch");
    CVector y(x.size());
    conv_->apply({x.data(), static_cast<std::size_t>(x.size())}, {y.data(), static_cast<std::size_t>(y.size())});
    return y;
}

CVector GreenOperators::apply_domain_adjoint(const CVector& x) const {
    const CVector xc = x.conjugate();
    return apply_domain(xc).conjugate();
}

GreenOperators assemble_green(const GridSpec& grid, const SensorLayout& layout, const PhysicsConfig& physics,
                              const GreenOptions& options) {
    return GreenOperators(grid, layout, physics.wavenumber(), options);
}

}  // namespace eisp
