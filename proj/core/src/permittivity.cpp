#include "eisp/inversion.hpp"

namespace eisp {

RVector solve_permittivity(const CVector& current, const CVector& incident, const GreenOperators& ops,
                           PermittivityContext* ctx, const PermittivityOptions& options) {
    const int cells = ops.grid().cell_count();
    require(current.size() == cells && incident.size() == cells, Errc::invalid_argument,
            "current and incident fields must have M^2 entries");
    const CVector total = incident + ops.apply_domain(current);
    const double peak = total.cwiseAbs().maxCoeff();
    require(peak > 0.0 && std::isfinite(peak), Errc::degenerate_input, "total field is identically zero");
    const double floor = options.delta * peak;
    RVector eps(cells);
    std::vector<std::uint8_t> active(static_cast<std::size_t>(cells), 0);
    for (int m = 0; m < cells; ++m) {
        if (std::abs(total[m]) < floor) {
            eps[m] = 1.0;
            continue;
        }
        const double re = (current[m] / total[m]).real();
        if (re >= 0.0) {
            eps[m] = re + 1.0;
            active[static_cast<std::size_t>(m)] = 1;
        } else {
            eps[m] = 1.0;
        }
    }
    if (ctx) {
        ctx->current = current;
        ctx->total = total;
        ctx->active = std::move(active);
    }
    return eps;
}

RVector solve_permittivity(const ComplexField& current, const ComplexField& incident, const GreenOperators& ops) {
    return solve_permittivity(current.values, incident.values, ops);
}

CVector permittivity_backward(const PermittivityContext& ctx, const GreenOperators& ops, const RVector& grad_eps) {
    const auto cells = ctx.current.size();
    require(grad_eps.size() == cells && ctx.total.size() == cells, Errc::contract_violation,
            "permittivity_backward needs the context of a matching forward pass");
    // xi = J / T with T = E^i + G J; for real upstream g on Re(xi):
    //   g_J = conj(1/T) g - G^H (conj(J / T^2) g)
    CVector direct(cells), through(cells);
    for (Eigen::Index m = 0; m < cells; ++m) {
        const double g = ctx.active[static_cast<std::size_t>(m)] ? grad_eps[m] : 0.0;
        const cplx t = ctx.total[m];
        direct[m] = g == 0.0 ? cplx{} : std::conj(1.0 / t) * g;
        through[m] = g == 0.0 ? cplx{} : std::conj(ctx.current[m] / (t * t)) * g;
    }
    return direct - ops.apply_domain_adjoint(through);
}

RVector fuse(std::span<const RVector> estimates) {
    require(!estimates.empty(), Errc::invalid_argument, "cannot fuse an empty list of estimates");
    RVector sum = estimates.front();
    for (std::size_t i = 1; i < estimates.size(); ++i) {
        require(estimates[i].size() == sum.size(), Errc::invalid_argument, "estimates have different lengths");
        sum += estimates[i];
    }
    if (estimates.size() > 1) sum /= static_cast<double>(estimates.size());
    return sum.cwiseMax(1.0);
}

}  // namespace eisp
