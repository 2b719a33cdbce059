#include "eisp/mie.hpp"

#include <cmath>

#include "eisp/special.hpp"

namespace eisp {
namespace {

std::vector<cplx> hankel_sequence(int nmax, double x) {
    const auto j = special::bessel_jn_sequence(nmax, x);
    const auto y = special::bessel_yn_sequence(nmax, x);
    std::vector<cplx> out(static_cast<std::size_t>(nmax) + 1);
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = {j[n], y[n]};
    return out;
}

// Z_n'(x) from Z_{n-1}, Z_n: Z_0' = -Z_1, Z_n' = Z_{n-1} - (n/x) Z_n.
template <typename T>
T derivative(const std::vector<T>& z, int n, double x) {
    const auto nu = static_cast<std::size_t>(n);
    if (n == 0) return -z[1];
    return z[nu - 1] - (static_cast<double>(n) / x) * z[nu];
}

}  // namespace

MieResult mie_cylinder_series(double radius_m, double eps_r, const PhysicsConfig& physics,
                              const SensorLayout& layout, int tx_index, const MieOptions& options) {
    require(radius_m > 0.0, Errc::invalid_argument, "cylinder radius must be positive");
    require(eps_r >= 1.0, Errc::invalid_argument, "cylinder permittivity must be >= 1");
    require(tx_index >= 0 && tx_index < layout.n_transmitters(), Errc::invalid_argument, "transmitter index out of range");
    const double k0 = physics.wavenumber();
    const double k1 = k0 * std::sqrt(eps_r);
    const Point2 tx = layout.transmitters[static_cast<std::size_t>(tx_index)];
    const double rho_t = std::hypot(tx.x, tx.y);
    const double phi_t = std::atan2(tx.y, tx.x);
    const bool line = layout.incident_model == IncidentModel::LineSource;
    if (line) require(rho_t > radius_m, Errc::invalid_geometry, "line source inside the cylinder");
    for (const auto& r : layout.receivers) {
        require(std::hypot(r.x, r.y) > radius_m, Errc::invalid_geometry, "receiver inside the cylinder");
    }
    // Plane wave travels from the transmitter through the origin.
    const double phi_d = phi_t + std::numbers::pi;

    const int base = static_cast<int>(std::ceil(std::max(k0, k1) * radius_m)) + options.extra_orders;
    const int limit = options.fixed_order ? *options.fixed_order : std::max(base, options.max_order);
    const int top = limit + 1;

    const double x0 = k0 * radius_m;
    const double x1 = k1 * radius_m;
    const auto j0 = special::bessel_jn_sequence(top, x0);
    const auto j1 = special::bessel_jn_sequence(top, x1);
    const auto h0 = hankel_sequence(top, x0);
    const auto h_tx = line ? hankel_sequence(limit, k0 * rho_t) : std::vector<cplx>{};

    const int n_rx = layout.n_receivers();
    std::vector<std::vector<cplx>> h_rx(static_cast<std::size_t>(n_rx));
    std::vector<double> dphi(static_cast<std::size_t>(n_rx));
    for (int r = 0; r < n_rx; ++r) {
        const Point2 p = layout.receivers[static_cast<std::size_t>(r)];
        h_rx[static_cast<std::size_t>(r)] = hankel_sequence(limit, k0 * std::hypot(p.x, p.y));
        dphi[static_cast<std::size_t>(r)] = std::atan2(p.y, p.x) - (line ? phi_t : phi_d);
    }

    MieResult out;
    out.field = {CVector::Zero(n_rx), FieldRole::Scattered};
    const cplx i{0.0, 1.0};
    const auto coefficient = [&](int n) -> cplx {
        const double dj0 = derivative(j0, n, x0);
        const double dj1 = derivative(j1, n, x1);
        const cplx dh0 = derivative(h0, n, x0);
        const auto nu = static_cast<std::size_t>(n);
        const cplx num = k1 * dj1 * j0[nu] - k0 * j1[nu] * dj0;
        const cplx den = k0 * j1[nu] * dh0 - k1 * dj1 * h0[nu];
        return num / den;
    };

    double last_term = 0.0;
    int n = 0;
    for (; n <= limit; ++n) {
        const cplx a = coefficient(n);
        const auto nu = static_cast<std::size_t>(n);
        const double weight = n == 0 ? 1.0 : 2.0;
        cplx prefactor = line ? cplx{0.0, 0.25} * a * h_tx[nu] : std::pow(i, n) * a;
        double term_mag = 0.0;
        if (!std::isfinite(prefactor.real()) || !std::isfinite(prefactor.imag())) {
            prefactor = 0.0;  // overflowed Hankel orders far beyond convergence contribute nothing
        }
        if (prefactor == cplx{0.0, 0.0}) {
            last_term = 0.0;
            if (n >= base || options.fixed_order) break;
            continue;
        }
        for (int r = 0; r < n_rx; ++r) {
            const auto ru = static_cast<std::size_t>(r);
            const cplx term = weight * prefactor * h_rx[ru][nu] * std::cos(n * dphi[ru]);
            out.field.values[r] += term;
            term_mag = std::max(term_mag, std::abs(term));
        }
        last_term = term_mag;
        if (!options.fixed_order && n >= base) {
            const double scale = std::max(out.field.values.cwiseAbs().maxCoeff(), 1e-300);
            if (term_mag / scale < options.tail_tolerance || term_mag == 0.0) break;
        }
    }
    out.order = std::min(n, limit);
    const double scale = std::max(out.field.values.cwiseAbs().maxCoeff(), 1e-300);
    out.tail = last_term / scale;
    if (!options.fixed_order && n > limit && out.tail >= options.tail_tolerance) {
        fail(Errc::numerical_failure, "Mie series did not converge by order " + std::to_string(limit) +
                                          " (tail " + std::to_string(out.tail) + ")");
    }
    return out;
}

ComplexField mie_cylinder(double radius_m, double eps_r, const PhysicsConfig& physics, const SensorLayout& layout,
                          int tx_index, const MieOptions& options) {
    return mie_cylinder_series(radius_m, eps_r, physics, layout, tx_index, options).field;
}

}  // namespace eisp
