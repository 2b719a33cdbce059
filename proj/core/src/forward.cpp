#include "eisp/forward.hpp"

#include <cmath>
#include <sstream>

#include "eisp/parallel.hpp"
#include "eisp/special.hpp"

namespace eisp {
namespace {

struct IterativeResult {
    CVector solution;
    double relative_residual{0.0};
    int iterations{0};
};

// BiCGSTAB for (I - Diag(xi) G) j = rhs.
IterativeResult bicgstab(const GreenOperators& ops, const RVector& xi, const CVector& rhs, double tol,
                         int max_iterations) {
    const auto apply = [&](const CVector& v) -> CVector {
        CVector gv = ops.apply_domain(v);
        return v - (xi.array() * gv.array()).matrix();
    };
    const double bnorm = rhs.norm();
    IterativeResult out;
    out.solution = CVector::Zero(rhs.size());
    if (bnorm == 0.0) return out;

    CVector r = rhs;
    CVector r0 = r;
    CVector p = CVector::Zero(rhs.size());
    CVector v = CVector::Zero(rhs.size());
    cplx rho{1.0, 0.0};
    cplx alpha{1.0, 0.0};
    cplx omega{1.0, 0.0};
    for (int it = 1; it <= max_iterations; ++it) {
        out.iterations = it;
        const cplx rho_new = r0.dot(r);
        if (std::abs(rho_new) < 1e-300) {
            r0 = r;  // breakdown: restart the shadow residual
            p.setZero();
            v.setZero();
            rho = alpha = omega = cplx{1.0, 0.0};
            continue;
        }
        const cplx beta = (rho_new / rho) * (alpha / omega);
        p = r + beta * (p - omega * v);
        v = apply(p);
        alpha = rho_new / r0.dot(v);
        CVector s = r - alpha * v;
        if (s.norm() <= tol * bnorm) {
            out.solution += alpha * p;
            break;
        }
        const CVector t = apply(s);
        omega = t.dot(s) / t.squaredNorm();
        out.solution += alpha * p + omega * s;
        r = s - omega * t;
        if (r.norm() <= tol * bnorm) break;
        rho = rho_new;
    }
    out.relative_residual = (rhs - apply(out.solution)).norm() / bnorm;
    return out;
}

}  // namespace

ComplexField incident_field(const SensorLayout& layout, const GridSpec& grid, const PhysicsConfig& physics,
                            int tx_index) {
    require(tx_index >= 0 && tx_index < layout.n_transmitters(), Errc::invalid_argument,
            "transmitter index " + std::to_string(tx_index) + " out of range");
    const Point2 tx = layout.transmitters[static_cast<std::size_t>(tx_index)];
    const double k0 = physics.wavenumber();
    ComplexField field{CVector(grid.cell_count()), FieldRole::Incident};
    if (layout.incident_model == IncidentModel::LineSource) {
        for (int n = 0; n < grid.cell_count(); ++n) {
            const double rho = distance(tx, grid.center(n));
            require(rho > 0.0, Errc::invalid_geometry, "transmitter coincides with a cell center");
            field.values[n] = cplx{0.0, 0.25} * special::hankel1_0(k0 * rho);
        }
    } else {
        const double norm = std::hypot(tx.x, tx.y);
        require(norm > 0.0, Errc::invalid_geometry, "plane-wave transmitter at the origin has no direction");
        const double dx = -tx.x / norm;
        const double dy = -tx.y / norm;
        for (int n = 0; n < grid.cell_count(); ++n) {
            const Point2 c = grid.center(n);
            field.values[n] = std::exp(cplx{0.0, k0 * (dx * c.x + dy * c.y)});
        }
    }
    return field;
}

CRowMatrix incident_fields(const SensorLayout& layout, const GridSpec& grid, const PhysicsConfig& physics) {
    CRowMatrix out(layout.n_transmitters(), grid.cell_count());
    for (int t = 0; t < layout.n_transmitters(); ++t) {
        out.row(t) = incident_field(layout, grid, physics, t).values.transpose();
    }
    return out;
}

FieldBundle forward_solve(const Scene& scene, const GreenOperators& ops, const PhysicsConfig& physics,
                          const SolveOptions& options) {
    require(scene.grid() == ops.grid(), Errc::invalid_argument, "scene grid does not match the Green operators");
    require(std::abs(physics.wavenumber() - ops.wavenumber()) <= 1e-12 * ops.wavenumber(), Errc::invalid_argument,
            "physics wavenumber does not match the Green operators");
    const GridSpec& grid = scene.grid();
    const int cells = grid.cell_count();
    const int n_tx = ops.layout().n_transmitters();
    const RVector xi = scene.contrast();

    FieldBundle bundle;
    bundle.incident = incident_fields(ops.layout(), grid, physics);
    bundle.current = CRowMatrix::Zero(n_tx, cells);
    bundle.total.resize(n_tx, cells);
    bundle.scattered.resize(n_tx, ops.layout().n_receivers());

    std::vector<int> support;
    for (int n = 0; n < cells; ++n) {
        if (xi[n] != 0.0) support.push_back(n);
    }
    const auto support_size = static_cast<int>(support.size());

    bool direct = options.method == SolveMethod::Direct ||
                  (options.method == SolveMethod::Auto && support_size <= options.direct_max_unknowns);
    const double tol = direct ? options.tolerance : options.iterative_tolerance;

    if (support_size > 0 && direct) {
        CMatrix a = ops.domain_block(support, support);
        for (int r = 0; r < support_size; ++r) a.row(r) *= -xi[support[static_cast<std::size_t>(r)]];
        a.diagonal().array() += 1.0;
        CMatrix rhs(support_size, n_tx);
        for (int t = 0; t < n_tx; ++t) {
            for (int r = 0; r < support_size; ++r) {
                const int n = support[static_cast<std::size_t>(r)];
                rhs(r, t) = xi[n] * bundle.incident(t, n);
            }
        }
        const Eigen::PartialPivLU<CMatrix> lu(a);
        const CMatrix sol = lu.solve(rhs);
        for (int t = 0; t < n_tx; ++t) {
            for (int r = 0; r < support_size; ++r) bundle.current(t, support[static_cast<std::size_t>(r)]) = sol(r, t);
        }
    } else if (support_size > 0) {
        std::vector<double> residuals(static_cast<std::size_t>(n_tx), 0.0);
        parallel_for(n_tx, options.threads, [&](int t) {
            const CVector rhs = (xi.array() * bundle.incident.row(t).transpose().array()).matrix();
            // Solve a little tighter than the reported bound: the state residual below is G^d times
            // the Krylov residual.
            const auto res = bicgstab(ops, xi, rhs, 0.01 * tol, options.max_iterations);
            bundle.current.row(t) = res.solution.transpose();
            residuals[static_cast<std::size_t>(t)] = res.relative_residual;
        });
    }

    double worst = 0.0;
    for (int t = 0; t < n_tx; ++t) {
        const CVector ei = bundle.incident.row(t).transpose();
        CVector j = bundle.current.row(t).transpose();
        CVector et = ei + ops.apply_domain(j);
        j = (xi.array() * et.array()).matrix();
        const double residual = (et - ei - ops.apply_domain(j)).norm() / ei.norm();
        bundle.total.row(t) = et.transpose();
        bundle.current.row(t) = j.transpose();
        bundle.scattered.row(t) = (ops.measure_op() * j).transpose();
        if (!std::isfinite(residual) || !et.allFinite()) {
            fail(Errc::numerical_failure, "forward solve produced non-finite fields for transmitter " +
                                              std::to_string(t));
        }
        worst = std::max(worst, residual);
    }
    bundle.max_residual = worst;
    if (worst > tol) {
        std::ostringstream msg;
        msg << "forward solve residual " << worst << " exceeds tolerance " << tol << " ("
            << (direct ? "direct" : "iterative") << ", support " << support_size << " cells)";
        fail(Errc::numerical_failure, msg.str());
    }
    return bundle;
}

CVector scatter_from_current(const CVector& current, const GreenOperators& ops) {
    require(current.size() == ops.grid().cell_count(), Errc::invalid_argument, "current length mismatch");
    return ops.measure_op() * current;
}

ComplexField scatter_from_current(const ComplexField& current, const GreenOperators& ops) {
    return {scatter_from_current(current.values, ops), FieldRole::Scattered};
}

BundleResiduals bundle_residuals(const FieldBundle& bundle, const Scene& scene, const GreenOperators& ops) {
    const RVector xi = scene.contrast();
    BundleResiduals out;
    constexpr double tiny = 1e-300;
    for (Eigen::Index t = 0; t < bundle.current.rows(); ++t) {
        const CVector ei = bundle.incident.row(t).transpose();
        const CVector et = bundle.total.row(t).transpose();
        const CVector j = bundle.current.row(t).transpose();
        const CVector es = bundle.scattered.row(t).transpose();
        out.state = std::max(out.state, (et - ei - ops.apply_domain(j)).norm() / ei.norm());
        out.polarization =
            std::max(out.polarization, (j - (xi.array() * et.array()).matrix()).norm() / std::max(j.norm(), tiny));
        out.data = std::max(out.data, (es - ops.measure_op() * j).norm() / std::max(es.norm(), tiny));
    }
    return out;
}

}  // namespace eisp
