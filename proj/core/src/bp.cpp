#include "eisp/inversion.hpp"

namespace eisp {

cplx bp_gamma(const CVector& measured, const GreenOperators& ops) {
    const CMatrix& gs = ops.measure_op();
    const CVector v = gs * (gs.adjoint() * measured);
    const double vv = v.squaredNorm();
    if (vv == 0.0 || measured.squaredNorm() == 0.0) return {0.0, 0.0};
    return v.dot(measured) / vv;
}

Reconstruction bp_reconstruct(const CRowMatrix& measured, const GreenOperators& ops, const CRowMatrix& incident) {
    const int n = static_cast<int>(measured.rows());
    const int cells = ops.grid().cell_count();
    require(n >= 1 && measured.cols() == ops.layout().n_receivers(), Errc::invalid_argument,
            "measured field does not match the receiver count");
    require(incident.rows() == n && incident.cols() == cells, Errc::invalid_argument, "incident field shape mismatch");
    const CMatrix& gs = ops.measure_op();
    Reconstruction rec;
    rec.current.resize(n, cells);
    rec.scattered.resize(n, measured.cols());
    for (int t = 0; t < n; ++t) {
        const CVector e = measured.row(t).transpose();
        const CVector j = bp_gamma(e, ops) * (gs.adjoint() * e);
        rec.per_transmitter.push_back(solve_permittivity(j, incident.row(t).transpose(), ops));
        rec.current.row(t) = j.transpose();
        rec.scattered.row(t) = (gs * j).transpose();
    }
    rec.fused = fuse(rec.per_transmitter);
    return rec;
}

}  // namespace eisp
