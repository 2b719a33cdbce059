#include "eisp/inversion.hpp"

namespace eisp {

Reconstruction infer(const CurrentEstimator& model, const CRowMatrix& measured, const GreenOperators& ops,
                     const CRowMatrix& incident) {
    const int n = model.n_transmitters();
    const int cells = ops.grid().cell_count();
    require(measured.rows() == n && measured.cols() == model.n_receivers(), Errc::invalid_argument,
            "measured field is " + std::to_string(measured.rows()) + " x " + std::to_string(measured.cols()) +
                ", model expects " + std::to_string(n) + " x " + std::to_string(model.n_receivers()));
    require(incident.rows() == n && incident.cols() == cells, Errc::invalid_argument, "incident field shape mismatch");
    require(ops.layout().n_receivers() == model.n_receivers(), Errc::invalid_argument,
            "Green operators have a different receiver count than the model");
    const RMatrix encoded = encode_grid(ops.grid(), model.config().encoding);
    Reconstruction rec;
    rec.current.resize(n, cells);
    rec.scattered.resize(n, model.n_receivers());
    for (int t = 0; t < n; ++t) {
        const RVector f = model.features(measured.row(t).transpose(), t);
        const CVector j = output_to_current(net_forward_factored(model.net(t), RMatrix(f), encoded));
        rec.per_transmitter.push_back(solve_permittivity(j, incident.row(t).transpose(), ops));
        rec.current.row(t) = j.transpose();
        rec.scattered.row(t) = scatter_from_current(j, ops).transpose();
    }
    rec.fused = fuse(rec.per_transmitter);
    return rec;
}

}  // namespace eisp
