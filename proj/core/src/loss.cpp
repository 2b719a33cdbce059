#include <cmath>

#include "eisp/inversion.hpp"

namespace eisp {

void LossWeights::validate() const {
    require(curr >= 0.0 && perm >= 0.0 && scat >= 0.0 && std::isfinite(curr + perm + scat), Errc::invalid_argument,
            "loss weights must be finite and >= 0");
}

LossParts loss(std::span<const Sample> pred, std::span<const Sample> gt, const LossWeights& w) {
    w.validate();
    require(pred.size() == gt.size() && !pred.empty(), Errc::invalid_argument,
            "prediction and reference batches must be non-empty and equal in size");
    LossParts p;
    const auto batch = static_cast<double>(pred.size());
    for (std::size_t b = 0; b < pred.size(); ++b) {
        require(pred[b].current.size() == gt[b].current.size() &&
                    pred[b].permittivity.size() == gt[b].permittivity.size() &&
                    pred[b].scattered.size() == gt[b].scattered.size(),
                Errc::invalid_argument, "prediction and reference shapes differ");
        if (pred[b].current.size() > 0) {
            p.curr += (pred[b].current - gt[b].current).squaredNorm() / static_cast<double>(pred[b].current.size());
        }
        if (pred[b].permittivity.size() > 0) {
            p.perm += (pred[b].permittivity - gt[b].permittivity).squaredNorm() /
                      static_cast<double>(pred[b].permittivity.size());
        }
        if (pred[b].scattered.size() > 0) {
            p.scat +=
                (pred[b].scattered - gt[b].scattered).squaredNorm() / static_cast<double>(pred[b].scattered.size());
        }
    }
    p.curr /= batch;
    p.perm /= batch;
    p.scat /= batch;
    p.total = w.curr * p.curr + w.perm * p.perm + w.scat * p.scat;
    return p;
}

LossParts loss(const Sample& pred, const Sample& gt, const LossWeights& w) {
    return loss(std::span(&pred, 1), std::span(&gt, 1), w);
}

SampleEvaluation evaluate_sample(const DenseNet& net, const RVector& features, const RMatrix& encoded,
                                 const SampleTarget& target, const GreenOperators& ops, const LossWeights& w,
                                 double batch_size, bool want_gradient) {
    const auto cells = static_cast<double>(encoded.cols());
    const auto nr = static_cast<double>(target.measured.size());
    ForwardContext fctx;
    const RMatrix out = net_forward_factored(net, RMatrix(features), encoded, want_gradient ? &fctx : nullptr);

    SampleEvaluation ev;
    ev.prediction.current = output_to_current(out);
    PermittivityContext pctx;
    ev.prediction.permittivity = solve_permittivity(ev.prediction.current, target.incident, ops, &pctx);
    ev.prediction.scattered = scatter_from_current(ev.prediction.current, ops);

    const CVector dj = ev.prediction.current - target.current;
    const RVector de = ev.prediction.permittivity - target.permittivity;
    const CVector ds = ev.prediction.scattered - target.measured;
    ev.parts.curr = dj.squaredNorm() / cells / batch_size;
    ev.parts.perm = de.squaredNorm() / cells / batch_size;
    ev.parts.scat = ds.squaredNorm() / nr / batch_size;
    ev.parts.total = w.curr * ev.parts.curr + w.perm * ev.parts.perm + w.scat * ev.parts.scat;
    if (!want_gradient) return ev;

    CVector g = (2.0 * w.curr / (cells * batch_size)) * dj;
    if (w.perm != 0.0) {
        g += permittivity_backward(pctx, ops, (2.0 * w.perm / (cells * batch_size)) * de);
    }
    if (w.scat != 0.0) {
        g += ops.measure_op().adjoint() * ((2.0 * w.scat / (nr * batch_size)) * ds);
    }
    RMatrix upstream(2, g.size());
    upstream.row(0) = g.real().transpose();
    upstream.row(1) = g.imag().transpose();
    ev.gradient = net_backward(net, fctx, upstream);
    return ev;
}

}  // namespace eisp
