#include <cmath>
#include <random>

#include "eisp/neural.hpp"

namespace eisp {

DenseNet::DenseNet(std::vector<int> widths, double output_scale) : widths_(std::move(widths)) {
    require(widths_.size() >= 2, Errc::invalid_argument, "a network needs at least one layer");
    for (int w : widths_) require(w >= 1, Errc::invalid_argument, "layer widths must be positive");
    set_output_scale(output_scale);
    Eigen::Index total = 0;
    for (int l = 0; l < n_layers(); ++l) {
        offsets_.push_back(total);
        total += static_cast<Eigen::Index>(widths_[l + 1]) * (widths_[l] + 1);
    }
    theta_ = RVector::Zero(total);
}

void DenseNet::set_output_scale(double s) {
    require(s > 0.0 && std::isfinite(s), Errc::invalid_argument, "output scale must be positive");
    output_scale_ = s;
}

Eigen::Map<const RMatrix> DenseNet::weight(int l) const {
    return {theta_.data() + offsets_[static_cast<std::size_t>(l)], widths_[l + 1], widths_[l]};
}

Eigen::Map<RMatrix> DenseNet::weight(int l) {
    return {theta_.data() + offsets_[static_cast<std::size_t>(l)], widths_[l + 1], widths_[l]};
}

Eigen::Map<const RVector> DenseNet::bias(int l) const {
    return {theta_.data() + offsets_[static_cast<std::size_t>(l)] + Eigen::Index{widths_[l + 1]} * widths_[l],
            widths_[l + 1]};
}

Eigen::Map<RVector> DenseNet::bias(int l) {
    return {theta_.data() + offsets_[static_cast<std::size_t>(l)] + Eigen::Index{widths_[l + 1]} * widths_[l],
            widths_[l + 1]};
}

std::string DenseNet::describe_parameter(Eigen::Index i) const {
    for (int l = n_layers() - 1; l >= 0; --l) {
        const Eigen::Index off = offsets_[static_cast<std::size_t>(l)];
        if (i < off) continue;
        const Eigen::Index local = i - off;
        const Eigen::Index nw = Eigen::Index{widths_[l + 1]} * widths_[l];
        if (local < nw) {
            return "layer " + std::to_string(l) + " weight (" + std::to_string(local % widths_[l + 1]) + ", " +
                   std::to_string(local / widths_[l + 1]) + ")";
        }
        return "layer " + std::to_string(l) + " bias " + std::to_string(local - nw);
    }
    return "parameter " + std::to_string(i);
}

DenseNet make_dense_net(std::vector<int> widths, double output_scale, std::uint64_t seed) {
    DenseNet net(std::move(widths), output_scale);
    std::mt19937_64 rng(seed);
    for (int l = 0; l + 1 < net.n_layers(); ++l) {
        const double bound = std::sqrt(6.0 / net.widths()[l]);
        std::uniform_real_distribution<double> u(-bound, bound);
        auto w = net.weight(l);
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = u(rng);
    }
    return net;
}

namespace {

RMatrix finish_forward(const DenseNet& net, RMatrix z, int first_layer, ForwardContext* ctx) {
    const int last = net.n_layers() - 1;
    for (int l = first_layer;; ++l) {
        if (l > first_layer) {
            z = net.weight(l) * z;
            z.colwise() += net.bias(l);
        }
        if (l == last) break;
        z = z.cwiseMax(0.0);
        if (ctx) ctx->hidden.push_back(z);
    }
    RMatrix t = z.array().tanh().matrix();
    if (ctx) ctx->squashed = t;
    return net.output_scale() * t;
}

}  // namespace

RMatrix net_forward(const DenseNet& net, const RMatrix& input, ForwardContext* ctx) {
    require(input.rows() == net.input_dim(), Errc::invalid_argument,
            "input dimension " + std::to_string(input.rows()) + " does not match network input " +
                std::to_string(net.input_dim()));
    if (ctx) {
        *ctx = ForwardContext{};
        ctx->net = &net;
        ctx->input = input;
    }
    RMatrix z = net.weight(0) * input;
    z.colwise() += net.bias(0);
    return finish_forward(net, std::move(z), 0, ctx);
}

RVector net_forward(const DenseNet& net, const RVector& input) {
    return net_forward(net, RMatrix(input), nullptr).col(0);
}

RMatrix net_forward_factored(const DenseNet& net, const RMatrix& scene_features, const RMatrix& point_features,
                             ForwardContext* ctx) {
    const Eigen::Index f = scene_features.rows();
    const Eigen::Index p = point_features.rows();
    require(f + p == net.input_dim(), Errc::invalid_argument,
            "input dimension " + std::to_string(f + p) + " does not match network input " +
                std::to_string(net.input_dim()));
    const Eigen::Index s = scene_features.cols();
    const Eigen::Index c = point_features.cols();
    if (ctx) {
        *ctx = ForwardContext{};
        ctx->net = &net;
        ctx->factored = true;
        ctx->scene_features = scene_features;
        ctx->point_features = point_features;
    }
    const auto w = net.weight(0);
    RMatrix per_scene = w.leftCols(f) * scene_features;
    per_scene.colwise() += net.bias(0);
    const RMatrix per_point = w.rightCols(p) * point_features;
    RMatrix z(w.rows(), s * c);
    for (Eigen::Index k = 0; k < s; ++k) {
        z.middleCols(k * c, c) = per_point.colwise() + per_scene.col(k);
    }
    return finish_forward(net, std::move(z), 0, ctx);
}

RVector net_backward(const DenseNet& net, const ForwardContext& ctx, const RMatrix& upstream) {
    require(ctx.net == &net && ctx.squashed.size() > 0, Errc::contract_violation,
            "net_backward called without a matching forward context");
    require(upstream.rows() == ctx.squashed.rows() && upstream.cols() == ctx.squashed.cols(),
            Errc::contract_violation, "upstream gradient shape does not match the forward pass");
    RVector grad = RVector::Zero(net.parameter_count());
    const int last = net.n_layers() - 1;
    RMatrix dz = (upstream.array() * net.output_scale() * (1.0 - ctx.squashed.array().square())).matrix();
    for (int l = last; l >= 0; --l) {
        const Eigen::Index off = net.weight_offset(l);
        const int out = net.widths()[l + 1];
        const int in = net.widths()[l];
        Eigen::Map<RMatrix> dw(grad.data() + off, out, in);
        Eigen::Map<RVector> db(grad.data() + off + Eigen::Index{out} * in, out);
        db = dz.rowwise().sum();
        if (l > 0) {
            const RMatrix& a = ctx.hidden[static_cast<std::size_t>(l - 1)];
            dw.noalias() = dz * a.transpose();
            RMatrix da = net.weight(l).transpose() * dz;
            dz = (da.array() * (a.array() > 0.0).cast<double>()).matrix();
        } else if (!ctx.factored) {
            dw.noalias() = dz * ctx.input.transpose();
        } else {
            const Eigen::Index f = ctx.scene_features.rows();
            const Eigen::Index s = ctx.scene_features.cols();
            const Eigen::Index c = ctx.point_features.cols();
            RMatrix per_scene(out, s);
            RMatrix per_point = RMatrix::Zero(out, c);
            for (Eigen::Index k = 0; k < s; ++k) {
                const auto block = dz.middleCols(k * c, c);
                per_scene.col(k) = block.rowwise().sum();
                per_point += block;
            }
            dw.leftCols(f).noalias() = per_scene * ctx.scene_features.transpose();
            dw.rightCols(in - f).noalias() = per_point * ctx.point_features.transpose();
        }
    }
    return grad;
}

}  // namespace eisp
