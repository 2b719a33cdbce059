#include "eisp/error.hpp"
#include "eisp/hash.hpp"
#include "eisp/neural.hpp"

namespace eisp {

void EstimatorConfig::validate() const {
    require(n_transmitters >= 1 && n_receivers >= 1, Errc::invalid_argument, "estimator needs N >= 1 and N_r >= 1");
    require(hidden_width >= 1 && hidden_layers >= 0, Errc::invalid_argument, "invalid hidden layer shape");
    require(side_m > 0.0, Errc::invalid_argument, "region side must be positive");
    encoding.validate();
}

std::vector<int> estimator_widths(const EstimatorConfig& config) {
    std::vector<int> w{2 * config.n_receivers + config.encoding.output_dim()};
    for (int l = 0; l < config.hidden_layers; ++l) w.push_back(config.hidden_width);
    w.push_back(2);
    return w;
}

CurrentEstimator::CurrentEstimator(const EstimatorConfig& config, std::uint64_t seed) : config_(config) {
    config_.validate();
    for (int t = 0; t < config_.n_transmitters; ++t) {
        nets_.push_back(make_dense_net(estimator_widths(config_), 1.0, splitmix64(seed + static_cast<std::uint64_t>(t))));
    }
}

void CurrentEstimator::set_normalization(RRowMatrix mean, RRowMatrix scale) {
    require(mean.rows() == n_transmitters() && mean.cols() == feature_dim() && scale.rows() == mean.rows() &&
                scale.cols() == mean.cols(),
            Errc::invalid_argument, "normalization statistics have the wrong shape");
    require((scale.array() > 0.0).all() && scale.allFinite() && mean.allFinite(), Errc::invalid_argument,
            "normalization scales must be positive and finite");
    feature_mean_ = std::move(mean);
    feature_scale_ = std::move(scale);
}

RVector CurrentEstimator::features(const CVector& e_scat, int t) const {
    require(e_scat.size() == n_receivers(), Errc::invalid_argument,
            "scattered field has " + std::to_string(e_scat.size()) + " entries, model expects " +
                std::to_string(n_receivers()));
    require(t >= 0 && t < n_transmitters(), Errc::invalid_argument, "transmitter index out of range");
    RVector f(feature_dim());
    for (Eigen::Index r = 0; r < e_scat.size(); ++r) {
        f[2 * r] = e_scat[r].real();
        f[2 * r + 1] = e_scat[r].imag();
    }
    if (has_normalization()) {
        f = ((f - feature_mean_.row(t).transpose()).array() / feature_scale_.row(t).transpose().array()).matrix();
    }
    return f;
}

bool operator==(const CurrentEstimator& a, const CurrentEstimator& b) {
    if (a.nets_.size() != b.nets_.size() || a.feature_mean_ != b.feature_mean_ ||
        a.feature_scale_ != b.feature_scale_ || a.config_.n_receivers != b.config_.n_receivers ||
        a.config_.encoding.n_frequencies != b.config_.encoding.n_frequencies || a.config_.side_m != b.config_.side_m) {
        return false;
    }
    for (std::size_t t = 0; t < a.nets_.size(); ++t) {
        if (a.nets_[t].widths() != b.nets_[t].widths() || a.nets_[t].output_scale() != b.nets_[t].output_scale() ||
            a.nets_[t].parameters() != b.nets_[t].parameters()) {
            return false;
        }
    }
    return true;
}

CVector output_to_current(const RMatrix& output) {
    require(output.rows() == 2, Errc::invalid_argument, "current output needs 2 rows");
    CVector j(output.cols());
    for (Eigen::Index i = 0; i < output.cols(); ++i) j[i] = {output(0, i), output(1, i)};
    return j;
}

ComplexField estimate_current(const CurrentEstimator& model, const CVector& e_scat, int tx_index,
                              const GridSpec& grid) {
    if (!model.has_normalization()) warn("estimate_current: model has no input normalization statistics");
    require(std::abs(grid.side_length() - model.config().side_m) <= 1e-12 * model.config().side_m,
            Errc::invalid_argument, "grid side does not match the model's region of interest");
    const RVector f = model.features(e_scat, tx_index);
    const RMatrix enc = encode_grid(grid, model.config().encoding);
    const RMatrix out = net_forward_factored(model.net(tx_index), RMatrix(f), enc);
    return {output_to_current(out), FieldRole::Current};
}

}  // namespace eisp
