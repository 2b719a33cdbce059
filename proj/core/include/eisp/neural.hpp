#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eisp/blob.hpp"
#include "eisp/grid.hpp"

namespace eisp {

struct EncodingSpec {
    int n_frequencies{10};
    int input_dim{2};

    [[nodiscard]] int output_dim() const noexcept { return 2 * n_frequencies * input_dim; }
    void validate() const;
};

/// Fourier features of a point of the region of interest. Coordinates are first scaled
/// by pi / half_side so the region maps onto [-pi, pi]^2. Output order is frequency-major,
/// then coordinate, then (sin, cos):
///   [sin(x), cos(x), sin(y), cos(y), sin(2x), cos(2x), sin(2y), cos(2y), ...]
RVector encode_position(Point2 x, const EncodingSpec& spec, double half_side);

/// Encodings of every cell center, one column per cell (output_dim x M^2).
RMatrix encode_grid(const GridSpec& grid, const EncodingSpec& spec);

/// Fully connected network: ReLU hidden layers, output_scale * tanh on the last layer.
/// Parameters live in one flat vector, layer by layer: W_l (out x in, column-major), then b_l.
class DenseNet {
public:
    DenseNet() = default;
    DenseNet(std::vector<int> widths, double output_scale);

    [[nodiscard]] const std::vector<int>& widths() const noexcept { return widths_; }
    [[nodiscard]] int n_layers() const noexcept { return static_cast<int>(widths_.size()) - 1; }
    [[nodiscard]] int input_dim() const { return widths_.front(); }
    [[nodiscard]] int output_dim() const { return widths_.back(); }
    [[nodiscard]] double output_scale() const noexcept { return output_scale_; }
    void set_output_scale(double s);

    [[nodiscard]] RVector& parameters() noexcept { return theta_; }
    [[nodiscard]] const RVector& parameters() const noexcept { return theta_; }
    [[nodiscard]] Eigen::Index parameter_count() const noexcept { return theta_.size(); }

    [[nodiscard]] Eigen::Map<const RMatrix> weight(int layer) const;
    [[nodiscard]] Eigen::Map<RMatrix> weight(int layer);
    [[nodiscard]] Eigen::Map<const RVector> bias(int layer) const;
    [[nodiscard]] Eigen::Map<RVector> bias(int layer);
    [[nodiscard]] Eigen::Index weight_offset(int layer) const { return offsets_[static_cast<std::size_t>(layer)]; }

    /// Human-readable location of flat parameter index i, e.g. "layer 2 weight (3, 7)".
    [[nodiscard]] std::string describe_parameter(Eigen::Index i) const;

private:
    std::vector<int> widths_;
    std::vector<Eigen::Index> offsets_;
    double output_scale_{1.0};
    RVector theta_;
};

/// He-uniform hidden layers (bound sqrt(6 / fan_in)), zero biases, zero final layer.
DenseNet make_dense_net(std::vector<int> widths, double output_scale, std::uint64_t seed);

/// Activations kept by a forward pass for the matching backward pass.
struct ForwardContext {
    const DenseNet* net{nullptr};
    bool factored{false};
    RMatrix input;               ///< dense input (in x B)
    RMatrix scene_features;      ///< factored input: F x S, shared by all points of a scene
    RMatrix point_features;      ///< factored input: P x C, shared by all scenes
    std::vector<RMatrix> hidden; ///< post-ReLU activations of hidden layers
    RMatrix squashed;            ///< tanh of the final pre-activation
};

/// Columns are samples: input (in x B) -> output (out x B).
RMatrix net_forward(const DenseNet& net, const RMatrix& input, ForwardContext* ctx = nullptr);
RVector net_forward(const DenseNet& net, const RVector& input);

/// Same network evaluated on every (scene, point) pair, input = [scene feature; point feature].
/// Column s * C + c of the output belongs to scene s and point c. The first layer is
/// split so the shared parts are multiplied once.
RMatrix net_forward_factored(const DenseNet& net, const RMatrix& scene_features, const RMatrix& point_features,
                             ForwardContext* ctx = nullptr);

/// Reverse pass: dL/dtheta (flat, same layout as parameters()) for dL/doutput = upstream.
RVector net_backward(const DenseNet& net, const ForwardContext& ctx, const RMatrix& upstream);

struct OptimizerConfig {
    double learning_rate{1e-3};
    double beta1{0.9};
    double beta2{0.999};
    double epsilon{1e-8};
    int step_size{10};
    double gamma{0.8};
    double clip_norm{1e-4};
    int epochs{300};
    int batch_size{64};

    void validate() const;
    /// StepLR: learning_rate * gamma^floor(epoch / step_size).
    [[nodiscard]] double rate(int epoch) const;
};

struct AdamState {
    RVector m;
    RVector v;
    std::int64_t step{0};

    static AdamState zeros(Eigen::Index n) { return {RVector::Zero(n), RVector::Zero(n), 0}; }
};

struct AdamStepInfo {
    double gradient_norm{0.0};  ///< before clipping
    double learning_rate{0.0};
};

/// Global-norm clipping, then one bias-corrected Adam update of `params`.
/// A non-finite gradient raises training-failure naming the parameter.
AdamStepInfo adam_step(DenseNet& net, AdamState& state, RVector gradient, const OptimizerConfig& config, int epoch);

struct EstimatorConfig {
    int n_transmitters{1};
    int n_receivers{32};
    int hidden_width{256};
    int hidden_layers{7};  ///< 7 hidden interfaces = 8 weight layers
    EncodingSpec encoding;
    double side_m{2.0};

    void validate() const;
};

/// One dense network per transmitter, mapping (normalized E^s row, encoded position) to J.
class CurrentEstimator {
public:
    CurrentEstimator() = default;
    CurrentEstimator(const EstimatorConfig& config, std::uint64_t seed);

    [[nodiscard]] const EstimatorConfig& config() const noexcept { return config_; }
    [[nodiscard]] int n_transmitters() const noexcept { return config_.n_transmitters; }
    [[nodiscard]] int n_receivers() const noexcept { return config_.n_receivers; }
    [[nodiscard]] int feature_dim() const noexcept { return 2 * config_.n_receivers; }
    [[nodiscard]] DenseNet& net(int t) { return nets_.at(static_cast<std::size_t>(t)); }
    [[nodiscard]] const DenseNet& net(int t) const { return nets_.at(static_cast<std::size_t>(t)); }

    /// Per-transmitter affine standardization of interleaved (re, im) E^s features.
    void set_normalization(RRowMatrix mean, RRowMatrix scale);
    [[nodiscard]] bool has_normalization() const noexcept { return feature_mean_.size() > 0; }
    [[nodiscard]] const RRowMatrix& feature_mean() const noexcept { return feature_mean_; }
    [[nodiscard]] const RRowMatrix& feature_scale() const noexcept { return feature_scale_; }

    /// Normalized feature vector (2 N_r) for transmitter t.
    [[nodiscard]] RVector features(const CVector& e_scat, int t) const;

    friend bool operator==(const CurrentEstimator& a, const CurrentEstimator& b);

private:
    EstimatorConfig config_;
    std::vector<DenseNet> nets_;
    RRowMatrix feature_mean_;
    RRowMatrix feature_scale_;
};

/// Network widths for an estimator configuration.
std::vector<int> estimator_widths(const EstimatorConfig& config);

/// Evaluates net t at every cell center in one batched pass.
ComplexField estimate_current(const CurrentEstimator& model, const CVector& e_scat, int tx_index,
                              const GridSpec& grid);

/// Complex current from network output columns (re, im) pairs.
CVector output_to_current(const RMatrix& output);

inline constexpr std::uint32_t weights_schema_version = 1;

Bytes save_weights(const CurrentEstimator& model);
CurrentEstimator load_weights(std::span<const std::uint8_t> bytes);

struct WeightExpectations {
    std::optional<int> n_transmitters;
    std::optional<int> n_receivers;
};
/// Loads and checks the model against the expected geometry (format-error on mismatch).
CurrentEstimator load_weights(std::span<const std::uint8_t> bytes, const WeightExpectations& expected);

}  // namespace eisp
