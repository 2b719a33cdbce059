#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "eisp/dataset.hpp"
#include "eisp/green.hpp"
#include "eisp/neural.hpp"

namespace eisp {

struct PermittivityOptions {
    double delta{1e-6};  ///< cells with |E^t| < delta * max|E^t| fall back to vacuum
};

/// Intermediate values of solve_permittivity needed by its backward pass.
struct PermittivityContext {
    CVector current;
    CVector total;
    std::vector<std::uint8_t> active;  ///< 1 where eps depends smoothly on J (no clamp, no fallback)
};

/// E^t = E^i + G^d J, xi = J / E^t, eps = max(Re xi + 1, 1) elementwise.
RVector solve_permittivity(const CVector& current, const CVector& incident, const GreenOperators& ops,
                           PermittivityContext* ctx = nullptr, const PermittivityOptions& options = {});
RVector solve_permittivity(const ComplexField& current, const ComplexField& incident, const GreenOperators& ops);

/// Gradient w.r.t. J (convention dL/dRe + i dL/dIm) given dL/deps.
CVector permittivity_backward(const PermittivityContext& ctx, const GreenOperators& ops, const RVector& grad_eps);

/// Arithmetic mean of the estimates, clamped to >= 1.
RVector fuse(std::span<const RVector> estimates);

struct LossWeights {
    double curr{100.0};
    double perm{1e-3};
    double scat{1e-7};

    void validate() const;
};

struct LossParts {
    double curr{0.0};
    double perm{0.0};
    double scat{0.0};
    double total{0.0};
};

/// One sample's predicted or reference quantities.
struct Sample {
    CVector current;
    RVector permittivity;
    CVector scattered;
};

/// Squared errors mean-reduced over elements and batch; total = weighted sum.
LossParts loss(std::span<const Sample> pred, std::span<const Sample> gt, const LossWeights& w);
LossParts loss(const Sample& pred, const Sample& gt, const LossWeights& w);

/// Reference data for one (scene, transmitter) training sample.
struct SampleTarget {
    CVector current;
    RVector permittivity;
    CVector measured;
    CVector incident;
};

struct SampleEvaluation {
    LossParts parts;   ///< this sample's contribution (already divided by batch_size)
    Sample prediction;
    RVector gradient;  ///< dL/dtheta, empty unless requested
};

/// Forward pass of one transmitter network on one scene, the full three-term loss,
/// and optionally the exact parameter gradient through the solver and both Green maps.
SampleEvaluation evaluate_sample(const DenseNet& net, const RVector& features, const RMatrix& encoded,
                                 const SampleTarget& target, const GreenOperators& ops, const LossWeights& w,
                                 double batch_size, bool want_gradient);

/// Sets per-transmitter input standardization from the measured fields and the output
/// scale s_J = 3 * RMS |J| from the ground-truth currents.
void fit_statistics(CurrentEstimator& model, const Dataset& dataset);

struct EpochLoss {
    int epoch{0};
    double l_curr{0.0};
    double l_perm{0.0};
    double l_scat{0.0};
    double total{0.0};
};

struct TrainCheckpoint {
    int epochs_done{0};
    CurrentEstimator model;
    std::vector<AdamState> optimizer;
    std::vector<EpochLoss> history;
};

Bytes save_checkpoint(const TrainCheckpoint& ckpt);
TrainCheckpoint load_checkpoint(std::span<const std::uint8_t> bytes);

struct TrainConfig {
    OptimizerConfig optimizer;
    LossWeights weights;
    std::uint64_t seed{0};
    int threads{1};
    bool average_over_transmitters{false};  ///< default sums the per-transmitter losses
    int checkpoint_every{0};
    std::filesystem::path checkpoint_path;
    std::function<void(const EpochLoss&)> on_epoch;
};

struct TrainResult {
    CurrentEstimator model;
    std::vector<EpochLoss> history;
    std::vector<AdamState> optimizer;
};

/// Mini-batch training; networks are independent, so transmitters train in parallel.
/// Batch order is a function of (seed, epoch) only.
TrainResult train(const Dataset& dataset, CurrentEstimator model, const GreenOperators& ops, const TrainConfig& config,
                  const TrainCheckpoint* resume = nullptr);

std::string history_csv(std::span<const EpochLoss> history);

struct Reconstruction {
    std::vector<RVector> per_transmitter;
    RVector fused;
    CRowMatrix current;    ///< N x M^2
    CRowMatrix scattered;  ///< N x N_r, G^s J
};

/// Feed-forward reconstruction: one network pass per transmitter, solver, fusion.
Reconstruction infer(const CurrentEstimator& model, const CRowMatrix& measured, const GreenOperators& ops,
                     const CRowMatrix& incident);

/// Least-squares scale of the backpropagated current: gamma = v^H E / ||v||^2, v = G^s (G^s)^H E.
cplx bp_gamma(const CVector& measured, const GreenOperators& ops);

/// Backpropagation baseline: J_t = gamma_t (G^s)^H E^s_t, then the permittivity solver and fusion.
Reconstruction bp_reconstruct(const CRowMatrix& measured, const GreenOperators& ops, const CRowMatrix& incident);

}  // namespace eisp
