#include <cmath>

#include "eisp/neural.hpp"

namespace eisp {

void OptimizerConfig::validate() const {
    require(learning_rate > 0.0 && beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && epsilon > 0.0,
            Errc::invalid_argument, "Adam rates must be positive with betas in [0, 1)");
    require(step_size >= 1 && gamma > 0.0, Errc::invalid_argument, "step decay needs step_size >= 1 and gamma > 0");
    require(clip_norm > 0.0, Errc::invalid_argument, "clip norm must be positive");
    require(epochs >= 0 && batch_size >= 1, Errc::invalid_argument, "epochs >= 0 and batch_size >= 1 required");
}

double OptimizerConfig::rate(int epoch) const {
    return learning_rate * std::pow(gamma, static_cast<double>(epoch / step_size));
}

AdamStepInfo adam_step(DenseNet& net, AdamState& state, RVector gradient, const OptimizerConfig& config, int epoch) {
    require(gradient.size() == net.parameter_count(), Errc::invalid_argument, "gradient size mismatch");
    if (state.m.size() == 0) state = AdamState::zeros(net.parameter_count());
    require(state.m.size() == gradient.size() && state.v.size() == gradient.size(), Errc::invalid_argument,
            "optimizer state size mismatch");
    for (Eigen::Index i = 0; i < gradient.size(); ++i) {
        if (!std::isfinite(gradient[i])) {
            fail(Errc::training_failure, "non-finite gradient at " + net.describe_parameter(i) + " (epoch " +
                                             std::to_string(epoch) + ")");
        }
    }
    AdamStepInfo info;
    info.gradient_norm = gradient.norm();
    info.learning_rate = config.rate(epoch);
    if (info.gradient_norm > config.clip_norm) gradient *= config.clip_norm / info.gradient_norm;

    ++state.step;
    state.m = config.beta1 * state.m + (1.0 - config.beta1) * gradient;
    state.v = config.beta2 * state.v + (1.0 - config.beta2) * gradient.cwiseAbs2();
    const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
    net.parameters().array() -=
        info.learning_rate * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + config.epsilon);
    if (!net.parameters().allFinite()) {
        fail(Errc::training_failure, "non-finite parameters after Adam step (epoch " + std::to_string(epoch) + ")");
    }
    return info;
}

}  // namespace eisp
