#pragma once

#include "pslmorl/mlp.hpp"

namespace pslmorl {

enum class OptKind { Sgd, Adam };

struct OptimizerState {
    OptKind kind = OptKind::Sgd;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step_count = 0;
    std::vector<Layer> m;  // first moments (adam)
    std::vector<Layer> v;  // second moments (adam)

    static OptimizerState sgd(double lr);
    static OptimizerState adam(double lr, double beta1 = 0.9, double beta2 = 0.999,
                               double eps = 1e-8);
};

// In-place update of `params`. Adam moments are lazily allocated on the first
// step. Throws std::domain_error naming the offending index if any gradient
// entry is non-finite.
void optimizer_step(OptimizerState& state, MlpParams& params, const Gradients& grads);

// target <- tau * online + (1 - tau) * target, layer by layer.
void soft_update(MlpParams& target, const MlpParams& online, double tau);

}  // namespace pslmorl
