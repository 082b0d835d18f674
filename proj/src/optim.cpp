#include "pslmorl/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace pslmorl {

OptimizerState OptimizerState::sgd(double lr) {
    if (lr <= 0.0) throw std::invalid_argument("learning rate must be > 0");
    OptimizerState s;
    s.kind = OptKind::Sgd;
    s.learning_rate = lr;
    return s;
}

OptimizerState OptimizerState::adam(double lr, double beta1, double beta2, double eps) {
    if (lr <= 0.0) throw std::invalid_argument("learning rate must be > 0");
    OptimizerState s;
    s.kind = OptKind::Adam;
    s.learning_rate = lr;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.eps = eps;
    return s;
}

namespace {

void check_finite(const Gradients& grads) {
    for (std::size_t li = 0; li < grads.layers.size(); ++li) {
        const auto& l = grads.layers[li];
        for (Eigen::Index i = 0; i < l.weight.size(); ++i) {
            if (!std::isfinite(l.weight.data()[i])) {
                throw std::domain_error("non-finite gradient at layer " +
                                        std::to_string(li) + " weight index " +
                                        std::to_string(i));
            }
        }
        for (Eigen::Index i = 0; i < l.bias.size(); ++i) {
            if (!std::isfinite(l.bias[i])) {
                throw std::domain_error("non-finite gradient at layer " +
                                        std::to_string(li) + " bias index " +
                                        std::to_string(i));
            }
        }
    }
}

void ensure_moments(OptimizerState& state, const MlpParams& params) {
    if (!state.m.empty()) return;
    for (const auto& l : params.layers) {
        Layer zero;
        zero.weight = Matrix::Zero(l.weight.rows(), l.weight.cols());
        zero.bias = Vector::Zero(l.bias.size());
        state.m.push_back(zero);
        state.v.push_back(std::move(zero));
    }
}

}  // namespace

void optimizer_step(OptimizerState& state, MlpParams& params, const Gradients& grads) {
    if (grads.layers.size() != params.layers.size()) {
        throw std::invalid_argument("gradient/parameter shape mismatch");
    }
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        if (grads.layers[i].weight.rows() != params.layers[i].weight.rows() ||
            grads.layers[i].weight.cols() != params.layers[i].weight.cols()) {
            throw std::invalid_argument("gradient/parameter shape mismatch at layer " +
                                        std::to_string(i));
        }
    }
    check_finite(grads);
    state.step_count += 1;

    if (state.kind == OptKind::Sgd) {
        for (std::size_t i = 0; i < params.layers.size(); ++i) {
            params.layers[i].weight -= state.learning_rate * grads.layers[i].weight;
            params.layers[i].bias -= state.learning_rate * grads.layers[i].bias;
        }
        return;
    }

    ensure_moments(state, params);
    const double b1 = state.beta1;
    const double b2 = state.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        auto& m = state.m[i];
        auto& v = state.v[i];
        const auto& g = grads.layers[i];
        m.weight = b1 * m.weight + (1.0 - b1) * g.weight;
        m.bias = b1 * m.bias + (1.0 - b1) * g.bias;
        v.weight = b2 * v.weight.array().matrix() +
                   (1.0 - b2) * g.weight.cwiseProduct(g.weight);
        v.bias = b2 * v.bias + (1.0 - b2) * g.bias.cwiseProduct(g.bias);
        params.layers[i].weight.array() -=
            state.learning_rate * (m.weight.array() / bc1) /
            ((v.weight.array() / bc2).sqrt() + state.eps);
        params.layers[i].bias.array() -=
            state.learning_rate * (m.bias.array() / bc1) /
            ((v.bias.array() / bc2).sqrt() + state.eps);
    }
}

void soft_update(MlpParams& target, const MlpParams& online, double tau) {
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("tau must be in [0, 1]");
    if (target.layers.size() != online.layers.size()) {
        throw std::invalid_argument("network shapes differ in soft update");
    }
    for (std::size_t i = 0; i < target.layers.size(); ++i) {
        auto& t = target.layers[i];
        const auto& o = online.layers[i];
        if (t.weight.rows() != o.weight.rows() || t.weight.cols() != o.weight.cols()) {
            throw std::invalid_argument("layer " + std::to_string(i) +
                                        " shape differs in soft update");
        }
        t.weight = tau * o.weight + (1.0 - tau) * t.weight;
        t.bias = tau * o.bias + (1.0 - tau) * t.bias;
    }
}

}  // namespace pslmorl
