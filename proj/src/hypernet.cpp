#include "pslmorl/hypernet.hpp"

#include <stdexcept>

namespace pslmorl {

void check_fusion(const FusionConfig& cfg) {
    if (cfg.alpha < 0.0 || cfg.alpha > 1.0) {
        throw std::invalid_argument("fusion alpha must be in [0, 1]");
    }
}

Hypernetwork Hypernetwork::init(int preference_dim,
                                const std::vector<LayerSpec>& target_spec,
                                const std::vector<int>& hidden, Rng& rng,
                                double out_scale, Activation hidden_act) {
    validate_spec(target_spec);
    if (preference_dim < 2) {
        throw std::invalid_argument("hypernetwork input dim must be >= 2");
    }
    std::vector<LayerSpec> spec;
    int in = preference_dim;
    for (int h : hidden) {
        spec.push_back({in, h, hidden_act});
        in = h;
    }
    spec.push_back({in, static_cast<int>(flat_size(target_spec)), Activation::Identity});

    Hypernetwork hn;
    hn.net = MlpParams::init(spec, rng);
    hn.net.layers.back().weight *= out_scale;
    hn.target_spec = target_spec;
    return hn;
}

GeneratedParams generate_params(const Hypernetwork& h, const PreferenceVector& w) {
    if (w.size() != h.net.input_dim()) {
        throw std::invalid_argument("preference dim does not match hypernetwork input");
    }
    GeneratedParams out;
    out.theta2.data = mlp_forward(h.net, w, &out.tape);
    out.theta2.shape_table = shape_table_for(h.target_spec);
    return out;
}

namespace {

void check_same_shape(const FlatParams& a, const FlatParams& b) {
    if (a.data.size() != b.data.size()) {
        throw std::invalid_argument("flat parameter length mismatch: " +
                                    std::to_string(a.data.size()) + " vs " +
                                    std::to_string(b.data.size()));
    }
}

}  // namespace

FlatParams fuse(const FlatParams& theta1, const FlatParams& theta2,
                const FusionConfig& cfg) {
    check_fusion(cfg);
    check_same_shape(theta1, theta2);
    FlatParams out;
    out.data = (1.0 - cfg.alpha) * theta1.data + cfg.alpha * theta2.data;
    out.shape_table = theta1.shape_table;
    return out;
}

FlatParams fuse_add(const FlatParams& theta1, const FlatParams& theta2) {
    check_same_shape(theta1, theta2);
    FlatParams out;
    out.data = theta1.data + theta2.data;
    out.shape_table = theta1.shape_table;
    return out;
}

FlatParams backprop_fusion(const Hypernetwork& h, const FlatParams& grad_theta,
                           const FusionConfig& cfg, const MlpTape& tape,
                           Gradients& grad_phi) {
    check_fusion(cfg);
    if (static_cast<std::size_t>(grad_theta.data.size()) != h.output_size()) {
        throw std::invalid_argument("grad length does not match generated parameters");
    }
    FlatParams grad_theta1;
    grad_theta1.data = (1.0 - cfg.alpha) * grad_theta.data;
    grad_theta1.shape_table = grad_theta.shape_table;
    if (cfg.alpha != 0.0) {
        mlp_backward(h.net, tape, cfg.alpha * grad_theta.data, grad_phi);
    }
    return grad_theta1;
}

ComposeMode compose_mode_from_string(const std::string& name) {
    if (name == "fusion") return ComposeMode::Fusion;
    if (name == "gen") return ComposeMode::Generated;
    if (name == "add") return ComposeMode::Additive;
    throw std::invalid_argument("unknown compose mode '" + name +
                                "' (expected fusion, gen, or add)");
}

std::string to_string(ComposeMode mode) {
    switch (mode) {
        case ComposeMode::Fusion: return "fusion";
        case ComposeMode::Generated: return "gen";
        case ComposeMode::Additive: return "add";
    }
    throw std::logic_error("bad compose mode");
}

FlatParams compose_params(const FlatParams& theta1, const FlatParams& theta2,
                          ComposeMode mode, const FusionConfig& cfg) {
    switch (mode) {
        case ComposeMode::Fusion: return fuse(theta1, theta2, cfg);
        case ComposeMode::Generated: return fuse(theta1, theta2, FusionConfig{1.0});
        case ComposeMode::Additive: return fuse_add(theta1, theta2);
    }
    throw std::logic_error("bad compose mode");
}

FlatParams backprop_compose(const Hypernetwork& h, const FlatParams& grad_theta,
                            ComposeMode mode, const FusionConfig& cfg,
                            const MlpTape& tape, Gradients& grad_phi) {
    switch (mode) {
        case ComposeMode::Fusion:
            return backprop_fusion(h, grad_theta, cfg, tape, grad_phi);
        case ComposeMode::Generated:
            return backprop_fusion(h, grad_theta, FusionConfig{1.0}, tape, grad_phi);
        case ComposeMode::Additive: {
            backprop_fusion(h, grad_theta, FusionConfig{1.0}, tape, grad_phi);
            return grad_theta;
        }
    }
    throw std::logic_error("bad compose mode");
}

}  // namespace pslmorl
