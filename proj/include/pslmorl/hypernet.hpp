#pragma once

#include <string>

#include "pslmorl/mlp.hpp"
#include "pslmorl/preference.hpp"

namespace pslmorl {

struct FusionConfig {
    double alpha = 0.0;  // 0 = base policy only, 1 = generated parameters only
};

void check_fusion(const FusionConfig& cfg);

// Maps a preference vector to a flat parameter vector for a target network.
// A single flat output head, sliced by the target's shape table.
struct Hypernetwork {
    MlpParams net;
    std::vector<LayerSpec> target_spec;

    // hidden: hidden layer widths. The final layer's weights are scaled by
    // out_scale after init so early generated parameters stay small relative
    // to the base policy.
    static Hypernetwork init(int preference_dim, const std::vector<LayerSpec>& target_spec,
                             const std::vector<int>& hidden, Rng& rng,
                             double out_scale = 0.01,
                             Activation hidden_act = Activation::Relu);

    std::size_t output_size() const { return flat_size(target_spec); }
};

// Generated parameters plus the activation tape needed to route gradients
// back into the hypernetwork.
struct GeneratedParams {
    FlatParams theta2;
    MlpTape tape;
};

GeneratedParams generate_params(const Hypernetwork& h, const PreferenceVector& w);

// theta = (1 - alpha) * theta1 + alpha * theta2
FlatParams fuse(const FlatParams& theta1, const FlatParams& theta2,
                const FusionConfig& cfg);

// theta = theta1 + theta2 (ablation variant)
FlatParams fuse_add(const FlatParams& theta1, const FlatParams& theta2);

// Splits d(loss)/d(theta) across the fusion: the base policy receives
// (1 - alpha) * grad, and alpha * grad is pushed through the hypernetwork
// tape into grad_phi. Returns the gradient for theta1.
FlatParams backprop_fusion(const Hypernetwork& h, const FlatParams& grad_theta,
                           const FusionConfig& cfg, const MlpTape& tape,
                           Gradients& grad_phi);

// How the working parameters are assembled from the base policy theta1 and
// the generated theta2. Fusion is the main method; Generated (theta2 alone)
// and Additive (theta1 + theta2) are the ablation variants.
enum class ComposeMode { Fusion, Generated, Additive };

ComposeMode compose_mode_from_string(const std::string& name);
std::string to_string(ComposeMode mode);

FlatParams compose_params(const FlatParams& theta1, const FlatParams& theta2,
                          ComposeMode mode, const FusionConfig& cfg);

// Gradient counterpart of compose_params; accumulates the hypernetwork share
// into grad_phi and returns the share for theta1.
FlatParams backprop_compose(const Hypernetwork& h, const FlatParams& grad_theta,
                            ComposeMode mode, const FusionConfig& cfg,
                            const MlpTape& tape, Gradients& grad_phi);

}  // namespace pslmorl
