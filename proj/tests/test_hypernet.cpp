#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "pslmorl/hypernet.hpp"
#include "pslmorl/preference.hpp"
#include "pslmorl/rng.hpp"

using namespace pslmorl;

namespace {

const std::vector<LayerSpec> kTargetSpec{LayerSpec{2, 4, Activation::Tanh},
                                         LayerSpec{4, 2, Activation::Identity}};

PreferenceVector pref2(double a, double b) {
    PreferenceVector w(2);
    w << a, b;
    return w;
}

FlatParams random_flat(const std::vector<LayerSpec>& spec, Rng& rng) {
    FlatParams f;
    f.data = rng.normal_vector(static_cast<int>(flat_size(spec)));
    f.shape_table = shape_table_for(spec);
    return f;
}

}  // namespace

TEST_CASE("fusion config validation") {
    CHECK_NOTHROW(check_fusion(FusionConfig{0.0}));
    CHECK_NOTHROW(check_fusion(FusionConfig{1.0}));
    CHECK_THROWS_AS(check_fusion(FusionConfig{-0.1}), std::invalid_argument);
    CHECK_THROWS_AS(check_fusion(FusionConfig{1.5}), std::invalid_argument);
}

TEST_CASE("a zero hypernetwork generates all-zero target parameters") {
    Rng rng(1);
    Hypernetwork h = Hypernetwork::init(2, kTargetSpec, {6}, rng);
    for (auto& layer : h.net.layers) {
        layer.weight.setZero();
        layer.bias.setZero();
    }
    GeneratedParams gen = generate_params(h, pref2(0.3, 0.7));
    CHECK(gen.theta2.data.norm() == 0.0);
    CHECK(gen.theta2.data.size() == static_cast<Eigen::Index>(h.output_size()));
}

TEST_CASE("generation is deterministic and preference-sensitive") {
    Rng rng(42);
    Hypernetwork h = Hypernetwork::init(2, kTargetSpec, {8}, rng, 0.1, Activation::Tanh);
    GeneratedParams a = generate_params(h, pref2(0.3, 0.7));
    GeneratedParams b = generate_params(h, pref2(0.3, 0.7));
    GeneratedParams c = generate_params(h, pref2(0.7, 0.3));
    CHECK(a.theta2.data == b.theta2.data);
    CHECK((a.theta2.data - c.theta2.data).norm() > 1e-8);
}

TEST_CASE("out_scale shrinks the generated parameters") {
    Rng ra(7), rb(7);
    Hypernetwork big = Hypernetwork::init(2, kTargetSpec, {8}, ra, 1.0);
    Hypernetwork small = Hypernetwork::init(2, kTargetSpec, {8}, rb, 0.01);
    PreferenceVector w = pref2(0.5, 0.5);
    double nb = generate_params(big, w).theta2.data.norm();
    double ns = generate_params(small, w).theta2.data.norm();
    CHECK(ns < 0.5 * nb);
}

TEST_CASE("fuse interpolates between theta1 and theta2") {
    Rng rng(3);
    FlatParams t1 = random_flat(kTargetSpec, rng);
    FlatParams t2 = random_flat(kTargetSpec, rng);
    CHECK(fuse(t1, t2, FusionConfig{0.0}).data == t1.data);
    CHECK(fuse(t1, t2, FusionConfig{1.0}).data == t2.data);
    Eigen::VectorXd mid = fuse(t1, t2, FusionConfig{0.5}).data;
    CHECK((mid - 0.5 * (t1.data + t2.data)).norm() < 1e-12);
    CHECK(fuse(t1, t1, FusionConfig{0.3}).data.isApprox(t1.data, 1e-15));
}

TEST_CASE("fuse_add is plain addition and relates to fuse at alpha one half") {
    Rng rng(4);
    FlatParams t1 = random_flat(kTargetSpec, rng);
    FlatParams t2 = random_flat(kTargetSpec, rng);
    Eigen::VectorXd sum = fuse_add(t1, t2).data;
    CHECK((sum - (t1.data + t2.data)).norm() == 0.0);
    FlatParams d1 = t1, d2 = t2;
    d1.data *= 2.0;
    d2.data *= 2.0;
    CHECK((fuse(d1, d2, FusionConfig{0.5}).data - sum).norm() < 1e-12);
}

TEST_CASE("backprop_fusion gates the two gradient paths by alpha") {
    Rng rng(11);
    Hypernetwork h = Hypernetwork::init(2, kTargetSpec, {8}, rng, 0.1, Activation::Tanh);
    GeneratedParams gen = generate_params(h, pref2(0.4, 0.6));
    FlatParams grad_theta = random_flat(kTargetSpec, rng);

    Gradients phi0 = Gradients::zeros_like(h.net);
    FlatParams g1_at0 = backprop_fusion(h, grad_theta, FusionConfig{0.0}, gen.tape, phi0);
    CHECK(g1_at0.data == grad_theta.data);
    CHECK(flatten(phi0).data.norm() == 0.0);

    Gradients phi1 = Gradients::zeros_like(h.net);
    FlatParams g1_at1 = backprop_fusion(h, grad_theta, FusionConfig{1.0}, gen.tape, phi1);
    CHECK(g1_at1.data.norm() == 0.0);
    CHECK(flatten(phi1).data.norm() > 0.0);
}

TEST_CASE("fused-network loss gradients match finite differences end to end") {
    // Scalar loss: L = g . f(x; fuse(theta1, H(w))), differentiated through
    // the target network, the fusion, and the hypernetwork.
    Rng rng(2025);
    Hypernetwork h = Hypernetwork::init(2, kTargetSpec, {6}, rng, 0.2, Activation::Tanh);
    FlatParams theta1 = random_flat(kTargetSpec, rng);
    theta1.data *= 0.5;
    const FusionConfig fusion{0.35};
    const PreferenceVector w = pref2(0.6, 0.4);
    const Vector x = rng.normal_vector(2);
    const Vector g = rng.normal_vector(2);

    auto loss_value = [&](const Hypernetwork& hn, const FlatParams& t1) {
        GeneratedParams gen = generate_params(hn, w);
        MlpParams net = unflatten(fuse(t1, gen.theta2, fusion), kTargetSpec);
        return g.dot(mlp_forward(net, x));
    };

    GeneratedParams gen = generate_params(h, w);
    FlatParams fused = fuse(theta1, gen.theta2, fusion);
    MlpParams net = unflatten(fused, kTargetSpec);
    MlpTape tape;
    mlp_forward(net, x, &tape);
    Gradients net_grads = Gradients::zeros_like(net);
    mlp_backward(net, tape, g, net_grads);
    Gradients grad_phi = Gradients::zeros_like(h.net);
    FlatParams grad_theta1 =
        backprop_fusion(h, flatten(net_grads), fusion, gen.tape, grad_phi);

    const double hstep = 1e-5;
    for (Eigen::Index k = 0; k < theta1.data.size(); ++k) {
        FlatParams tp = theta1, tm = theta1;
        tp.data[k] += hstep;
        tm.data[k] -= hstep;
        double fd = (loss_value(h, tp) - loss_value(h, tm)) / (2 * hstep);
        CHECK(std::abs(grad_theta1.data[k] - fd) < 1e-4);
    }
    Eigen::VectorXd phi_flat = flatten(grad_phi).data;
    FlatParams hflat = flatten(h.net);
    for (Eigen::Index k = 0; k < hflat.data.size(); ++k) {
        Hypernetwork hp = h, hm = h;
        FlatParams fp = hflat, fm = hflat;
        fp.data[k] += hstep;
        fm.data[k] -= hstep;
        hp.net = unflatten(fp, h.net.spec());
        hm.net = unflatten(fm, h.net.spec());
        double fd = (loss_value(hp, theta1) - loss_value(hm, theta1)) / (2 * hstep);
        CHECK(std::abs(phi_flat[k] - fd) < 1e-4);
    }
}

TEST_CASE("compose_params agrees with the mode it names") {
    Rng rng(8);
    FlatParams t1 = random_flat(kTargetSpec, rng);
    FlatParams t2 = random_flat(kTargetSpec, rng);
    FusionConfig fusion{0.25};
    CHECK(compose_params(t1, t2, ComposeMode::Fusion, fusion).data ==
          fuse(t1, t2, fusion).data);
    CHECK(compose_params(t1, t2, ComposeMode::Generated, fusion).data == t2.data);
    CHECK(compose_params(t1, t2, ComposeMode::Additive, fusion).data ==
          fuse_add(t1, t2).data);
}

TEST_CASE("backprop_compose routes gradients per mode") {
    Rng rng(15);
    Hypernetwork h = Hypernetwork::init(2, kTargetSpec, {8}, rng, 0.1, Activation::Tanh);
    GeneratedParams gen = generate_params(h, pref2(0.5, 0.5));
    FlatParams grad_theta = random_flat(kTargetSpec, rng);
    FusionConfig fusion{0.25};

    // Generated: theta1 receives nothing, the hypernetwork receives the full
    // gradient (same as fusion at alpha = 1).
    Gradients phi_gen = Gradients::zeros_like(h.net);
    FlatParams g1_gen =
        backprop_compose(h, grad_theta, ComposeMode::Generated, fusion, gen.tape, phi_gen);
    CHECK(g1_gen.data.norm() == 0.0);
    Gradients phi_full = Gradients::zeros_like(h.net);
    backprop_fusion(h, grad_theta, FusionConfig{1.0}, gen.tape, phi_full);
    CHECK(flatten(phi_gen).data.isApprox(flatten(phi_full).data, 1e-14));

    // Additive: both sides receive the full gradient.
    Gradients phi_add = Gradients::zeros_like(h.net);
    FlatParams g1_add =
        backprop_compose(h, grad_theta, ComposeMode::Additive, fusion, gen.tape, phi_add);
    CHECK(g1_add.data == grad_theta.data);
    CHECK(flatten(phi_add).data.isApprox(flatten(phi_full).data, 1e-14));

    // Fusion: defers to backprop_fusion with the given alpha.
    Gradients phi_fus = Gradients::zeros_like(h.net);
    FlatParams g1_fus =
        backprop_compose(h, grad_theta, ComposeMode::Fusion, fusion, gen.tape, phi_fus);
    Gradients phi_ref = Gradients::zeros_like(h.net);
    FlatParams g1_ref = backprop_fusion(h, grad_theta, fusion, gen.tape, phi_ref);
    CHECK(g1_fus.data == g1_ref.data);
    CHECK(flatten(phi_fus).data == flatten(phi_ref).data);
}

TEST_CASE("compose mode names round-trip and bad names throw") {
    for (auto mode : {ComposeMode::Fusion, ComposeMode::Generated, ComposeMode::Additive}) {
        CHECK(compose_mode_from_string(to_string(mode)) == mode);
    }
    CHECK_THROWS_AS(compose_mode_from_string("averaged"), std::invalid_argument);
}
