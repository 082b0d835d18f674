#include "pslmorl/verify.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "pslmorl/bellman.hpp"
#include "pslmorl/ddqn.hpp"
#include "pslmorl/gradcheck.hpp"
#include "pslmorl/td3.hpp"

namespace pslmorl {

namespace {

// Tanh hidden layers keep the loss surface smooth so central differences are
// trustworthy at h = 1e-5; the backward pass itself is activation-generic.

struct DdqnFixture {
    QNetConfig qcfg;
    Hypernetwork hyper;
    MlpParams theta1;
    MlpParams target;
    std::vector<Transition> batch;
    DdqnLossOptions opts;
    Interpolator interp = Interpolator::identity();
};

DdqnFixture make_ddqn_fixture(std::uint64_t seed, double alpha) {
    Rng rng(seed);
    DdqnFixture f;
    f.qcfg.state_dim = 3;
    f.qcfg.action_count = 3;
    f.qcfg.m = 2;
    f.qcfg.hidden = {8};
    f.qcfg.hidden_act = Activation::Tanh;
    const auto spec = f.qcfg.layer_spec();
    f.theta1 = MlpParams::init(spec, rng);
    f.target = MlpParams::init(spec, rng);
    f.hyper = Hypernetwork::init(f.qcfg.m, spec, {6}, rng, 0.1, Activation::Tanh);
    f.opts.gamma = 0.9;
    f.opts.fusion.alpha = alpha;
    for (int i = 0; i < 4; ++i) {
        Transition t;
        t.state = rng.normal_vector(f.qcfg.state_dim);
        t.next_state = rng.normal_vector(f.qcfg.state_dim);
        t.action_index = rng.uniform_int(f.qcfg.action_count);
        t.reward = rng.normal_vector(f.qcfg.m);
        t.done = i == 3;
        t.preference = rng.simplex_uniform(f.qcfg.m);
        f.batch.push_back(std::move(t));
    }
    return f;
}

Vector pack2(const Vector& a, const Vector& b) {
    Vector out(a.size() + b.size());
    out << a, b;
    return out;
}

}  // namespace

constexpr int kGradInstances = 20;

VerifyCheck verify_ddqn_gradients(std::uint64_t seed) {
    double worst = 0.0;
    for (int i = 0; i < kGradInstances; ++i) {
        const double alpha = 0.1 + 0.8 * static_cast<double>(i) / (kGradInstances - 1);
        DdqnFixture f = make_ddqn_fixture(derive_seed(seed, i), alpha);
        const auto spec = f.qcfg.layer_spec();
        const auto hspec = f.hyper.net.spec();
        const Vector theta1_flat = flatten(f.theta1).data;
        const Vector phi_flat = flatten(f.hyper.net).data;

        auto loss_at = [&](const Vector& x) {
            DdqnFixture probe = f;
            FlatParams t1;
            t1.data = x.head(theta1_flat.size());
            probe.theta1 = unflatten(t1, spec);
            FlatParams hp;
            hp.data = x.tail(phi_flat.size());
            probe.hyper.net = unflatten(hp, hspec);
            return ddqn_loss(probe.hyper, probe.theta1, probe.target, probe.qcfg,
                             probe.interp, probe.batch, probe.opts)
                .loss;
        };

        const DdqnLossResult res =
            ddqn_loss(f.hyper, f.theta1, f.target, f.qcfg, f.interp, f.batch, f.opts);
        const Vector analytic =
            pack2(flatten(res.grad_theta1).data, flatten(res.grad_phi).data);
        const Vector numeric =
            finite_difference_gradient(loss_at, pack2(theta1_flat, phi_flat));
        worst = std::max(worst, relative_error(analytic, numeric));
    }

    VerifyCheck check;
    check.name = "ddqn_loss_gradient_fd";
    check.bound = 1e-4;
    check.worst = worst;
    check.pass = check.worst <= check.bound;
    check.detail = "relative error of (theta1, phi) gradient vs central differences";
    return check;
}

namespace {

struct Td3Fixture {
    ActorConfig acfg;
    CriticConfig ccfg;
    Hypernetwork hyper;
    MlpParams theta1;
    MlpParams critic1;
    std::vector<Transition> batch;
    std::vector<CriticBatchElem> celems;
    ActorUpdateOptions aopts;
    Interpolator interp = Interpolator::identity();
};

Td3Fixture make_td3_fixture(std::uint64_t seed, double alpha) {
    Rng rng(seed);
    Td3Fixture f;
    f.acfg.state_dim = 3;
    f.acfg.action_dim = 2;
    f.acfg.m = 2;
    f.acfg.hidden = {8};
    f.acfg.hidden_act = Activation::Tanh;
    f.ccfg.state_dim = 3;
    f.ccfg.action_dim = 2;
    f.ccfg.m = 2;
    f.ccfg.hidden = {8};
    f.ccfg.hidden_act = Activation::Tanh;
    f.theta1 = MlpParams::init(f.acfg.layer_spec(), rng);
    f.critic1 = MlpParams::init(f.ccfg.layer_spec(), rng);
    f.hyper = Hypernetwork::init(2, f.acfg.layer_spec(), {6}, rng, 0.1, Activation::Tanh);
    f.aopts.fusion.alpha = alpha;
    f.aopts.c_angle = 10.0;
    for (int i = 0; i < 4; ++i) {
        Transition t;
        t.state = rng.normal_vector(3);
        t.next_state = rng.normal_vector(3);
        t.action = rng.normal_vector(2).cwiseMax(-1.0).cwiseMin(1.0);
        t.reward = rng.normal_vector(2);
        t.done = false;
        t.preference = rng.simplex_uniform(2);
        CriticBatchElem e;
        e.state = t.state;
        e.action = t.action;
        e.w = t.preference;
        e.w_p = t.preference;
        e.y = rng.normal_vector(2);
        f.celems.push_back(std::move(e));
        f.batch.push_back(std::move(t));
    }
    return f;
}

}  // namespace

VerifyCheck verify_td3_critic_gradients(std::uint64_t seed) {
    double worst = 0.0;
    for (int i = 0; i < kGradInstances; ++i) {
        Td3Fixture f = make_td3_fixture(derive_seed(seed, 40 + i), 0.3);
        const auto cspec = f.ccfg.layer_spec();
        const Vector critic_flat = flatten(f.critic1).data;

        auto loss_at = [&](const Vector& x) {
            FlatParams c;
            c.data = x;
            return critic_loss(unflatten(c, cspec), f.celems, 10.0).loss;
        };

        const CriticLossResult res = critic_loss(f.critic1, f.celems, 10.0);
        const Vector analytic = flatten(res.grads).data;
        const Vector numeric = finite_difference_gradient(loss_at, critic_flat);
        worst = std::max(worst, relative_error(analytic, numeric));
    }

    VerifyCheck check;
    check.name = "td3_critic_loss_gradient_fd";
    check.bound = 1e-4;
    check.worst = worst;
    check.pass = check.worst <= check.bound;
    check.detail = "relative error of critic gradient (squared error + angle term)";
    return check;
}

VerifyCheck verify_td3_actor_gradients(std::uint64_t seed) {
    double worst = 0.0;
    for (int i = 0; i < kGradInstances; ++i) {
        const double alpha = 0.1 + 0.8 * static_cast<double>(i) / (kGradInstances - 1);
        Td3Fixture f = make_td3_fixture(derive_seed(seed, 80 + i), alpha);
        const auto aspec = f.acfg.layer_spec();
        const auto hspec = f.hyper.net.spec();
        const Vector theta1_flat = flatten(f.theta1).data;
        const Vector phi_flat = flatten(f.hyper.net).data;

        auto loss_at = [&](const Vector& x) {
            Td3Fixture probe = f;
            FlatParams t1;
            t1.data = x.head(theta1_flat.size());
            probe.theta1 = unflatten(t1, aspec);
            FlatParams hp;
            hp.data = x.tail(phi_flat.size());
            probe.hyper.net = unflatten(hp, hspec);
            return actor_update(probe.hyper, probe.theta1, probe.critic1, probe.interp,
                                probe.batch, probe.aopts)
                .loss;
        };

        const ActorUpdateResult res =
            actor_update(f.hyper, f.theta1, f.critic1, f.interp, f.batch, f.aopts);
        const Vector analytic =
            pack2(flatten(res.grad_theta1).data, flatten(res.grad_phi).data);
        const Vector numeric =
            finite_difference_gradient(loss_at, pack2(theta1_flat, phi_flat));
        worst = std::max(worst, relative_error(analytic, numeric));
    }

    VerifyCheck check;
    check.name = "td3_actor_gradient_fd";
    check.bound = 1e-3;
    check.worst = worst;
    check.pass = check.worst <= check.bound;
    check.detail = "relative error of composite actor gradient through the fused chain";
    return check;
}

VerifyCheck verify_zero_alpha_gradient(std::uint64_t seed) {
    // alpha = 0: the hypernetwork is out of the composition, so its gradient
    // must vanish identically. alpha = 1: theta1 is out, same for its
    // gradient. Exact zeros, not small numbers.
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        const std::uint64_t s = derive_seed(seed, 120 + i);
        {
            DdqnFixture f = make_ddqn_fixture(s, 0.0);
            const DdqnLossResult res =
                ddqn_loss(f.hyper, f.theta1, f.target, f.qcfg, f.interp, f.batch, f.opts);
            worst = std::max(worst, flatten(res.grad_phi).data.cwiseAbs().maxCoeff());
        }
        {
            DdqnFixture f = make_ddqn_fixture(s, 1.0);
            const DdqnLossResult res =
                ddqn_loss(f.hyper, f.theta1, f.target, f.qcfg, f.interp, f.batch, f.opts);
            worst = std::max(worst, flatten(res.grad_theta1).data.cwiseAbs().maxCoeff());
        }
        {
            Td3Fixture f = make_td3_fixture(s, 0.0);
            const ActorUpdateResult res =
                actor_update(f.hyper, f.theta1, f.critic1, f.interp, f.batch, f.aopts);
            worst = std::max(worst, flatten(res.grad_phi).data.cwiseAbs().maxCoeff());
        }
        {
            Td3Fixture f = make_td3_fixture(s, 1.0);
            const ActorUpdateResult res =
                actor_update(f.hyper, f.theta1, f.critic1, f.interp, f.batch, f.aopts);
            worst = std::max(worst, flatten(res.grad_theta1).data.cwiseAbs().maxCoeff());
        }
    }
    VerifyCheck check;
    check.name = "fusion_gradient_gating";
    check.bound = 0.0;
    check.worst = worst;
    check.pass = worst == 0.0;
    check.detail =
        "max |grad_phi| at alpha=0 and |grad_theta1| at alpha=1 (must be exactly zero)";
    return check;
}

VerifyCheck verify_contraction(std::uint64_t seed, double gamma, int trials) {
    Rng rng(seed);
    const PreferenceGrid grid = make_preference_grid(2, 21);
    double worst = 0.0;
    const int instances = 10;
    for (int i = 0; i < instances; ++i) {
        const int states = 2 + rng.uniform_int(9);   // 2..10
        const int actions = 2 + rng.uniform_int(3);  // 2..4
        const TabularMOMDP momdp =
            random_tabular(derive_seed(seed, 10 + i), states, actions, 2);
        const ContractionReport rep =
            check_contraction(momdp, grid, std::max(1, trials / instances), gamma, rng);
        worst = std::max(worst, rep.max_ratio);
    }
    VerifyCheck check;
    check.name = "bellman_contraction_modulus";
    check.bound = gamma + 1e-9;
    check.worst = worst;
    check.pass = worst <= check.bound;
    check.detail = "max d(CQ,CQ')/d(Q,Q') over random instances and table pairs";
    return check;
}

VerifyCheck verify_fixed_point(std::uint64_t seed, double gamma) {
    const TabularMOMDP momdp = random_tabular(derive_seed(seed, 77), 6, 3, 2);
    const PreferenceGrid grid = make_preference_grid(2, 21);
    const double tol = 1e-10;

    const FixedPointResult from_zero = fixed_point_iterate(momdp, grid, gamma, tol, 10000);
    Rng rng(derive_seed(seed, 78));
    TabularQ start = TabularQ::random(rng, momdp.state_count, momdp.action_count,
                                      static_cast<int>(grid.size()), momdp.m, 5.0);
    const FixedPointResult from_random =
        fixed_point_iterate(momdp, grid, gamma, tol, 10000, &start);

    const double gap = metric_d(from_zero.q, from_random.q, grid);
    const double bound = 2.0 * tol / (1.0 - gamma);

    VerifyCheck check;
    check.name = "bellman_fixed_point_uniqueness";
    check.bound = bound;
    check.worst = gap;
    check.pass = gap <= bound;
    check.detail = "metric distance between fixed points reached from two starts";
    return check;
}

std::vector<VerifyCheck> run_verification(std::uint64_t seed) {
    std::vector<VerifyCheck> checks;
    checks.push_back(verify_ddqn_gradients(seed));
    checks.push_back(verify_td3_critic_gradients(seed));
    checks.push_back(verify_td3_actor_gradients(seed));
    checks.push_back(verify_zero_alpha_gradient(seed));
    checks.push_back(verify_contraction(seed, 0.9, 100));
    checks.push_back(verify_fixed_point(seed, 0.9));
    return checks;
}

std::string verification_report_json(const std::vector<VerifyCheck>& checks) {
    nlohmann::json j;
    j["checks"] = nlohmann::json::array();
    bool all = true;
    for (const auto& c : checks) {
        nlohmann::json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["worst"] = c.worst;
        e["bound"] = c.bound;
        e["detail"] = c.detail;
        j["checks"].push_back(e);
        all = all && c.pass;
    }
    j["pass"] = all;
    return j.dump(2);
}

}  // namespace pslmorl
