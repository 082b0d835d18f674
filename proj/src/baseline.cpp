#include "pslmorl/baseline.hpp"

#include <cmath>

#include "pslmorl/optim.hpp"
#include "pslmorl/replay.hpp"
#include "pslmorl/training.hpp"

namespace pslmorl {

namespace {

int scalar_greedy(const MlpParams& net, const Eigen::VectorXd& state) {
    const Vector q = mlp_forward(net, state);
    int best = 0;
    for (Eigen::Index a = 1; a < q.size(); ++a) {
        if (q[a] > q[best]) best = static_cast<int>(a);
    }
    return best;
}

// One weight, one policy: a minimal double-Q learner on the scalarized
// reward.
Eigen::VectorXd train_single_weight(const RadialBaselineConfig& cfg,
                                    const DiscreteEnvFactory& make_env,
                                    const PreferenceVector& w, std::uint64_t seed) {
    const auto env = make_env(derive_seed(seed, 11));
    const MomdpDescriptor desc = env->descriptor();

    std::vector<LayerSpec> spec;
    int in = desc.state_dim;
    for (int h : cfg.hidden) {
        spec.push_back({in, h, Activation::Relu});
        in = h;
    }
    spec.push_back({in, desc.action_count, Activation::Identity});

    Rng init_rng(derive_seed(seed, 12));
    Rng rng(derive_seed(seed, 13));
    MlpParams net = MlpParams::init(spec, init_rng);
    MlpParams target = net;
    OptimizerState opt = OptimizerState::adam(cfg.learning_rate);
    ReplayBuffer buffer(cfg.buffer_capacity);
    EpsilonSchedule eps{cfg.epsilon_start, cfg.epsilon_end,
                        std::max<long>(1, static_cast<long>(cfg.epsilon_decay_frac *
                                                            static_cast<double>(
                                                                cfg.steps_per_weight)))};

    long env_steps = 0;
    long budget = 0;
    while (env_steps < cfg.steps_per_weight) {
        Eigen::VectorXd state = env->reset();
        for (int step = 0; step < desc.episode_limit; ++step) {
            const double e = eps.at(env_steps);
            Transition t;
            t.state = state;
            t.action_index = (rng.uniform() < e) ? rng.uniform_int(desc.action_count)
                                                 : scalar_greedy(net, state);
            StepResult sr = env->step(t.action_index);
            const bool done = sr.done;
            t.reward = sr.reward;
            t.next_state = sr.state;
            t.done = done;
            state = std::move(sr.state);
            buffer.push(std::move(t));
            ++env_steps;
            ++budget;
            if (done) break;
        }

        if (static_cast<long>(buffer.size()) < cfg.learn_start) {
            budget = 0;
            continue;
        }
        while (budget >= cfg.env_steps_per_update) {
            budget -= cfg.env_steps_per_update;
            const auto batch = buffer.sample(rng, cfg.batch_size, HerConfig{0}, desc.m);
            Gradients grads = Gradients::zeros_like(net);
            const double inv_batch = 1.0 / static_cast<double>(batch.size());
            for (const Transition& t : batch) {
                double y = w.dot(t.reward);
                if (!t.done && cfg.gamma > 0.0) {
                    const int astar = scalar_greedy(net, t.next_state);
                    y += cfg.gamma * mlp_forward(target, t.next_state)[astar];
                }
                MlpTape tape;
                const Vector q = mlp_forward(net, t.state, &tape);
                Vector grad_out = Vector::Zero(q.size());
                grad_out[t.action_index] = 2.0 * (q[t.action_index] - y) * inv_batch;
                mlp_backward(net, tape, grad_out, grads);
            }
            optimizer_step(opt, net, grads);
            soft_update(target, net, cfg.tau);
        }
    }

    // Greedy-policy vector return for the front.
    Eigen::VectorXd total = Eigen::VectorXd::Zero(desc.m);
    const auto eval_env = make_env(derive_seed(seed, 14));
    for (int e = 0; e < cfg.eval_episodes; ++e) {
        Eigen::VectorXd state = eval_env->reset();
        for (int step = 0; step < desc.episode_limit; ++step) {
            StepResult sr = eval_env->step(scalar_greedy(net, state));
            total += sr.reward;
            state = std::move(sr.state);
            if (sr.done) break;
        }
    }
    return total / static_cast<double>(cfg.eval_episodes);
}

}  // namespace

RadialBaselineResult train_radial_baseline(const RadialBaselineConfig& cfg,
                                           const DiscreteEnvFactory& make_env,
                                           std::uint64_t seed) {
    const MomdpDescriptor desc = make_env(derive_seed(seed, 10))->descriptor();
    std::vector<PreferenceVector> weights;
    if (cfg.weights == 1) {
        weights.push_back(Eigen::VectorXd::Constant(desc.m, 1.0 / desc.m));
    } else {
        weights = simplex_grid(desc.m, cfg.weights);
    }

    RadialBaselineResult res;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const Eigen::VectorXd J = train_single_weight(
            cfg, make_env, weights[i], derive_seed(seed, 1000 + static_cast<int>(i)));
        res.returns.push_back({J, weights[i], -1});
    }
    res.front = pareto_filter(res.returns);
    return res;
}

}  // namespace pslmorl
