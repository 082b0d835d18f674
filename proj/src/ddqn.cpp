#include "pslmorl/ddqn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace pslmorl {

std::vector<LayerSpec> QNetConfig::layer_spec() const {
    if (state_dim < 1 || action_count < 1 || m < 1) {
        throw std::invalid_argument("qnet dimensions must be positive");
    }
    std::vector<LayerSpec> spec;
    int in = state_dim + m;
    for (int h : hidden) {
        spec.push_back({in, h, hidden_act});
        in = h;
    }
    spec.push_back({in, action_count * m, Activation::Identity});
    return spec;
}

namespace {

Vector concat(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Vector out(a.size() + b.size());
    out << a, b;
    return out;
}

}  // namespace

Matrix q_values(const MlpParams& net, const Eigen::VectorXd& state,
                const PreferenceVector& w, int action_count, int m) {
    const Vector out = mlp_forward(net, concat(state, w));
    if (out.size() != static_cast<Eigen::Index>(action_count) * m) {
        throw std::invalid_argument("network output does not match action_count * m");
    }
    return Eigen::Map<const Matrix>(out.data(), action_count, m);
}

namespace {

int argmax_scalarized(const Matrix& q, const PreferenceVector& w,
                      const PreferenceVector& w_p) {
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < q.rows(); ++a) {
        const Eigen::VectorXd row = q.row(a).transpose();
        const double score = cosine_similarity(w_p, row) * w.dot(row);
        if (score > best_score) {
            best_score = score;
            best = static_cast<int>(a);
        }
    }
    return best;
}

}  // namespace

int greedy_action(const MlpParams& net, const Eigen::VectorXd& state,
                  const PreferenceVector& w, const PreferenceVector& w_p,
                  int action_count, int m) {
    return argmax_scalarized(q_values(net, state, w, action_count, m), w, w_p);
}

int behavior_action(const MlpParams& net, const Eigen::VectorXd& state,
                    const PreferenceVector& w, const PreferenceVector& w_p,
                    int action_count, int m, double epsilon, Rng& rng) {
    if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.uniform_int(action_count);
    return greedy_action(net, state, w, w_p, action_count, m);
}

Eigen::VectorXd ddqn_target(const MlpParams& online_fused, const MlpParams& target_net,
                            const Eigen::VectorXd& next_state, const Eigen::VectorXd& reward,
                            bool done, const PreferenceVector& w, const PreferenceVector& w_p,
                            double gamma, int action_count, int m) {
    if (done || gamma == 0.0) return reward;
    const int astar = greedy_action(online_fused, next_state, w, w_p, action_count, m);
    const Matrix qt = q_values(target_net, next_state, w, action_count, m);
    return reward + gamma * qt.row(astar).transpose();
}

DdqnLossResult ddqn_loss(const Hypernetwork& hyper, const MlpParams& theta1,
                         const MlpParams& target_net, const QNetConfig& qcfg,
                         const Interpolator& interp, const std::vector<Transition>& batch,
                         const DdqnLossOptions& opts) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    const auto spec = qcfg.layer_spec();
    const FlatParams theta1_flat = flatten(theta1);
    const double inv_batch = 1.0 / static_cast<double>(batch.size());

    DdqnLossResult res;
    res.grad_phi = Gradients::zeros_like(hyper.net);
    FlatParams grad_theta1_sum;
    grad_theta1_sum.data = Vector::Zero(theta1_flat.data.size());
    grad_theta1_sum.shape_table = theta1_flat.shape_table;

    for (const Transition& t : batch) {
        const PreferenceVector w_p = interpolate_preference(interp, t.preference);
        GeneratedParams gen = generate_params(hyper, t.preference);
        const FlatParams fused_flat =
            compose_params(theta1_flat, gen.theta2, opts.compose, opts.fusion);
        const MlpParams fused = unflatten(fused_flat, spec);

        const MlpParams* value_net = &target_net;
        MlpParams fused_target;
        if (opts.target_fusion) {
            fused_target = unflatten(
                compose_params(flatten(target_net), gen.theta2, opts.compose, opts.fusion),
                spec);
            value_net = &fused_target;
        }
        const Eigen::VectorXd y =
            ddqn_target(fused, *value_net, t.next_state, t.reward, t.done, t.preference,
                        w_p, opts.gamma, qcfg.action_count, qcfg.m);

        MlpTape tape;
        const Vector out = mlp_forward(fused, concat(t.state, t.preference), &tape);
        const Eigen::Map<const Matrix> q(out.data(), qcfg.action_count, qcfg.m);
        if (t.action_index < 0 || t.action_index >= qcfg.action_count) {
            throw std::invalid_argument("transition action index out of range");
        }
        const Eigen::VectorXd diff = q.row(t.action_index).transpose() - y;
        res.loss += diff.squaredNorm() / qcfg.m * inv_batch;

        Vector grad_out = Vector::Zero(out.size());
        Eigen::Map<Matrix>(grad_out.data(), qcfg.action_count, qcfg.m)
            .row(t.action_index) = (2.0 * inv_batch / qcfg.m) * diff.transpose();

        Gradients fused_grads = Gradients::zeros_like(fused);
        mlp_backward(fused, tape, grad_out, fused_grads);
        const FlatParams grad_theta = flatten(fused_grads);
        const FlatParams g1 = backprop_compose(hyper, grad_theta, opts.compose,
                                               opts.fusion, gen.tape, res.grad_phi);
        grad_theta1_sum.data += g1.data;
    }

    res.grad_theta1 = gradients_from_flat(grad_theta1_sum, spec);
    res.grad_theta1.accum_count = static_cast<long>(batch.size());
    return res;
}

Eigen::VectorXd evaluate_policy(const Hypernetwork& hyper, const MlpParams& theta1,
                                ComposeMode compose, const FusionConfig& fusion,
                                const Interpolator& interp, const PreferenceVector& w,
                                DiscreteEnv& env, int episodes) {
    if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    const MomdpDescriptor desc = env.descriptor();
    const auto spec = theta1.spec();
    const FlatParams fused_flat =
        compose_params(flatten(theta1), generate_params(hyper, w).theta2, compose, fusion);
    const MlpParams fused = unflatten(fused_flat, spec);
    const PreferenceVector w_p = interpolate_preference(interp, w);

    Eigen::VectorXd total = Eigen::VectorXd::Zero(desc.m);
    for (int e = 0; e < episodes; ++e) {
        Eigen::VectorXd state = env.reset();
        for (int step = 0; step < desc.episode_limit; ++step) {
            const int a = greedy_action(fused, state, w, w_p, desc.action_count, desc.m);
            StepResult sr = env.step(a);
            total += sr.reward;
            state = std::move(sr.state);
            if (sr.done) break;
        }
    }
    return total / static_cast<double>(episodes);
}

namespace {

struct WorkerState {
    std::unique_ptr<DiscreteEnv> env;
    Rng rng;
    PreferenceRegion region;

    WorkerState(std::unique_ptr<DiscreteEnv> e, std::uint64_t seed, int index, int count)
        : env(std::move(e)), rng(seed), region{index, count} {}
};

// One full episode under the fused snapshot; returns the collected
// transitions. Runs on the caller's thread or a worker thread; touches only
// its own state.
std::vector<Transition> run_episode(WorkerState& ws, const Hypernetwork& hyper,
                                    const FlatParams& theta1_flat,
                                    const std::vector<LayerSpec>& spec,
                                    const DdqnConfig& cfg, double epsilon,
                                    const MomdpDescriptor& desc) {
    std::vector<Transition> out;
    out.reserve(static_cast<std::size_t>(desc.episode_limit));
    PreferenceVector w = sample_preference(ws.rng, desc.m, ws.region);
    PreferenceVector w_p = interpolate_preference(cfg.interp, w);
    MlpParams fused = unflatten(
        compose_params(theta1_flat, generate_params(hyper, w).theta2, cfg.compose,
                       cfg.fusion),
        spec);

    Eigen::VectorXd state = ws.env->reset();
    for (int step = 0; step < desc.episode_limit; ++step) {
        if (cfg.resample_each_step && step > 0) {
            w = sample_preference(ws.rng, desc.m, ws.region);
            w_p = interpolate_preference(cfg.interp, w);
            fused = unflatten(
                compose_params(theta1_flat, generate_params(hyper, w).theta2, cfg.compose,
                               cfg.fusion),
                spec);
        }
        Transition t;
        t.state = state;
        t.action_index = behavior_action(fused, state, w, w_p, desc.action_count, desc.m,
                                         epsilon, ws.rng);
        StepResult sr = ws.env->step(t.action_index);
        const bool done = sr.done;
        t.reward = sr.reward;
        t.next_state = sr.state;
        t.done = done;
        t.preference = w;
        state = std::move(sr.state);
        out.push_back(std::move(t));
        if (done) break;
    }
    return out;
}

}  // namespace

DdqnResult train_ddqn(const DdqnConfig& cfg, const DiscreteEnvFactory& make_env,
                      const TrainHooks& hooks) {
    check_fusion(cfg.fusion);
    if (cfg.workers < 1) throw std::invalid_argument("workers must be >= 1");
    if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) {
        throw std::invalid_argument("gamma outside [0,1)");
    }
    if (cfg.tau <= 0.0 || cfg.tau > 1.0) throw std::invalid_argument("tau outside (0,1]");

    Rng learner_rng(derive_seed(cfg.seed, 1));
    Rng init_rng(derive_seed(cfg.seed, 2));

    // Probe one environment for the descriptor; workers get their own.
    const MomdpDescriptor desc = make_env(derive_seed(cfg.seed, 100))->descriptor();
    QNetConfig qcfg = cfg.qnet;
    qcfg.state_dim = desc.state_dim;
    qcfg.action_count = desc.action_count;
    qcfg.m = desc.m;
    const auto spec = qcfg.layer_spec();

    DdqnResult res;
    res.theta1 = MlpParams::init(spec, init_rng);
    res.hyper = Hypernetwork::init(desc.m, spec, cfg.hyper_hidden, init_rng,
                                   cfg.hyper_out_scale);
    MlpParams target = res.theta1;

    OptimizerState opt_theta1 = OptimizerState::adam(cfg.learning_rate);
    OptimizerState opt_phi = OptimizerState::adam(cfg.learning_rate);

    ReplayBuffer buffer(cfg.buffer_capacity);
    HerConfig her{cfg.her_extra};

    EpsilonSchedule eps = cfg.epsilon;
    if (eps.decay_steps <= 0) {
        eps.decay_steps =
            std::max<long>(1, static_cast<long>(cfg.epsilon_decay_frac *
                                                static_cast<double>(cfg.total_steps)));
    }

    std::vector<WorkerState> workers;
    workers.reserve(static_cast<std::size_t>(cfg.workers));
    for (int k = 0; k < cfg.workers; ++k) {
        workers.emplace_back(make_env(derive_seed(cfg.seed, 200 + k)),
                             derive_seed(cfg.seed, 300 + k), k, cfg.workers);
    }

    const Eigen::VectorXd ref =
        cfg.ref_point.size() == desc.m ? cfg.ref_point : Eigen::VectorXd::Zero(desc.m);
    const std::vector<PreferenceVector> eval_grid = simplex_grid(desc.m, cfg.eval_grid);
    const auto eval_env_ptr = make_env(derive_seed(cfg.seed, 101));

    double last_loss = 0.0;
    double last_gpol = 0.0;
    double last_ghyp = 0.0;

    auto evaluate = [&](long step) {
        auto& eval_env = *eval_env_ptr;
        for (const auto& w : eval_grid) {
            Eigen::VectorXd J = evaluate_policy(res.hyper, res.theta1, cfg.compose,
                                                cfg.fusion, cfg.interp, w, eval_env,
                                                cfg.eval_episodes);
            res.archive.insert({J, w, step});
        }
        TrainLogRecord rec;
        rec.step = step;
        rec.loss = last_loss;
        rec.epsilon = eps.at(step);
        rec.has_eval = true;
        rec.eval_hv = hypervolume(res.archive.points(), ref);
        const auto sp = sparsity(res.archive.points());
        rec.eval_sp = sp ? *sp : -1.0;
        rec.grad_norm_policy = last_gpol;
        rec.grad_norm_hyper = last_ghyp;
        res.log.push_back(rec);
        if (hooks.on_log) hooks.on_log(rec);
        if (hooks.on_checkpoint) hooks.on_checkpoint("eval", step, res.hyper, res.theta1);
    };

    evaluate(0);

    long next_eval = cfg.eval_interval;
    long pending_update_budget = 0;
    while (res.env_steps < cfg.total_steps) {
        const double epsilon = eps.at(res.env_steps);
        const FlatParams theta1_flat = flatten(res.theta1);

        // Collection round: one episode per worker against the same snapshot.
        std::vector<std::vector<Transition>> collected(workers.size());
        if (cfg.threaded && cfg.workers > 1) {
            std::vector<std::thread> threads;
            threads.reserve(workers.size());
            for (std::size_t k = 0; k < workers.size(); ++k) {
                threads.emplace_back([&, k] {
                    collected[k] = run_episode(workers[k], res.hyper, theta1_flat, spec,
                                               cfg, epsilon, desc);
                });
            }
            for (auto& t : threads) t.join();
        } else {
            for (std::size_t k = 0; k < workers.size(); ++k) {
                collected[k] =
                    run_episode(workers[k], res.hyper, theta1_flat, spec, cfg, epsilon, desc);
            }
        }
        for (auto& episode : collected) {
            for (auto& t : episode) {
                buffer.push(std::move(t));
                ++res.env_steps;
                ++pending_update_budget;
            }
        }

        // Learner: one update per env_steps_per_update collected transitions.
        if (static_cast<long>(buffer.size()) >= cfg.learn_start) {
            while (pending_update_budget >= cfg.env_steps_per_update) {
                pending_update_budget -= cfg.env_steps_per_update;
                const auto batch =
                    buffer.sample(learner_rng, cfg.batch_size, her, desc.m);
                DdqnLossOptions opts;
                opts.gamma = cfg.gamma;
                opts.compose = cfg.compose;
                opts.fusion = cfg.fusion;
                opts.target_fusion = cfg.target_fusion;
                DdqnLossResult lr =
                    ddqn_loss(res.hyper, res.theta1, target, qcfg, cfg.interp, batch, opts);
                if (!std::isfinite(lr.loss)) {
                    if (hooks.on_checkpoint) {
                        hooks.on_checkpoint("diverged", res.env_steps, res.hyper,
                                            res.theta1);
                    }
                    throw std::runtime_error("non-finite loss at env step " +
                                             std::to_string(res.env_steps));
                }
                last_loss = lr.loss;
                last_gpol = std::sqrt(lr.grad_theta1.squared_norm());
                last_ghyp = std::sqrt(lr.grad_phi.squared_norm());
                optimizer_step(opt_theta1, res.theta1, lr.grad_theta1);
                optimizer_step(opt_phi, res.hyper.net, lr.grad_phi);
                soft_update(target, res.theta1, cfg.tau);
                ++res.updates;
            }
        } else {
            pending_update_budget = 0;
        }

        if (res.env_steps >= next_eval) {
            evaluate(res.env_steps);
            while (next_eval <= res.env_steps) next_eval += cfg.eval_interval;
        }
    }

    if (res.log.empty() || res.log.back().step != res.env_steps) {
        evaluate(res.env_steps);
    }
    if (hooks.on_checkpoint) {
        hooks.on_checkpoint("final", res.env_steps, res.hyper, res.theta1);
    }
    return res;
}

}  // namespace pslmorl
