#include "pslmorl/td3.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace pslmorl {

std::vector<LayerSpec> ActorConfig::layer_spec() const {
    if (state_dim < 1 || action_dim < 1 || m < 1) {
        throw std::invalid_argument("actor dimensions must be positive");
    }
    std::vector<LayerSpec> spec;
    int in = state_dim + m;
    for (int h : hidden) {
        spec.push_back({in, h, hidden_act});
        in = h;
    }
    spec.push_back({in, action_dim, Activation::Tanh});
    return spec;
}

std::vector<LayerSpec> CriticConfig::layer_spec() const {
    if (state_dim < 1 || action_dim < 1 || m < 1) {
        throw std::invalid_argument("critic dimensions must be positive");
    }
    std::vector<LayerSpec> spec;
    int in = state_dim + action_dim + m;
    for (int h : hidden) {
        spec.push_back({in, h, hidden_act});
        in = h;
    }
    spec.push_back({in, m, Activation::Identity});
    return spec;
}

namespace {

Vector concat2(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Vector out(a.size() + b.size());
    out << a, b;
    return out;
}

Vector concat3(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
               const Eigen::VectorXd& c) {
    Vector out(a.size() + b.size() + c.size());
    out << a, b, c;
    return out;
}

}  // namespace

Eigen::VectorXd actor_forward(const MlpParams& actor, const Eigen::VectorXd& state,
                              const PreferenceVector& w) {
    return mlp_forward(actor, concat2(state, w));
}

Eigen::VectorXd critic_forward(const MlpParams& critic, const Eigen::VectorXd& state,
                               const Eigen::VectorXd& action, const PreferenceVector& w) {
    return mlp_forward(critic, concat3(state, action, w));
}

Eigen::VectorXd target_action(const MlpParams& fused_target_actor,
                              const Eigen::VectorXd& next_state, const PreferenceVector& w,
                              double sigma, double clip, Rng& rng) {
    if (clip <= 0.0) throw std::invalid_argument("noise clip must be positive");
    if (sigma < 0.0) throw std::invalid_argument("sigma must be nonnegative");
    Eigen::VectorXd a = actor_forward(fused_target_actor, next_state, w);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double noise = std::clamp(sigma * rng.normal(), -clip, clip);
        a[i] = std::clamp(a[i] + noise, -1.0, 1.0);
    }
    return a;
}

Eigen::VectorXd td3_target(const MlpParams& critic1_target, const MlpParams& critic2_target,
                           const Eigen::VectorXd& next_state, const Eigen::VectorXd& action,
                           const Eigen::VectorXd& reward, bool done,
                           const PreferenceVector& w, double gamma) {
    if (done || gamma == 0.0) return reward;
    const Eigen::VectorXd q1 = critic_forward(critic1_target, next_state, action, w);
    const Eigen::VectorXd q2 = critic_forward(critic2_target, next_state, action, w);
    const Eigen::VectorXd& selected = w.dot(q2) < w.dot(q1) ? q2 : q1;
    return reward + gamma * selected;
}

CriticLossResult critic_loss(const MlpParams& critic, const std::vector<CriticBatchElem>& batch,
                             double angle_coeff) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    const int m = static_cast<int>(batch.front().y.size());

    CriticLossResult res;
    res.grads = Gradients::zeros_like(critic);
    for (const CriticBatchElem& e : batch) {
        MlpTape tape;
        const Vector q = mlp_forward(critic, concat3(e.state, e.action, e.w), &tape);
        const Eigen::VectorXd diff = q - e.y;
        res.loss += (diff.squaredNorm() / m + angle_coeff * directional_angle(e.w_p, q)) *
                    inv_batch;
        Vector grad_q = (2.0 / m) * diff + angle_coeff * directional_angle_grad_q(e.w_p, q);
        mlp_backward(critic, tape, inv_batch * grad_q, res.grads);
    }
    return res;
}

ActorUpdateResult actor_update(const Hypernetwork& hyper, const MlpParams& theta1,
                               const MlpParams& critic1, const Interpolator& interp,
                               const std::vector<Transition>& batch,
                               const ActorUpdateOptions& opts) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    const auto spec = theta1.spec();
    const FlatParams theta1_flat = flatten(theta1);
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    const int state_dim = static_cast<int>(batch.front().state.size());
    const int action_dim = theta1.output_dim();

    ActorUpdateResult res;
    res.grad_phi = Gradients::zeros_like(hyper.net);
    FlatParams grad_theta1_sum;
    grad_theta1_sum.data = Vector::Zero(theta1_flat.data.size());
    grad_theta1_sum.shape_table = theta1_flat.shape_table;
    Gradients critic_scratch = Gradients::zeros_like(critic1);

    for (const Transition& t : batch) {
        const PreferenceVector w_p = interpolate_preference(interp, t.preference);
        GeneratedParams gen = generate_params(hyper, t.preference);
        const MlpParams fused = unflatten(
            compose_params(theta1_flat, gen.theta2, opts.compose, opts.fusion), spec);

        MlpTape actor_tape;
        const Vector a = mlp_forward(fused, concat2(t.state, t.preference), &actor_tape);
        MlpTape critic_tape;
        const Vector q = mlp_forward(critic1, concat3(t.state, a, t.preference),
                                     &critic_tape);

        res.loss += (-t.preference.dot(q) +
                     opts.c_angle * directional_angle(w_p, q)) *
                    inv_batch;
        const Vector grad_q =
            -t.preference + opts.c_angle * directional_angle_grad_q(w_p, q);

        critic_scratch.set_zero();  // critic params receive no update here
        const Vector grad_critic_input =
            mlp_backward(critic1, critic_tape, grad_q, critic_scratch);
        const Vector grad_action = grad_critic_input.segment(state_dim, action_dim);

        Gradients fused_grads = Gradients::zeros_like(fused);
        mlp_backward(fused, actor_tape, inv_batch * grad_action, fused_grads);
        const FlatParams g1 = backprop_compose(hyper, flatten(fused_grads), opts.compose,
                                               opts.fusion, gen.tape, res.grad_phi);
        grad_theta1_sum.data += g1.data;
    }

    res.grad_theta1 = gradients_from_flat(grad_theta1_sum, spec);
    res.grad_theta1.accum_count = static_cast<long>(batch.size());
    return res;
}

Eigen::VectorXd evaluate_policy_continuous(const Hypernetwork& hyper, const MlpParams& theta1,
                                           ComposeMode compose, const FusionConfig& fusion,
                                           const PreferenceVector& w, ContinuousEnv& env,
                                           int episodes) {
    if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    const MomdpDescriptor desc = env.descriptor();
    const MlpParams fused = unflatten(
        compose_params(flatten(theta1), generate_params(hyper, w).theta2, compose, fusion),
        theta1.spec());

    Eigen::VectorXd total = Eigen::VectorXd::Zero(desc.m);
    for (int e = 0; e < episodes; ++e) {
        Eigen::VectorXd state = env.reset();
        for (int step = 0; step < desc.episode_limit; ++step) {
            StepResult sr = env.step(actor_forward(fused, state, w));
            total += sr.reward;
            state = std::move(sr.state);
            if (sr.done) break;
        }
    }
    return total / static_cast<double>(episodes);
}

namespace {

struct Td3Worker {
    std::unique_ptr<ContinuousEnv> env;
    Rng rng;
    PreferenceRegion region;
};

std::vector<Transition> run_td3_episode(Td3Worker& ws, const Hypernetwork& hyper,
                                        const FlatParams& theta1_flat,
                                        const std::vector<LayerSpec>& spec,
                                        const Td3Config& cfg, bool warmup,
                                        const MomdpDescriptor& desc) {
    std::vector<Transition> out;
    out.reserve(static_cast<std::size_t>(desc.episode_limit));
    PreferenceVector w = sample_preference(ws.rng, desc.m, ws.region);
    MlpParams fused = unflatten(
        compose_params(theta1_flat, generate_params(hyper, w).theta2, cfg.compose,
                       cfg.fusion),
        spec);

    Eigen::VectorXd state = ws.env->reset();
    for (int step = 0; step < desc.episode_limit; ++step) {
        if (cfg.resample_each_step && step > 0) {
            w = sample_preference(ws.rng, desc.m, ws.region);
            fused = unflatten(
                compose_params(theta1_flat, generate_params(hyper, w).theta2, cfg.compose,
                               cfg.fusion),
                spec);
        }
        Eigen::VectorXd action(desc.action_dim);
        if (warmup) {
            for (int i = 0; i < desc.action_dim; ++i) action[i] = ws.rng.uniform(-1.0, 1.0);
        } else {
            action = actor_forward(fused, state, w);
            for (int i = 0; i < desc.action_dim; ++i) {
                action[i] = std::clamp(action[i] + cfg.exploration_noise * ws.rng.normal(),
                                       -1.0, 1.0);
            }
        }
        Transition t;
        t.state = state;
        t.action = action;
        StepResult sr = ws.env->step(action);
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

Td3Result train_td3(const Td3Config& cfg, const ContinuousEnvFactory& make_env,
                    const TrainHooks& hooks) {
    check_fusion(cfg.fusion);
    if (cfg.workers < 1) throw std::invalid_argument("workers must be >= 1");
    if (cfg.policy_delay < 1) throw std::invalid_argument("policy_delay must be >= 1");
    if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) {
        throw std::invalid_argument("gamma outside [0,1)");
    }

    Rng learner_rng(derive_seed(cfg.seed, 1));
    Rng init_rng(derive_seed(cfg.seed, 2));

    const MomdpDescriptor desc = make_env(derive_seed(cfg.seed, 100))->descriptor();
    ActorConfig acfg = cfg.actor;
    acfg.state_dim = desc.state_dim;
    acfg.action_dim = desc.action_dim;
    acfg.m = desc.m;
    CriticConfig ccfg = cfg.critic;
    ccfg.state_dim = desc.state_dim;
    ccfg.action_dim = desc.action_dim;
    ccfg.m = desc.m;
    const auto actor_spec = acfg.layer_spec();
    const auto critic_spec = ccfg.layer_spec();

    Td3Result res;
    res.theta1 = MlpParams::init(actor_spec, init_rng);
    res.hyper = Hypernetwork::init(desc.m, actor_spec, cfg.hyper_hidden, init_rng,
                                   cfg.hyper_out_scale);
    res.critic1 = MlpParams::init(critic_spec, init_rng);
    res.critic2 = MlpParams::init(critic_spec, init_rng);
    MlpParams theta1_target = res.theta1;
    MlpParams critic1_target = res.critic1;
    MlpParams critic2_target = res.critic2;

    OptimizerState opt_theta1 = OptimizerState::adam(cfg.actor_lr);
    OptimizerState opt_phi = OptimizerState::adam(cfg.actor_lr);
    OptimizerState opt_c1 = OptimizerState::adam(cfg.critic_lr);
    OptimizerState opt_c2 = OptimizerState::adam(cfg.critic_lr);

    ReplayBuffer buffer(cfg.buffer_capacity);
    HerConfig her{cfg.her_extra};
    const double angle_coeff = cfg.angle_in_critic_scaled ? cfg.c_angle : 1.0;

    std::vector<Td3Worker> workers;
    workers.reserve(static_cast<std::size_t>(cfg.workers));
    for (int k = 0; k < cfg.workers; ++k) {
        workers.push_back(Td3Worker{make_env(derive_seed(cfg.seed, 200 + k)),
                                    Rng(derive_seed(cfg.seed, 300 + k)),
                                    PreferenceRegion{k, cfg.workers}});
    }

    const Eigen::VectorXd ref =
        cfg.ref_point.size() == desc.m ? cfg.ref_point : Eigen::VectorXd::Zero(desc.m);
    const std::vector<PreferenceVector> eval_grid = simplex_grid(desc.m, cfg.eval_grid);
    const auto eval_env_ptr = make_env(derive_seed(cfg.seed, 101));

    double last_loss = 0.0;
    double last_gpol = 0.0;
    double last_ghyp = 0.0;

    auto evaluate = [&](long step) {
        for (const auto& w : eval_grid) {
            Eigen::VectorXd J = evaluate_policy_continuous(
                res.hyper, res.theta1, cfg.compose, cfg.fusion, w, *eval_env_ptr,
                cfg.eval_episodes);
            res.archive.insert({J, w, step});
        }
        TrainLogRecord rec;
        rec.step = step;
        rec.loss = last_loss;
        rec.epsilon = cfg.exploration_noise;
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
        const bool warmup = res.env_steps < cfg.learn_start;
        const FlatParams theta1_flat = flatten(res.theta1);

        std::vector<std::vector<Transition>> collected(workers.size());
        if (cfg.threaded && cfg.workers > 1) {
            std::vector<std::thread> threads;
            threads.reserve(workers.size());
            for (std::size_t k = 0; k < workers.size(); ++k) {
                threads.emplace_back([&, k] {
                    collected[k] = run_td3_episode(workers[k], res.hyper, theta1_flat,
                                                   actor_spec, cfg, warmup, desc);
                });
            }
            for (auto& t : threads) t.join();
        } else {
            for (std::size_t k = 0; k < workers.size(); ++k) {
                collected[k] = run_td3_episode(workers[k], res.hyper, theta1_flat,
                                               actor_spec, cfg, warmup, desc);
            }
        }
        for (auto& episode : collected) {
            for (auto& t : episode) {
                buffer.push(std::move(t));
                ++res.env_steps;
                ++pending_update_budget;
            }
        }

        if (static_cast<long>(buffer.size()) >= cfg.learn_start) {
            while (pending_update_budget >= cfg.env_steps_per_update) {
                pending_update_budget -= cfg.env_steps_per_update;
                const auto batch = buffer.sample(learner_rng, cfg.batch_size, her, desc.m);

                std::vector<CriticBatchElem> celems;
                celems.reserve(batch.size());
                for (const Transition& t : batch) {
                    CriticBatchElem e;
                    e.state = t.state;
                    e.action = t.action;
                    e.w = t.preference;
                    e.w_p = interpolate_preference(cfg.interp, t.preference);
                    if (t.done) {
                        e.y = t.reward;
                    } else {
                        const MlpParams fused_target = unflatten(
                            compose_params(flatten(theta1_target),
                                           generate_params(res.hyper, t.preference).theta2,
                                           cfg.compose, cfg.fusion),
                            actor_spec);
                        const Eigen::VectorXd a_smooth =
                            target_action(fused_target, t.next_state, t.preference,
                                          cfg.smoothing_noise, cfg.noise_clip, learner_rng);
                        e.y = td3_target(critic1_target, critic2_target, t.next_state,
                                         a_smooth, t.reward, t.done, t.preference,
                                         cfg.gamma);
                    }
                    celems.push_back(std::move(e));
                }

                CriticLossResult l1 = critic_loss(res.critic1, celems, angle_coeff);
                CriticLossResult l2 = critic_loss(res.critic2, celems, angle_coeff);
                if (!std::isfinite(l1.loss) || !std::isfinite(l2.loss)) {
                    if (hooks.on_checkpoint) {
                        hooks.on_checkpoint("diverged", res.env_steps, res.hyper,
                                            res.theta1);
                    }
                    throw std::runtime_error("non-finite critic loss at env step " +
                                             std::to_string(res.env_steps));
                }
                optimizer_step(opt_c1, res.critic1, l1.grads);
                optimizer_step(opt_c2, res.critic2, l2.grads);
                last_loss = l1.loss;
                ++res.critic_updates;

                if (res.critic_updates % cfg.policy_delay == 0) {
                    ActorUpdateOptions aopts;
                    aopts.compose = cfg.compose;
                    aopts.fusion = cfg.fusion;
                    aopts.c_angle = cfg.c_angle;
                    ActorUpdateResult ar = actor_update(res.hyper, res.theta1, res.critic1,
                                                        cfg.interp, batch, aopts);
                    if (!std::isfinite(ar.loss)) {
                        if (hooks.on_checkpoint) {
                            hooks.on_checkpoint("diverged", res.env_steps, res.hyper,
                                                res.theta1);
                        }
                        throw std::runtime_error("non-finite actor loss at env step " +
                                                 std::to_string(res.env_steps));
                    }
                    last_gpol = std::sqrt(ar.grad_theta1.squared_norm());
                    last_ghyp = std::sqrt(ar.grad_phi.squared_norm());
                    optimizer_step(opt_theta1, res.theta1, ar.grad_theta1);
                    optimizer_step(opt_phi, res.hyper.net, ar.grad_phi);
                    soft_update(theta1_target, res.theta1, cfg.tau);
                    soft_update(critic1_target, res.critic1, cfg.tau);
                    soft_update(critic2_target, res.critic2, cfg.tau);
                    ++res.actor_updates;
                }
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
