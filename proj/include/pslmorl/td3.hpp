#pragma once

#include <cstdint>
#include <vector>

#include "pslmorl/envs/common.hpp"
#include "pslmorl/hypernet.hpp"
#include "pslmorl/optim.hpp"
#include "pslmorl/pareto.hpp"
#include "pslmorl/preference.hpp"
#include "pslmorl/replay.hpp"
#include "pslmorl/training.hpp"

namespace pslmorl {

// Deterministic actor: concat(state, w) -> action in [-1,1]^action_dim
// (tanh output layer). Its parameters are the ones the hypernetwork
// generates and fuses.
struct ActorConfig {
    int state_dim = 0;
    int action_dim = 0;
    int m = 0;
    std::vector<int> hidden;
    Activation hidden_act = Activation::Relu;

    std::vector<LayerSpec> layer_spec() const;
};

// Preference-conditioned vector critic: concat(state, action, w) -> m-vector.
struct CriticConfig {
    int state_dim = 0;
    int action_dim = 0;
    int m = 0;
    std::vector<int> hidden;
    Activation hidden_act = Activation::Relu;

    std::vector<LayerSpec> layer_spec() const;
};

Eigen::VectorXd actor_forward(const MlpParams& actor, const Eigen::VectorXd& state,
                              const PreferenceVector& w);

Eigen::VectorXd critic_forward(const MlpParams& critic, const Eigen::VectorXd& state,
                               const Eigen::VectorXd& action, const PreferenceVector& w);

// Smoothed target action: actor output plus clip(N(0, sigma), -c, c) noise,
// re-clamped to [-1,1].
Eigen::VectorXd target_action(const MlpParams& fused_target_actor,
                              const Eigen::VectorXd& next_state, const PreferenceVector& w,
                              double sigma, double clip, Rng& rng);

// y = r + gamma * Q_j(s', a~, w) where j is the target critic with the
// smaller scalarized value w^T Q (critic 1 on ties); y = r when done. The
// whole vector comes from the selected critic.
Eigen::VectorXd td3_target(const MlpParams& critic1_target, const MlpParams& critic2_target,
                           const Eigen::VectorXd& next_state, const Eigen::VectorXd& action,
                           const Eigen::VectorXd& reward, bool done,
                           const PreferenceVector& w, double gamma);

// One critic-regression element: the transition fields plus its precomputed
// target and interpolated preference.
struct CriticBatchElem {
    Eigen::VectorXd state;
    Eigen::VectorXd action;
    PreferenceVector w;
    PreferenceVector w_p;
    Eigen::VectorXd y;
};

struct CriticLossResult {
    double loss = 0.0;
    Gradients grads;
};

// Mean over the batch of |y - Q|^2 / m + angle_coeff * g(w_p, Q), where g is
// the directional angle. Targets are constants; the arccos gradient is
// guarded near its poles.
CriticLossResult critic_loss(const MlpParams& critic, const std::vector<CriticBatchElem>& batch,
                             double angle_coeff);

struct ActorUpdateResult {
    double loss = 0.0;       // mean of -w^T Q1 + c_angle * g(w_p, Q1)
    Gradients grad_theta1;   // base actor share
    Gradients grad_phi;      // hypernetwork share
};

struct ActorUpdateOptions {
    ComposeMode compose = ComposeMode::Fusion;
    FusionConfig fusion{0.05};
    double c_angle = 10.0;
};

// Deterministic-policy-gradient step through critic 1: gradients flow from
// the scalarized value and angle penalty into the action, then through the
// fused actor into theta1 and the hypernetwork. Critic parameters stay
// frozen.
ActorUpdateResult actor_update(const Hypernetwork& hyper, const MlpParams& theta1,
                               const MlpParams& critic1, const Interpolator& interp,
                               const std::vector<Transition>& batch,
                               const ActorUpdateOptions& opts);

struct Td3Config {
    ActorConfig actor;
    CriticConfig critic;
    std::vector<int> hyper_hidden = {32, 16};
    double hyper_out_scale = 0.01;

    long total_steps = 20000;
    int batch_size = 64;
    double gamma = 0.995;
    double tau = 0.005;
    std::size_t buffer_capacity = 200000;
    int workers = 10;
    int her_extra = 3;
    double actor_lr = 3e-4;
    double critic_lr = 3e-4;
    ComposeMode compose = ComposeMode::Fusion;
    FusionConfig fusion{0.05};
    Interpolator interp = Interpolator::identity();

    int policy_delay = 10;
    double exploration_noise = 0.1;   // sigma on behavior actions
    double smoothing_noise = 0.2;     // sigma' on target actions
    double noise_clip = 0.5;          // c
    double c_angle = 10.0;            // directional-angle loss coefficient
    bool angle_in_critic_scaled = true;  // false recovers the unweighted form

    long learn_start = 1000;          // also the random-action warmup horizon
    int env_steps_per_update = 1;
    bool resample_each_step = false;

    long eval_interval = 2000;
    int eval_episodes = 1;
    int eval_grid = 11;
    Eigen::VectorXd ref_point;

    std::uint64_t seed = 0;
    bool threaded = false;
};

struct Td3Result {
    Hypernetwork hyper;
    MlpParams theta1;  // base actor
    MlpParams critic1;
    MlpParams critic2;
    ParetoArchive archive;
    std::vector<TrainLogRecord> log;
    long env_steps = 0;
    long critic_updates = 0;
    long actor_updates = 0;
};

// Critics train every learner step; the actor and all target networks update
// every policy_delay steps. Workers, evaluation grid, and archive behave as
// in train_ddqn.
Td3Result train_td3(const Td3Config& cfg, const ContinuousEnvFactory& make_env,
                    const TrainHooks& hooks = {});

Eigen::VectorXd evaluate_policy_continuous(const Hypernetwork& hyper, const MlpParams& theta1,
                                           ComposeMode compose, const FusionConfig& fusion,
                                           const PreferenceVector& w, ContinuousEnv& env,
                                           int episodes);

}  // namespace pslmorl
