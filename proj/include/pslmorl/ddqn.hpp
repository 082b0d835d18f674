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

// Preference-conditioned vector Q-network: input concat(state, w), output an
// action_count x m value matrix (row a holds Q(s, a, w)).
struct QNetConfig {
    int state_dim = 0;
    int action_count = 0;
    int m = 0;
    std::vector<int> hidden;
    Activation hidden_act = Activation::Relu;

    std::vector<LayerSpec> layer_spec() const;
};

// Reshape of the network output; row a is the value vector of action a.
Matrix q_values(const MlpParams& net, const Eigen::VectorXd& state,
                const PreferenceVector& w, int action_count, int m);

// argmax_a S_c(w_p, Q(s,a,w)) * (w^T Q(s,a,w)); ties resolve to the lowest
// action index.
int greedy_action(const MlpParams& net, const Eigen::VectorXd& state,
                  const PreferenceVector& w, const PreferenceVector& w_p,
                  int action_count, int m);

// epsilon-greedy wrapper around greedy_action.
int behavior_action(const MlpParams& net, const Eigen::VectorXd& state,
                    const PreferenceVector& w, const PreferenceVector& w_p,
                    int action_count, int m, double epsilon, Rng& rng);

// Vector target y = r + gamma * Q(s', a*, w; target_net) (y = r when done).
// a* is chosen by the online fused network; the target network only supplies
// the value and receives no gradient.
Eigen::VectorXd ddqn_target(const MlpParams& online_fused, const MlpParams& target_net,
                            const Eigen::VectorXd& next_state, const Eigen::VectorXd& reward,
                            bool done, const PreferenceVector& w, const PreferenceVector& w_p,
                            double gamma, int action_count, int m);

struct DdqnLossResult {
    double loss = 0.0;
    Gradients grad_theta1;  // shaped like the policy network
    Gradients grad_phi;     // shaped like the hypernetwork
};

struct DdqnLossOptions {
    double gamma = 0.99;
    ComposeMode compose = ComposeMode::Fusion;
    FusionConfig fusion{0.05};
    // When set, the target value is read from compose(theta1', phi(w))
    // instead of the plain target network.
    bool target_fusion = false;
};

// Mean over the batch of |y - Q(s,a,w)|^2 / m, differentiated through the
// parameter composition into the base policy and the hypernetwork. Targets
// are constants.
DdqnLossResult ddqn_loss(const Hypernetwork& hyper, const MlpParams& theta1,
                         const MlpParams& target_net, const QNetConfig& qcfg,
                         const Interpolator& interp, const std::vector<Transition>& batch,
                         const DdqnLossOptions& opts);

struct DdqnConfig {
    QNetConfig qnet;
    std::vector<int> hyper_hidden = {32, 16};
    double hyper_out_scale = 0.01;

    long total_steps = 20000;  // environment transitions, summed over workers
    int batch_size = 32;
    double gamma = 0.99;
    double tau = 0.005;
    std::size_t buffer_capacity = 10000;
    int workers = 10;
    int her_extra = 3;
    double learning_rate = 3e-4;
    ComposeMode compose = ComposeMode::Fusion;
    FusionConfig fusion{0.05};
    bool target_fusion = false;
    Interpolator interp = Interpolator::identity();

    EpsilonSchedule epsilon;           // decay_steps filled from total_steps when 0
    double epsilon_decay_frac = 0.3;
    long learn_start = 500;            // buffer size required before updates
    int env_steps_per_update = 5;      // collected transitions per learner update
    bool resample_each_step = false;   // preference per step instead of per episode

    long eval_interval = 2000;  // in environment steps
    int eval_episodes = 1;
    int eval_grid = 11;
    Eigen::VectorXd ref_point;  // hypervolume reference; zeros(m) when empty

    std::uint64_t seed = 0;
    bool threaded = false;  // collect worker episodes on std::thread; results
                            // are identical to the serial mode
};

struct DdqnResult {
    Hypernetwork hyper;
    MlpParams theta1;
    ParetoArchive archive;
    std::vector<TrainLogRecord> log;
    long env_steps = 0;
    long updates = 0;
};

// Algorithm: workers (each owning one preference-region band) roll out
// episodes with a fused snapshot of the current parameters; the learner
// samples relabeled batches, updates the hypernetwork and base policy, and
// soft-updates the target net every step. Every eval_interval env steps the
// policy is evaluated on a fixed preference grid and the archive absorbs the
// nondominated results.
DdqnResult train_ddqn(const DdqnConfig& cfg, const DiscreteEnvFactory& make_env,
                      const TrainHooks& hooks = {});

// Average undiscounted episode return of the greedy policy for preference w.
Eigen::VectorXd evaluate_policy(const Hypernetwork& hyper, const MlpParams& theta1,
                                ComposeMode compose, const FusionConfig& fusion,
                                const Interpolator& interp, const PreferenceVector& w,
                                DiscreteEnv& env, int episodes);

}  // namespace pslmorl
