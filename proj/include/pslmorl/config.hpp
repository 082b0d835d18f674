#pragma once

#include <cstdint>
#include <string>

#include "pslmorl/ddqn.hpp"
#include "pslmorl/td3.hpp"

namespace pslmorl {

struct EnvConfig {
    std::string name = "ftn";  // ftn | pointnav | tabular
    std::uint64_t seed = 7;
    // ftn
    int depth = 5;
    std::string reward_file;  // optional; generated from seed when empty
    bool onehot_level = false;
    // pointnav
    double dt = 0.1;
    double damping = 0.1;
    int episode_limit = 50;
    // tabular
    int states = 8;
    int actions = 3;
    int m = 2;
    double discount = 0.95;
};

// One radial-baseline run trains an independent scalar-reward network per
// evenly spaced weight and dominance-filters the resulting returns.
struct RadialBaselineConfig {
    int weights = 11;
    long steps_per_weight = 5000;
    int batch_size = 32;
    double gamma = 0.99;
    double tau = 0.005;
    double learning_rate = 3e-4;
    std::size_t buffer_capacity = 10000;
    std::vector<int> hidden = {32, 32};
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double epsilon_decay_frac = 0.3;
    long learn_start = 200;
    int env_steps_per_update = 2;
    int eval_episodes = 1;
};

struct RunConfig {
    std::string algo = "psl-ddqn";  // psl-ddqn | psl-td3 | ra-baseline
    std::uint64_t seed = 0;
    int workers = 10;
    std::string out_dir = "runs";
    std::string ablation = "fusion";  // fusion | gen | add
    EnvConfig env;
    DdqnConfig ddqn;
    Td3Config td3;
    RadialBaselineConfig baseline;
};

// Parses a JSON config (// and /* */ comments allowed). Unknown keys, type
// mismatches, and out-of-range values raise std::runtime_error naming the
// offending key; a referenced reward file must exist.
RunConfig load_run_config(const std::string& path);

// Copies the shared top-level fields (seed, workers, ablation) into the
// algorithm sub-configs; call again after overriding any of them.
void sync_run_config(RunConfig& cfg);

void validate_run_config(const RunConfig& cfg);

// Fully resolved configuration (defaults filled in) as pretty JSON; used by
// --dry-run and the run manifest.
std::string resolved_config_json(const RunConfig& cfg);

// Environment builders. The factory argument seeds per-instance stochasticity
// (only the tabular environment uses it).
DiscreteEnvFactory make_discrete_env_factory(const EnvConfig& env);
ContinuousEnvFactory make_continuous_env_factory(const EnvConfig& env);

// Everything needed to evaluate a trained policy later: the base policy and
// hypernetwork parameters, their layer specs, the composition settings, and
// the environment the run used.
struct Checkpoint {
    std::string algo;     // psl-ddqn | psl-td3
    std::string compose;  // fusion | gen | add
    double fusion_alpha = 0.05;
    long step = 0;
    EnvConfig env;
    std::vector<LayerSpec> policy_spec;
    Vector theta1;
    std::vector<LayerSpec> hyper_spec;
    Vector hyper;
};

void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

MlpParams checkpoint_policy(const Checkpoint& ck);
Hypernetwork checkpoint_hypernetwork(const Checkpoint& ck);

}  // namespace pslmorl
