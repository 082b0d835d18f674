#include "pslmorl/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "pslmorl/envs/ftn.hpp"
#include "pslmorl/envs/pointnav.hpp"
#include "pslmorl/envs/tabular.hpp"

namespace pslmorl {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error("config: " + msg); }

void check_keys(const json& obj, const std::string& section,
                const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            fail("unknown key '" + key + "' in section '" + section + "'");
        }
    }
}

template <typename T>
void read(const json& obj, const std::string& section, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        fail("key '" + std::string(key) + "' in section '" + section +
             "' has the wrong type");
    }
}

void read_hidden(const json& obj, const std::string& section, const char* key,
                 std::vector<int>& out) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_array()) fail("key '" + std::string(key) + "' must be an array");
    out.clear();
    for (const auto& v : obj.at(key)) {
        if (!v.is_number_integer() || v.get<int>() < 1) {
            fail("key '" + std::string(key) + "' in section '" + section +
                 "' must hold positive integers");
        }
        out.push_back(v.get<int>());
    }
}

void parse_env(const json& obj, EnvConfig& env) {
    check_keys(obj, "env",
               {"name", "seed", "depth", "reward_file", "onehot_level", "dt", "damping",
                "episode_limit", "states", "actions", "m", "discount"});
    read(obj, "env", "name", env.name);
    read(obj, "env", "seed", env.seed);
    read(obj, "env", "depth", env.depth);
    read(obj, "env", "reward_file", env.reward_file);
    read(obj, "env", "onehot_level", env.onehot_level);
    read(obj, "env", "dt", env.dt);
    read(obj, "env", "damping", env.damping);
    read(obj, "env", "episode_limit", env.episode_limit);
    read(obj, "env", "states", env.states);
    read(obj, "env", "actions", env.actions);
    read(obj, "env", "m", env.m);
    read(obj, "env", "discount", env.discount);
}

void read_ref_point(const json& obj, const std::string& section, Eigen::VectorXd& out) {
    if (!obj.contains("ref_point")) return;
    const auto& arr = obj.at("ref_point");
    if (!arr.is_array()) fail("'ref_point' must be an array of numbers");
    out.resize(static_cast<Eigen::Index>(arr.size()));
    Eigen::Index i = 0;
    for (const auto& v : arr) {
        if (!v.is_number()) fail("'ref_point' must be an array of numbers");
        out[i++] = v.get<double>();
    }
}

void parse_ddqn(const json& obj, DdqnConfig& cfg) {
    check_keys(obj, "algorithm",
               {"total_steps", "batch_size", "gamma", "tau", "buffer_capacity", "her_extra",
                "fusion_alpha", "learning_rate", "policy_hidden", "hyper_hidden",
                "hyper_out_scale", "epsilon_start", "epsilon_end", "epsilon_decay_frac",
                "learn_start", "env_steps_per_update", "resample_each_step",
                "target_fusion", "eval_interval", "eval_episodes", "eval_grid", "ref_point",
                "threaded"});
    read(obj, "algorithm", "total_steps", cfg.total_steps);
    read(obj, "algorithm", "batch_size", cfg.batch_size);
    read(obj, "algorithm", "gamma", cfg.gamma);
    read(obj, "algorithm", "tau", cfg.tau);
    read(obj, "algorithm", "buffer_capacity", cfg.buffer_capacity);
    read(obj, "algorithm", "her_extra", cfg.her_extra);
    read(obj, "algorithm", "fusion_alpha", cfg.fusion.alpha);
    read(obj, "algorithm", "learning_rate", cfg.learning_rate);
    read_hidden(obj, "algorithm", "policy_hidden", cfg.qnet.hidden);
    read_hidden(obj, "algorithm", "hyper_hidden", cfg.hyper_hidden);
    read(obj, "algorithm", "hyper_out_scale", cfg.hyper_out_scale);
    read(obj, "algorithm", "epsilon_start", cfg.epsilon.start);
    read(obj, "algorithm", "epsilon_end", cfg.epsilon.end);
    read(obj, "algorithm", "epsilon_decay_frac", cfg.epsilon_decay_frac);
    read(obj, "algorithm", "learn_start", cfg.learn_start);
    read(obj, "algorithm", "env_steps_per_update", cfg.env_steps_per_update);
    read(obj, "algorithm", "resample_each_step", cfg.resample_each_step);
    read(obj, "algorithm", "target_fusion", cfg.target_fusion);
    read(obj, "algorithm", "eval_interval", cfg.eval_interval);
    read(obj, "algorithm", "eval_episodes", cfg.eval_episodes);
    read(obj, "algorithm", "eval_grid", cfg.eval_grid);
    read_ref_point(obj, "algorithm", cfg.ref_point);
    read(obj, "algorithm", "threaded", cfg.threaded);
}

void parse_td3(const json& obj, Td3Config& cfg) {
    check_keys(obj, "algorithm",
               {"total_steps", "batch_size", "gamma", "tau", "buffer_capacity", "her_extra",
                "fusion_alpha", "actor_lr", "critic_lr", "actor_hidden", "critic_hidden",
                "hyper_hidden", "hyper_out_scale", "policy_delay", "exploration_noise",
                "smoothing_noise", "noise_clip", "c_angle", "angle_in_critic_scaled",
                "learn_start", "env_steps_per_update", "resample_each_step",
                "eval_interval", "eval_episodes", "eval_grid", "ref_point", "threaded"});
    read(obj, "algorithm", "total_steps", cfg.total_steps);
    read(obj, "algorithm", "batch_size", cfg.batch_size);
    read(obj, "algorithm", "gamma", cfg.gamma);
    read(obj, "algorithm", "tau", cfg.tau);
    read(obj, "algorithm", "buffer_capacity", cfg.buffer_capacity);
    read(obj, "algorithm", "her_extra", cfg.her_extra);
    read(obj, "algorithm", "fusion_alpha", cfg.fusion.alpha);
    read(obj, "algorithm", "actor_lr", cfg.actor_lr);
    read(obj, "algorithm", "critic_lr", cfg.critic_lr);
    read_hidden(obj, "algorithm", "actor_hidden", cfg.actor.hidden);
    read_hidden(obj, "algorithm", "critic_hidden", cfg.critic.hidden);
    read_hidden(obj, "algorithm", "hyper_hidden", cfg.hyper_hidden);
    read(obj, "algorithm", "hyper_out_scale", cfg.hyper_out_scale);
    read(obj, "algorithm", "policy_delay", cfg.policy_delay);
    read(obj, "algorithm", "exploration_noise", cfg.exploration_noise);
    read(obj, "algorithm", "smoothing_noise", cfg.smoothing_noise);
    read(obj, "algorithm", "noise_clip", cfg.noise_clip);
    read(obj, "algorithm", "c_angle", cfg.c_angle);
    read(obj, "algorithm", "angle_in_critic_scaled", cfg.angle_in_critic_scaled);
    read(obj, "algorithm", "learn_start", cfg.learn_start);
    read(obj, "algorithm", "env_steps_per_update", cfg.env_steps_per_update);
    read(obj, "algorithm", "resample_each_step", cfg.resample_each_step);
    read(obj, "algorithm", "eval_interval", cfg.eval_interval);
    read(obj, "algorithm", "eval_episodes", cfg.eval_episodes);
    read(obj, "algorithm", "eval_grid", cfg.eval_grid);
    read_ref_point(obj, "algorithm", cfg.ref_point);
    read(obj, "algorithm", "threaded", cfg.threaded);
}

void parse_baseline(const json& obj, RadialBaselineConfig& cfg) {
    check_keys(obj, "baseline",
               {"weights", "steps_per_weight", "batch_size", "gamma", "tau",
                "learning_rate", "buffer_capacity", "hidden", "epsilon_start",
                "epsilon_end", "epsilon_decay_frac", "learn_start",
                "env_steps_per_update", "eval_episodes"});
    read(obj, "baseline", "weights", cfg.weights);
    read(obj, "baseline", "steps_per_weight", cfg.steps_per_weight);
    read(obj, "baseline", "batch_size", cfg.batch_size);
    read(obj, "baseline", "gamma", cfg.gamma);
    read(obj, "baseline", "tau", cfg.tau);
    read(obj, "baseline", "learning_rate", cfg.learning_rate);
    read(obj, "baseline", "buffer_capacity", cfg.buffer_capacity);
    read_hidden(obj, "baseline", "hidden", cfg.hidden);
    read(obj, "baseline", "epsilon_start", cfg.epsilon_start);
    read(obj, "baseline", "epsilon_end", cfg.epsilon_end);
    read(obj, "baseline", "epsilon_decay_frac", cfg.epsilon_decay_frac);
    read(obj, "baseline", "learn_start", cfg.learn_start);
    read(obj, "baseline", "env_steps_per_update", cfg.env_steps_per_update);
    read(obj, "baseline", "eval_episodes", cfg.eval_episodes);
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail("cannot open " + path);
    json root;
    try {
        root = json::parse(is, nullptr, /*allow_exceptions=*/true,
                           /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        fail(path + ": " + e.what());
    }
    if (!root.is_object()) fail("top level must be an object");
    check_keys(root, "top level",
               {"algo", "seed", "workers", "out_dir", "ablation", "env", "algorithm",
                "baseline"});

    RunConfig cfg;
    read(root, "top level", "algo", cfg.algo);
    read(root, "top level", "seed", cfg.seed);
    read(root, "top level", "workers", cfg.workers);
    read(root, "top level", "out_dir", cfg.out_dir);
    read(root, "top level", "ablation", cfg.ablation);
    if (root.contains("env")) parse_env(root.at("env"), cfg.env);
    if (root.contains("algorithm")) {
        if (cfg.algo == "psl-td3") {
            parse_td3(root.at("algorithm"), cfg.td3);
        } else {
            parse_ddqn(root.at("algorithm"), cfg.ddqn);
        }
    }
    if (root.contains("baseline")) parse_baseline(root.at("baseline"), cfg.baseline);

    sync_run_config(cfg);
    validate_run_config(cfg);
    return cfg;
}

void sync_run_config(RunConfig& cfg) {
    cfg.ddqn.seed = cfg.seed;
    cfg.ddqn.workers = cfg.workers;
    cfg.td3.seed = cfg.seed;
    cfg.td3.workers = cfg.workers;
    const ComposeMode mode = compose_mode_from_string(cfg.ablation);
    cfg.ddqn.compose = mode;
    cfg.td3.compose = mode;
}

void validate_run_config(const RunConfig& cfg) {
    if (cfg.algo != "psl-ddqn" && cfg.algo != "psl-td3" && cfg.algo != "ra-baseline") {
        fail("algo must be psl-ddqn, psl-td3, or ra-baseline (got '" + cfg.algo + "')");
    }
    compose_mode_from_string(cfg.ablation);  // throws on bad values
    if (cfg.workers < 1) fail("workers must be >= 1");

    const EnvConfig& env = cfg.env;
    if (env.name != "ftn" && env.name != "pointnav" && env.name != "tabular") {
        fail("env.name must be ftn, pointnav, or tabular (got '" + env.name + "')");
    }
    if (env.name == "ftn") {
        if (env.depth < 1 || env.depth > 20) fail("env.depth out of range [1,20]");
        if (!env.reward_file.empty() && !std::filesystem::exists(env.reward_file)) {
            fail("env.reward_file does not exist: " + env.reward_file);
        }
    }
    if (env.name == "pointnav") {
        if (env.dt <= 0.0) fail("env.dt must be positive");
        if (env.damping <= 0.0 || env.damping >= 1.0) fail("env.damping outside (0,1)");
    }
    if (env.episode_limit < 1) fail("env.episode_limit must be >= 1");
    if (env.name == "tabular") {
        if (env.states < 1 || env.states > 32) fail("env.states outside [1,32]");
        if (env.actions < 1 || env.actions > 8) fail("env.actions outside [1,8]");
        if (env.m < 2) fail("env.m must be >= 2");
        if (!(env.discount >= 0.0 && env.discount < 1.0)) {
            fail("env.discount outside [0,1)");
        }
    }

    auto check_common = [&](double gamma, double tau, int batch, double alpha,
                            long total_steps, int her) {
        if (!(gamma >= 0.0 && gamma < 1.0)) fail("gamma outside [0,1)");
        if (!(tau > 0.0 && tau <= 1.0)) fail("tau outside (0,1]");
        if (batch < 1) fail("batch_size must be >= 1");
        if (alpha < 0.0 || alpha > 1.0) fail("fusion_alpha outside [0,1]");
        if (total_steps < 0) fail("total_steps must be >= 0");
        if (her < 0) fail("her_extra must be >= 0");
    };
    if (cfg.algo == "psl-ddqn") {
        check_common(cfg.ddqn.gamma, cfg.ddqn.tau, cfg.ddqn.batch_size,
                     cfg.ddqn.fusion.alpha, cfg.ddqn.total_steps, cfg.ddqn.her_extra);
        if (cfg.ddqn.eval_grid < 2) fail("eval_grid must be >= 2");
        if (cfg.ddqn.env_steps_per_update < 1) fail("env_steps_per_update must be >= 1");
    } else if (cfg.algo == "psl-td3") {
        check_common(cfg.td3.gamma, cfg.td3.tau, cfg.td3.batch_size, cfg.td3.fusion.alpha,
                     cfg.td3.total_steps, cfg.td3.her_extra);
        if (cfg.td3.policy_delay < 1) fail("policy_delay must be >= 1");
        if (cfg.td3.noise_clip <= 0.0) fail("noise_clip must be positive");
        if (cfg.td3.exploration_noise < 0.0 || cfg.td3.smoothing_noise < 0.0) {
            fail("noise sigmas must be nonnegative");
        }
        if (env.name != "pointnav") fail("psl-td3 requires a continuous environment");
    } else {
        check_common(cfg.baseline.gamma, cfg.baseline.tau, cfg.baseline.batch_size, 0.0,
                     cfg.baseline.steps_per_weight, 0);
        if (cfg.baseline.weights < 1) fail("baseline.weights must be >= 1");
        if (env.name == "pointnav") fail("ra-baseline requires a discrete environment");
    }
    if (cfg.algo != "psl-td3" && env.name == "pointnav") {
        fail("discrete-action algorithms cannot run on pointnav");
    }
}

namespace {

json env_to_json(const EnvConfig& env) {
    json j;
    j["name"] = env.name;
    j["seed"] = env.seed;
    if (env.name == "ftn") {
        j["depth"] = env.depth;
        j["reward_file"] = env.reward_file;
        j["onehot_level"] = env.onehot_level;
    } else if (env.name == "pointnav") {
        j["dt"] = env.dt;
        j["damping"] = env.damping;
        j["episode_limit"] = env.episode_limit;
    } else {
        j["states"] = env.states;
        j["actions"] = env.actions;
        j["m"] = env.m;
        j["discount"] = env.discount;
        j["episode_limit"] = env.episode_limit;
    }
    return j;
}

json ref_to_json(const Eigen::VectorXd& ref) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < ref.size(); ++i) arr.push_back(ref[i]);
    return arr;
}

}  // namespace

std::string resolved_config_json(const RunConfig& cfg) {
    json j;
    j["algo"] = cfg.algo;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    j["out_dir"] = cfg.out_dir;
    j["ablation"] = cfg.ablation;
    j["env"] = env_to_json(cfg.env);
    json a;
    if (cfg.algo == "psl-td3") {
        const Td3Config& c = cfg.td3;
        a["total_steps"] = c.total_steps;
        a["batch_size"] = c.batch_size;
        a["gamma"] = c.gamma;
        a["tau"] = c.tau;
        a["buffer_capacity"] = c.buffer_capacity;
        a["her_extra"] = c.her_extra;
        a["fusion_alpha"] = c.fusion.alpha;
        a["actor_lr"] = c.actor_lr;
        a["critic_lr"] = c.critic_lr;
        a["actor_hidden"] = c.actor.hidden;
        a["critic_hidden"] = c.critic.hidden;
        a["hyper_hidden"] = c.hyper_hidden;
        a["hyper_out_scale"] = c.hyper_out_scale;
        a["policy_delay"] = c.policy_delay;
        a["exploration_noise"] = c.exploration_noise;
        a["smoothing_noise"] = c.smoothing_noise;
        a["noise_clip"] = c.noise_clip;
        a["c_angle"] = c.c_angle;
        a["angle_in_critic_scaled"] = c.angle_in_critic_scaled;
        a["learn_start"] = c.learn_start;
        a["env_steps_per_update"] = c.env_steps_per_update;
        a["resample_each_step"] = c.resample_each_step;
        a["eval_interval"] = c.eval_interval;
        a["eval_episodes"] = c.eval_episodes;
        a["eval_grid"] = c.eval_grid;
        a["ref_point"] = ref_to_json(c.ref_point);
        a["threaded"] = c.threaded;
    } else if (cfg.algo == "psl-ddqn") {
        const DdqnConfig& c = cfg.ddqn;
        a["total_steps"] = c.total_steps;
        a["batch_size"] = c.batch_size;
        a["gamma"] = c.gamma;
        a["tau"] = c.tau;
        a["buffer_capacity"] = c.buffer_capacity;
        a["her_extra"] = c.her_extra;
        a["fusion_alpha"] = c.fusion.alpha;
        a["learning_rate"] = c.learning_rate;
        a["policy_hidden"] = c.qnet.hidden;
        a["hyper_hidden"] = c.hyper_hidden;
        a["hyper_out_scale"] = c.hyper_out_scale;
        a["epsilon_start"] = c.epsilon.start;
        a["epsilon_end"] = c.epsilon.end;
        a["epsilon_decay_frac"] = c.epsilon_decay_frac;
        a["learn_start"] = c.learn_start;
        a["env_steps_per_update"] = c.env_steps_per_update;
        a["resample_each_step"] = c.resample_each_step;
        a["target_fusion"] = c.target_fusion;
        a["eval_interval"] = c.eval_interval;
        a["eval_episodes"] = c.eval_episodes;
        a["eval_grid"] = c.eval_grid;
        a["ref_point"] = ref_to_json(c.ref_point);
        a["threaded"] = c.threaded;
    } else {
        const RadialBaselineConfig& c = cfg.baseline;
        a["weights"] = c.weights;
        a["steps_per_weight"] = c.steps_per_weight;
        a["batch_size"] = c.batch_size;
        a["gamma"] = c.gamma;
        a["tau"] = c.tau;
        a["learning_rate"] = c.learning_rate;
        a["buffer_capacity"] = c.buffer_capacity;
        a["hidden"] = c.hidden;
        a["epsilon_start"] = c.epsilon_start;
        a["epsilon_end"] = c.epsilon_end;
        a["epsilon_decay_frac"] = c.epsilon_decay_frac;
        a["learn_start"] = c.learn_start;
        a["env_steps_per_update"] = c.env_steps_per_update;
        a["eval_episodes"] = c.eval_episodes;
    }
    j[cfg.algo == "ra-baseline" ? "baseline" : "algorithm"] = a;
    return j.dump(2);
}

namespace {

EnvConfig env_from_json(const json& j) {
    EnvConfig env;
    parse_env(j, env);
    return env;
}

json spec_to_json(const std::vector<LayerSpec>& spec) {
    json arr = json::array();
    for (const auto& l : spec) {
        arr.push_back({{"in", l.in_dim}, {"out", l.out_dim}, {"act", to_string(l.act)}});
    }
    return arr;
}

std::vector<LayerSpec> spec_from_json(const json& arr) {
    std::vector<LayerSpec> spec;
    for (const auto& l : arr) {
        spec.push_back({l.at("in").get<int>(), l.at("out").get<int>(),
                        activation_from_string(l.at("act").get<std::string>())});
    }
    validate_spec(spec);
    return spec;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vector vector_from_json(const json& arr) {
    Vector v(static_cast<Eigen::Index>(arr.size()));
    Eigen::Index i = 0;
    for (const auto& x : arr) v[i++] = x.get<double>();
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
    json j;
    j["algo"] = ck.algo;
    j["compose"] = ck.compose;
    j["fusion_alpha"] = ck.fusion_alpha;
    j["step"] = ck.step;
    j["env"] = env_to_json(ck.env);
    j["policy_spec"] = spec_to_json(ck.policy_spec);
    j["theta1"] = vector_to_json(ck.theta1);
    j["hyper_spec"] = spec_to_json(ck.hyper_spec);
    j["hyper"] = vector_to_json(ck.hyper);
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << j.dump() << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    Checkpoint ck;
    ck.algo = j.at("algo").get<std::string>();
    ck.compose = j.at("compose").get<std::string>();
    ck.fusion_alpha = j.at("fusion_alpha").get<double>();
    ck.step = j.at("step").get<long>();
    ck.env = env_from_json(j.at("env"));
    ck.policy_spec = spec_from_json(j.at("policy_spec"));
    ck.theta1 = vector_from_json(j.at("theta1"));
    ck.hyper_spec = spec_from_json(j.at("hyper_spec"));
    ck.hyper = vector_from_json(j.at("hyper"));
    if (static_cast<std::size_t>(ck.theta1.size()) != flat_size(ck.policy_spec) ||
        static_cast<std::size_t>(ck.hyper.size()) != flat_size(ck.hyper_spec)) {
        throw std::runtime_error(path + ": parameter blobs do not match layer specs");
    }
    return ck;
}

MlpParams checkpoint_policy(const Checkpoint& ck) {
    FlatParams f;
    f.data = ck.theta1;
    return unflatten(f, ck.policy_spec);
}

Hypernetwork checkpoint_hypernetwork(const Checkpoint& ck) {
    Hypernetwork h;
    FlatParams f;
    f.data = ck.hyper;
    h.net = unflatten(f, ck.hyper_spec);
    h.target_spec = ck.policy_spec;
    return h;
}

DiscreteEnvFactory make_discrete_env_factory(const EnvConfig& env) {
    if (env.name == "ftn") {
        Matrix leaves = env.reward_file.empty() ? gen_leaf_rewards(env.seed, env.depth)
                                                : load_leaf_rewards(env.reward_file);
        const int depth = env.depth;
        const bool onehot = env.onehot_level;
        return [leaves, depth, onehot](std::uint64_t) {
            return std::make_unique<FtnEnv>(depth, leaves, onehot);
        };
    }
    if (env.name == "tabular") {
        const TabularMOMDP momdp = random_tabular(env.seed, env.states, env.actions, env.m);
        const int limit = env.episode_limit;
        const double discount = env.discount;
        return [momdp, limit, discount](std::uint64_t seed) {
            return std::make_unique<TabularEnv>(momdp, seed, limit, discount);
        };
    }
    throw std::runtime_error("env '" + env.name + "' has no discrete-action adapter");
}

ContinuousEnvFactory make_continuous_env_factory(const EnvConfig& env) {
    if (env.name != "pointnav") {
        throw std::runtime_error("env '" + env.name + "' has no continuous-action adapter");
    }
    PointNavEnv::Params p;
    p.dt = env.dt;
    p.damping = env.damping;
    p.episode_limit = env.episode_limit;
    return [p](std::uint64_t) { return std::make_unique<PointNavEnv>(p); };
}

}  // namespace pslmorl
