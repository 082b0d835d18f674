#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pslmorl/baseline.hpp"
#include "pslmorl/config.hpp"
#include "pslmorl/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pslmorl;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kOutRootEnvVar = "PSLMORL_OUT_ROOT";

std::string utc_now(const char* fmt) {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::strftime(buf, sizeof(buf), fmt, &tm);
    return buf;
}

// out_dir/<run_id> with run_id = seed + timestamp; suffixed on collision so
// an existing run is never overwritten.
fs::path make_run_dir(const fs::path& root, std::uint64_t seed) {
    const std::string base = "s" + std::to_string(seed) + "-" + utc_now("%Y%m%d-%H%M%S");
    fs::path dir = root / base;
    for (int i = 1; fs::exists(dir); ++i) {
        dir = root / (base + "-" + std::to_string(i));
    }
    fs::create_directories(dir);
    return dir;
}

void write_text_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os << content;
    }
    fs::rename(tmp, path);
}

fs::path output_root(const std::string& configured) {
    if (const char* env = std::getenv(kOutRootEnvVar); env && *env) return env;
    return configured;
}

Eigen::VectorXd parse_vector_literal(const std::string& text) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.find_first_not_of(" \t") != std::string::npos) {
            vals.push_back(std::stod(tok));
        }
    }
    if (vals.empty()) throw std::runtime_error("empty vector literal '" + text + "'");
    return Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                             static_cast<Eigen::Index>(vals.size()));
}

// One preference per line, comma-separated; '#' starts a comment.
std::vector<PreferenceVector> read_preferences(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open preference file " + path);
    std::vector<PreferenceVector> prefs;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            PreferenceVector w = parse_vector_literal(line);
            check_preference(w);
            prefs.push_back(std::move(w));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (prefs.empty()) {
        throw std::runtime_error("preference file " + path + " has no entries");
    }
    return prefs;
}

json metrics_json(const std::vector<ObjectivePoint>& points, const Eigen::VectorXd& ref) {
    if (points.empty()) throw std::runtime_error("front is empty");
    json j;
    j["points"] = points.size();
    j["hypervolume"] = hypervolume(points, ref);
    const auto sp = sparsity(points);
    if (sp.has_value()) {
        j["sparsity"] = *sp;
    } else {
        j["sparsity"] = "N/A";
    }
    return j;
}

Eigen::VectorXd ref_or_zero(const std::string& ref_text, Eigen::Index m) {
    if (ref_text.empty()) return Eigen::VectorXd::Zero(m);
    Eigen::VectorXd ref = parse_vector_literal(ref_text);
    if (ref.size() != m) {
        throw std::runtime_error("reference point has " + std::to_string(ref.size()) +
                                 " coordinates, front has " + std::to_string(m));
    }
    return ref;
}

// Writes checkpoint_latest/final/diverged.json under the run directory.
struct CheckpointSink {
    fs::path dir;
    std::string algo;
    std::string compose;
    double alpha = 0.0;
    EnvConfig env;

    void operator()(const std::string& tag, long step, const Hypernetwork& hyper,
                    const MlpParams& theta1) const {
        Checkpoint ck;
        ck.algo = algo;
        ck.compose = compose;
        ck.fusion_alpha = alpha;
        ck.step = step;
        ck.env = env;
        ck.policy_spec = theta1.spec();
        ck.theta1 = flatten(theta1).data;
        ck.hyper_spec = hyper.net.spec();
        ck.hyper = flatten(hyper.net).data;
        const char* name = tag == "final"      ? "checkpoint_final.json"
                           : tag == "diverged" ? "checkpoint_diverged.json"
                                               : "checkpoint_latest.json";
        save_checkpoint((dir / name).string(), ck);
    }
};

struct TrainCliOpts {
    std::string config_path;
    bool dry_run = false;
    bool deterministic = false;
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

void write_manifest(const fs::path& dir, const RunConfig& cfg, const std::string& started,
                    const json& final_metrics) {
    json manifest;
    manifest["version"] = kVersion;
    manifest["seed"] = cfg.seed;
    manifest["algo"] = cfg.algo;
    manifest["started"] = started;
    manifest["finished"] = utc_now("%Y-%m-%dT%H:%M:%SZ");
    manifest["config"] = json::parse(resolved_config_json(cfg));
    manifest["final"] = final_metrics;
    write_text_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

int run_baseline(const RunConfig& cfg, const fs::path& dir, const std::string& started) {
    const auto factory = make_discrete_env_factory(cfg.env);
    const RadialBaselineResult res = train_radial_baseline(cfg.baseline, factory, cfg.seed);
    const int m = static_cast<int>(res.returns.front().values.size());
    write_front_csv((dir / "front.csv").string(), res.front, m);
    write_front_csv((dir / "returns.csv").string(), res.returns, m);

    const Eigen::VectorXd ref = Eigen::VectorXd::Zero(m);
    const json metrics = metrics_json(res.front, ref);
    write_manifest(dir, cfg, started, metrics);
    std::cout << "run dir: " << dir.string() << "\n" << metrics.dump(2) << "\n";
    return 0;
}

int cmd_train(const TrainCliOpts& opt) {
    RunConfig cfg = load_run_config(opt.config_path);
    if (opt.workers) cfg.workers = *opt.workers;
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.out_dir) cfg.out_dir = *opt.out_dir;
    sync_run_config(cfg);
    const bool threaded = !opt.deterministic && cfg.workers > 1;
    cfg.ddqn.threaded = threaded;
    cfg.td3.threaded = threaded;
    validate_run_config(cfg);

    if (opt.dry_run) {
        std::cout << resolved_config_json(cfg) << "\n";
        return 0;
    }

    const std::string started = utc_now("%Y-%m-%dT%H:%M:%SZ");
    const fs::path dir = make_run_dir(output_root(cfg.out_dir), cfg.seed);
    write_text_atomic(dir / "resolved_config.json", resolved_config_json(cfg) + "\n");

    if (cfg.algo == "ra-baseline") return run_baseline(cfg, dir, started);

    std::ofstream log(dir / "log.jsonl");
    if (!log) throw std::runtime_error("cannot open " + (dir / "log.jsonl").string());
    TrainHooks hooks;
    hooks.on_log = [&log](const TrainLogRecord& rec) {
        log << to_jsonl(rec) << "\n";
        log.flush();
    };
    const double alpha = cfg.algo == "psl-td3" ? cfg.td3.fusion.alpha : cfg.ddqn.fusion.alpha;
    hooks.on_checkpoint = CheckpointSink{dir, cfg.algo, cfg.ablation, alpha, cfg.env};

    std::vector<ObjectivePoint> front;
    json final_metrics;
    int m = 0;
    long env_steps = 0;
    if (cfg.algo == "psl-td3") {
        const auto factory = make_continuous_env_factory(cfg.env);
        const Td3Result res = train_td3(cfg.td3, factory, hooks);
        front = res.archive.points();
        m = static_cast<int>(front.empty() ? 0 : front.front().values.size());
        env_steps = res.env_steps;
    } else {
        const auto factory = make_discrete_env_factory(cfg.env);
        const DdqnResult res = train_ddqn(cfg.ddqn, factory, hooks);
        front = res.archive.points();
        m = static_cast<int>(front.empty() ? 0 : front.front().values.size());
        env_steps = res.env_steps;
    }
    if (front.empty()) throw std::runtime_error("training produced an empty archive");

    write_front_csv((dir / "front.csv").string(), front, m);
    const Eigen::VectorXd configured_ref =
        cfg.algo == "psl-td3" ? cfg.td3.ref_point : cfg.ddqn.ref_point;
    const Eigen::VectorXd ref =
        configured_ref.size() == m ? configured_ref : Eigen::VectorXd::Zero(m);
    final_metrics = metrics_json(front, ref);
    final_metrics["env_steps"] = env_steps;
    write_manifest(dir, cfg, started, final_metrics);
    std::cout << "run dir: " << dir.string() << "\n" << final_metrics.dump(2) << "\n";
    return 0;
}

struct EvalCliOpts {
    std::string checkpoint_path;
    std::string prefs_path;
    int grid = 0;
    std::string ref_text;
    int episodes = 1;
    std::uint64_t seed = 0;
    std::string out_csv = "eval_front.csv";
    std::string metrics_path;
};

int cmd_eval(const EvalCliOpts& opt) {
    const Checkpoint ck = load_checkpoint(opt.checkpoint_path);
    const MlpParams theta1 = checkpoint_policy(ck);
    const Hypernetwork hyper = checkpoint_hypernetwork(ck);
    const ComposeMode compose = compose_mode_from_string(ck.compose);
    const FusionConfig fusion{ck.fusion_alpha};
    const Interpolator interp = Interpolator::identity();

    std::vector<PreferenceVector> prefs;
    int m = 0;
    if (!opt.prefs_path.empty()) {
        prefs = read_preferences(opt.prefs_path);
        m = static_cast<int>(prefs.front().size());
    }

    std::vector<ObjectivePoint> points;
    if (ck.algo == "psl-td3") {
        const auto factory = make_continuous_env_factory(ck.env);
        auto env = factory(derive_seed(opt.seed, 101));
        const int env_m = env->descriptor().m;
        if (prefs.empty()) prefs = simplex_grid(env_m, opt.grid);
        m = env_m;
        for (const auto& w : prefs) {
            const Eigen::VectorXd J = evaluate_policy_continuous(
                hyper, theta1, compose, fusion, w, *env, opt.episodes);
            points.push_back({J, w, ck.step});
        }
    } else {
        const auto factory = make_discrete_env_factory(ck.env);
        auto env = factory(derive_seed(opt.seed, 101));
        const int env_m = env->descriptor().m;
        if (prefs.empty()) prefs = simplex_grid(env_m, opt.grid);
        m = env_m;
        for (const auto& w : prefs) {
            const Eigen::VectorXd J = evaluate_policy(hyper, theta1, compose, fusion,
                                                      interp, w, *env, opt.episodes);
            points.push_back({J, w, ck.step});
        }
    }

    write_front_csv(opt.out_csv, points, m);
    const json metrics = metrics_json(points, ref_or_zero(opt.ref_text, m));
    const std::string text = metrics.dump(2);
    std::cout << text << "\n";
    if (!opt.metrics_path.empty()) write_text_atomic(opt.metrics_path, text + "\n");
    return 0;
}

int cmd_metrics(const std::string& front_path, const std::string& ref_text) {
    const std::vector<ObjectivePoint> points = read_front_csv(front_path);
    if (points.empty()) throw std::runtime_error(front_path + " has no data rows");
    const Eigen::VectorXd ref = ref_or_zero(ref_text, points.front().values.size());
    std::cout << metrics_json(points, ref).dump(2) << "\n";
    return 0;
}

int cmd_front_export(const std::string& in_path, const std::string& out_path,
                     const std::string& ref_text) {
    const std::vector<ObjectivePoint> points = read_front_csv(in_path);
    if (points.empty()) throw std::runtime_error(in_path + " has no data rows");
    const std::vector<ObjectivePoint> front = pareto_filter(points);
    const int m = static_cast<int>(front.front().values.size());
    write_front_csv(out_path, front, m);
    std::cout << metrics_json(front, ref_or_zero(ref_text, m)).dump(2) << "\n";
    return 0;
}

int cmd_verify(std::uint64_t seed) {
    const std::vector<VerifyCheck> checks = run_verification(seed);
    std::cout << verification_report_json(checks) << "\n";
    for (const auto& c : checks) {
        if (!c.pass) return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Preference-conditioned multi-objective RL: training, evaluation, "
                 "Pareto metrics, and verification"};
    app.require_subcommand(1);

    TrainCliOpts train_opts;
    std::uint64_t seed_arg = 0;
    int workers_arg = 0;
    std::string out_dir_arg;
    auto* train = app.add_subcommand("train", "Train a run from a config file");
    train->add_option("-c,--config", train_opts.config_path, "Config file (JSON, // comments ok)")
        ->required();
    train->add_flag("--dry-run", train_opts.dry_run,
                    "Validate and print the resolved config without training");
    train->add_flag("--deterministic", train_opts.deterministic,
                    "Serial episode collection (byte-identical reruns)");
    auto* wopt = train->add_option("--workers", workers_arg, "Override worker count");
    auto* sopt = train->add_option("--seed", seed_arg, "Override run seed");
    auto* oopt = train->add_option("--out-dir", out_dir_arg, "Override output directory");

    EvalCliOpts eval_opts;
    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on preferences");
    eval->add_option("--checkpoint", eval_opts.checkpoint_path, "Checkpoint JSON")->required();
    auto* prefs_opt = eval->add_option("--prefs", eval_opts.prefs_path,
                                       "Preference file (one comma-separated point per line)");
    auto* grid_opt = eval->add_option("--grid", eval_opts.grid, "Evaluate n grid preferences");
    prefs_opt->excludes(grid_opt);
    eval->add_option("--ref", eval_opts.ref_text, "Hypervolume reference point, e.g. 0,0");
    eval->add_option("--episodes", eval_opts.episodes, "Episodes per preference");
    eval->add_option("--seed", eval_opts.seed, "Evaluation environment seed");
    eval->add_option("--out", eval_opts.out_csv, "Front CSV output path");
    eval->add_option("--metrics-out", eval_opts.metrics_path, "Also write the metrics JSON here");

    std::string front_path, ref_text;
    auto* metrics = app.add_subcommand("metrics", "Hypervolume and sparsity of a front CSV");
    metrics->add_option("--front", front_path, "Front CSV")->required();
    metrics->add_option("--ref", ref_text, "Reference point, e.g. 0,0 (default zeros)");

    TrainCliOpts base_opts;
    auto* baseline = app.add_subcommand(
        "baseline-ra", "Per-weight scalarized baseline: one policy per fixed weight");
    baseline->add_option("-c,--config", base_opts.config_path, "Config file")->required();
    auto* bsopt = baseline->add_option("--seed", seed_arg, "Override run seed");
    auto* boopt = baseline->add_option("--out-dir", out_dir_arg, "Override output directory");

    std::uint64_t verify_seed = 20240817;
    auto* verify = app.add_subcommand("verify", "Gradient and contraction property checks");
    verify->add_option("--seed", verify_seed, "Base seed for the random instances");

    std::string export_in, export_out = "front_filtered.csv";
    auto* fexport = app.add_subcommand("front-export",
                                       "Dominance-filter a front CSV and report metrics");
    fexport->add_option("--in", export_in, "Input front CSV")->required();
    fexport->add_option("--out", export_out, "Output CSV path");
    fexport->add_option("--ref", ref_text, "Reference point for the metrics");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            if (*wopt) train_opts.workers = workers_arg;
            if (*sopt) train_opts.seed = seed_arg;
            if (*oopt) train_opts.out_dir = out_dir_arg;
            return cmd_train(train_opts);
        }
        if (eval->parsed()) {
            if (eval_opts.prefs_path.empty() && eval_opts.grid < 2) {
                throw std::runtime_error("need --prefs FILE or --grid N (N >= 2)");
            }
            return cmd_eval(eval_opts);
        }
        if (metrics->parsed()) return cmd_metrics(front_path, ref_text);
        if (baseline->parsed()) {
            RunConfig cfg = load_run_config(base_opts.config_path);
            cfg.algo = "ra-baseline";
            if (*bsopt) cfg.seed = seed_arg;
            if (*boopt) cfg.out_dir = out_dir_arg;
            sync_run_config(cfg);
            validate_run_config(cfg);
            const std::string started = utc_now("%Y-%m-%dT%H:%M:%SZ");
            const fs::path dir = make_run_dir(output_root(cfg.out_dir), cfg.seed);
            write_text_atomic(dir / "resolved_config.json", resolved_config_json(cfg) + "\n");
            return run_baseline(cfg, dir, started);
        }
        if (verify->parsed()) return cmd_verify(verify_seed);
        if (fexport->parsed()) return cmd_front_export(export_in, export_out, ref_text);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
