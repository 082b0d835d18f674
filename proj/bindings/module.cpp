#include <optional>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pslmorl/baseline.hpp"
#include "pslmorl/config.hpp"
#include "pslmorl/envs/ftn.hpp"
#include "pslmorl/envs/pointnav.hpp"
#include "pslmorl/verify.hpp"

namespace py = pybind11;
using namespace pslmorl;

namespace {

Matrix stack_rows(const std::vector<Eigen::VectorXd>& rows) {
    if (rows.empty()) return Matrix(0, 0);
    Matrix out(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) = rows[i].transpose();
    return out;
}

py::dict front_dict(const std::vector<ObjectivePoint>& points, const Eigen::VectorXd& ref) {
    std::vector<Eigen::VectorXd> values, prefs;
    for (const auto& p : points) {
        values.push_back(p.values);
        prefs.push_back(p.preference);
    }
    py::dict out;
    out["front"] = stack_rows(values);
    out["preferences"] = stack_rows(prefs);
    out["hypervolume"] = hypervolume(points, ref);
    const auto sp = sparsity(points);
    out["sparsity"] = sp.has_value() ? py::cast(*sp) : py::none();
    return out;
}

RunConfig load_for_run(const std::string& path, std::optional<std::uint64_t> seed,
                       bool deterministic) {
    RunConfig cfg = load_run_config(path);
    if (seed.has_value()) cfg.seed = *seed;
    sync_run_config(cfg);
    const bool threaded = !deterministic && cfg.workers > 1;
    cfg.ddqn.threaded = threaded;
    cfg.td3.threaded = threaded;
    validate_run_config(cfg);
    return cfg;
}

py::dict run_training(const std::string& config_path, std::optional<std::uint64_t> seed,
                      bool deterministic) {
    const RunConfig cfg = load_for_run(config_path, seed, deterministic);
    if (cfg.algo == "ra-baseline") {
        const auto factory = make_discrete_env_factory(cfg.env);
        const RadialBaselineResult res =
            train_radial_baseline(cfg.baseline, factory, cfg.seed);
        const Eigen::Index m = res.returns.front().values.size();
        py::dict out = front_dict(res.front, Eigen::VectorXd::Zero(m));
        out["env_steps"] = cfg.baseline.steps_per_weight * res.returns.size();
        return out;
    }
    std::vector<ObjectivePoint> points;
    Eigen::VectorXd ref;
    long env_steps = 0;
    if (cfg.algo == "psl-td3") {
        const Td3Result res = train_td3(cfg.td3, make_continuous_env_factory(cfg.env));
        points = res.archive.points();
        ref = cfg.td3.ref_point;
        env_steps = res.env_steps;
    } else {
        const DdqnResult res = train_ddqn(cfg.ddqn, make_discrete_env_factory(cfg.env));
        points = res.archive.points();
        ref = cfg.ddqn.ref_point;
        env_steps = res.env_steps;
    }
    const Eigen::Index m = points.front().values.size();
    if (ref.size() != m) ref = Eigen::VectorXd::Zero(m);
    py::dict out = front_dict(points, ref);
    out["env_steps"] = env_steps;
    return out;
}

py::dict run_checkpoint_eval(const std::string& path, int grid, int episodes,
                             std::uint64_t seed) {
    const Checkpoint ck = load_checkpoint(path);
    const MlpParams theta1 = checkpoint_policy(ck);
    const Hypernetwork hyper = checkpoint_hypernetwork(ck);
    const ComposeMode compose = compose_mode_from_string(ck.compose);
    const FusionConfig fusion{ck.fusion_alpha};

    std::vector<ObjectivePoint> points;
    if (ck.algo == "psl-td3") {
        auto env = make_continuous_env_factory(ck.env)(derive_seed(seed, 101));
        for (const auto& w : simplex_grid(env->descriptor().m, grid)) {
            points.push_back({evaluate_policy_continuous(hyper, theta1, compose, fusion, w,
                                                         *env, episodes),
                              w, ck.step});
        }
    } else {
        auto env = make_discrete_env_factory(ck.env)(derive_seed(seed, 101));
        for (const auto& w : simplex_grid(env->descriptor().m, grid)) {
            points.push_back({evaluate_policy(hyper, theta1, compose, fusion,
                                              Interpolator::identity(), w, *env, episodes),
                              w, ck.step});
        }
    }
    return front_dict(points, Eigen::VectorXd::Zero(points.front().values.size()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Preference-conditioned multi-objective RL core";
    m.attr("__version__") = "0.1.0";

    // Preference-space operations.
    m.def("simplex_grid", &simplex_grid, py::arg("m"), py::arg("n"),
          "Deterministic evaluation grid of n preferences on the (m-1)-simplex");
    m.def(
        "sample_preferences",
        [](int m, int count, std::uint64_t seed) {
            Rng rng(seed);
            std::vector<PreferenceVector> out;
            out.reserve(count);
            for (int i = 0; i < count; ++i) out.push_back(sample_preference(rng, m));
            return out;
        },
        py::arg("m"), py::arg("count"), py::arg("seed") = 0,
        "Uniform preference samples (Dirichlet(1,...,1))");
    m.def("scalarize", &scalarize, py::arg("w"), py::arg("values"));
    m.def("cosine_similarity", &cosine_similarity, py::arg("a"), py::arg("b"));
    m.def("directional_angle", &directional_angle, py::arg("w"), py::arg("q"));

    // Pareto-front operations.
    m.def(
        "pareto_filter",
        [](const std::vector<Eigen::VectorXd>& pts) { return pareto_filter(pts); },
        py::arg("points"), "Nondominated subset (duplicates collapsed)");
    m.def(
        "hypervolume",
        [](const std::vector<Eigen::VectorXd>& pts, const Eigen::VectorXd& ref) {
            return hypervolume(pts, ref);
        },
        py::arg("points"), py::arg("ref"));
    m.def(
        "sparsity",
        [](const std::vector<Eigen::VectorXd>& pts) -> std::optional<double> {
            return sparsity(pts);
        },
        py::arg("points"), "Mean squared front gap; None for single-point fronts");

    // Environments.
    py::class_<FtnEnv>(m, "FtnEnv",
                       "Binary fruit-tree navigation with 6-objective leaf rewards")
        .def(py::init([](int depth, std::uint64_t seed, bool onehot_level) {
                 return FtnEnv(depth, gen_leaf_rewards(seed, depth), onehot_level);
             }),
             py::arg("depth"), py::arg("seed") = 7, py::arg("onehot_level") = false)
        .def(py::init([](int depth, const Matrix& leaves, bool onehot_level) {
                 return FtnEnv(depth, leaves, onehot_level);
             }),
             py::arg("depth"), py::arg("leaf_rewards"), py::arg("onehot_level") = false)
        .def("reset", &FtnEnv::reset)
        .def(
            "step",
            [](FtnEnv& e, int action) {
                StepResult r = e.step(action);
                return py::make_tuple(r.state, r.reward, r.done);
            },
            py::arg("action"), "Returns (state, reward, done)")
        .def("oracle_front", &FtnEnv::oracle_front)
        .def_property_readonly("leaf_rewards", &FtnEnv::leaf_rewards)
        .def_property_readonly("depth", &FtnEnv::depth)
        .def_property_readonly("m", [](const FtnEnv& e) { return e.descriptor().m; })
        .def_property_readonly("action_count",
                               [](const FtnEnv& e) { return e.descriptor().action_count; });

    py::class_<PointNavEnv>(m, "PointNavEnv",
                            "Planar point mass: speed vs control-effort objectives")
        .def(py::init([](double dt, double damping, int episode_limit) {
                 return PointNavEnv({dt, damping, episode_limit});
             }),
             py::arg("dt") = 0.1, py::arg("damping") = 0.1, py::arg("episode_limit") = 50)
        .def("reset", &PointNavEnv::reset)
        .def(
            "step",
            [](PointNavEnv& e, const Eigen::VectorXd& action) {
                StepResult r = e.step(action);
                return py::make_tuple(r.state, r.reward, r.done);
            },
            py::arg("action"), "Returns (state, reward, done)")
        .def_property_readonly("m", [](const PointNavEnv& e) { return e.descriptor().m; })
        .def_property_readonly("action_dim",
                               [](const PointNavEnv& e) { return e.descriptor().action_dim; });

    // Entry points.
    m.def("train", &run_training, py::arg("config_path"),
          py::arg("seed") = std::nullopt, py::arg("deterministic") = true,
          "Train per the config file; returns front, preferences, and metrics");
    m.def("evaluate_checkpoint", &run_checkpoint_eval, py::arg("checkpoint_path"),
          py::arg("grid") = 11, py::arg("episodes") = 1, py::arg("seed") = 0,
          "Evaluate a saved checkpoint on a preference grid");
    m.def(
        "verification_report",
        [](std::uint64_t seed) { return verification_report_json(run_verification(seed)); },
        py::arg("seed") = 20240817,
        "Gradient and contraction property checks as a JSON string");
}
