// Acceptance suite: one checkable criterion per function, each printing a
// single [PASS]/[FAIL] line. Run with no arguments for all criteria or with a
// list of criterion numbers (e.g. "acceptance 6 7"). The exit code is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pslmorl/baseline.hpp"
#include "pslmorl/bellman.hpp"
#include "pslmorl/config.hpp"
#include "pslmorl/ddqn.hpp"
#include "pslmorl/envs/ftn.hpp"
#include "pslmorl/envs/pointnav.hpp"
#include "pslmorl/hypernet.hpp"
#include "pslmorl/pareto.hpp"
#include "pslmorl/preference.hpp"
#include "pslmorl/rng.hpp"
#include "pslmorl/td3.hpp"
#include "pslmorl/verify.hpp"

using namespace pslmorl;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 6) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

// |analytic - fd| scaled by max(1, |fd|).
double rel_err(double analytic, double fd) {
    return std::abs(analytic - fd) / std::max(1.0, std::abs(fd));
}

bool same_point_multiset(std::vector<Eigen::VectorXd> a, std::vector<Eigen::VectorXd> b) {
    auto lt = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x[i] != y[i]) return x[i] < y[i];
        }
        return false;
    };
    std::sort(a.begin(), a.end(), lt);
    std::sort(b.begin(), b.end(), lt);
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Criterion 1: every analytic gradient path matches central finite
// differences on >= 20 random instances each, in under a minute.

bool plain_mlp_fd(std::string& detail) {
    const std::vector<LayerSpec> spec{LayerSpec{3, 6, Activation::Tanh},
                                      LayerSpec{6, 2, Activation::Identity}};
    const double h = 1e-5;
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        Rng rng(derive_seed(4001, k));
        MlpParams net = MlpParams::init(spec, rng);
        Vector x = rng.normal_vector(3);
        Vector go = rng.normal_vector(2);
        MlpTape tape;
        mlp_forward(net, x, &tape);
        Gradients grads = Gradients::zeros_like(net);
        mlp_backward(net, tape, go, grads);
        FlatParams flat = flatten(net);
        Vector analytic = flatten(grads).data;
        for (Eigen::Index i = 0; i < flat.data.size(); ++i) {
            FlatParams b = flat;
            b.data[i] = flat.data[i] + h;
            double up = go.dot(mlp_forward(unflatten(b, spec), x));
            b.data[i] = flat.data[i] - h;
            double dn = go.dot(mlp_forward(unflatten(b, spec), x));
            worst = std::max(worst, rel_err(analytic[i], (up - dn) / (2 * h)));
        }
    }
    detail += " mlp=" + fmt(worst, 3);
    return worst <= 1e-4;
}

bool fused_chain_fd(std::string& detail) {
    const std::vector<LayerSpec> spec{LayerSpec{2, 4, Activation::Tanh},
                                      LayerSpec{4, 2, Activation::Identity}};
    const double h = 1e-5;
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        Rng rng(derive_seed(4002, k));
        Hypernetwork hyper =
            Hypernetwork::init(2, spec, {6}, rng, 0.2, Activation::Tanh);
        FlatParams theta1;
        theta1.data = 0.5 * rng.normal_vector(static_cast<int>(flat_size(spec)));
        theta1.shape_table = shape_table_for(spec);
        const FusionConfig fusion{0.1 + 0.8 * static_cast<double>(k) / 19.0};
        PreferenceVector w = rng.simplex_uniform(2);
        Vector x = rng.normal_vector(2);
        Vector go = rng.normal_vector(2);

        auto value = [&](const Hypernetwork& hn, const FlatParams& t1) {
            GeneratedParams gen = generate_params(hn, w);
            return go.dot(
                mlp_forward(unflatten(fuse(t1, gen.theta2, fusion), spec), x));
        };

        GeneratedParams gen = generate_params(hyper, w);
        MlpParams net = unflatten(fuse(theta1, gen.theta2, fusion), spec);
        MlpTape tape;
        mlp_forward(net, x, &tape);
        Gradients net_grads = Gradients::zeros_like(net);
        mlp_backward(net, tape, go, net_grads);
        Gradients grad_phi = Gradients::zeros_like(hyper.net);
        FlatParams g1 = backprop_fusion(hyper, flatten(net_grads), fusion, gen.tape, grad_phi);

        for (Eigen::Index i = 0; i < theta1.data.size(); ++i) {
            FlatParams tp = theta1, tm = theta1;
            tp.data[i] += h;
            tm.data[i] -= h;
            worst = std::max(
                worst, rel_err(g1.data[i], (value(hyper, tp) - value(hyper, tm)) / (2 * h)));
        }
        FlatParams hflat = flatten(hyper.net);
        Vector phi = flatten(grad_phi).data;
        for (Eigen::Index i = 0; i < hflat.data.size(); ++i) {
            Hypernetwork hp = hyper, hm = hyper;
            FlatParams fp = hflat, fm = hflat;
            fp.data[i] += h;
            fm.data[i] -= h;
            hp.net = unflatten(fp, hyper.net.spec());
            hm.net = unflatten(fm, hyper.net.spec());
            worst = std::max(
                worst, rel_err(phi[i], (value(hp, theta1) - value(hm, theta1)) / (2 * h)));
        }
    }
    detail += " fused-chain=" + fmt(worst, 3);
    return worst <= 1e-4;
}

bool criterion_1(std::string& detail) {
    const auto t0 = Clock::now();
    bool ok = plain_mlp_fd(detail);
    ok = fused_chain_fd(detail) && ok;
    for (const VerifyCheck& c : {verify_ddqn_gradients(20240817),
                                 verify_td3_critic_gradients(20240817),
                                 verify_td3_actor_gradients(20240817)}) {
        detail += " " + c.name + "=" + fmt(c.worst, 3) + (c.pass ? "" : "(FAILED)");
        ok = ok && c.pass;
    }
    const double secs = seconds_since(t0);
    detail += " time=" + fmt(secs, 3) + "s";
    return ok && secs < 60.0;
}

// ---------------------------------------------------------------------------
// Criterion 2: pareto_filter and archive insertion match O(n^2) brute force
// on 1000 random sets, exact equality.

bool criterion_2(std::string& detail) {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(52);
    const int dims[3] = {2, 3, 6};
    int checked = 0;
    for (int t = 0; t < 1000; ++t) {
        const int m = dims[t % 3];
        const int n = 1 + static_cast<int>(gen() % 200);
        auto pts = oracle::random_points(n, m, -1.0, 1.0, gen);
        if (n >= 4) {
            pts[1] = pts[0];                                            // duplicate
            pts[2] = pts[3] - Eigen::VectorXd::Constant(m, 0.5);        // dominated
        }
        auto expect = oracle::nondominated(pts);
        if (!same_point_multiset(pareto_filter(pts), expect)) {
            detail = " filter mismatch on set " + std::to_string(t);
            return false;
        }
        ParetoArchive archive;
        for (const auto& p : pts) archive.insert(ObjectivePoint{p, {}, -1});
        std::vector<Eigen::VectorXd> arch;
        for (const auto& p : archive.points()) arch.push_back(p.values);
        if (!same_point_multiset(arch, expect)) {
            detail = " archive mismatch on set " + std::to_string(t);
            return false;
        }
        ++checked;
    }
    const double secs = seconds_since(t0);
    detail += " sets=" + std::to_string(checked) + " time=" + fmt(secs, 3) + "s";
    return secs < 60.0;
}

// ---------------------------------------------------------------------------
// Criterion 3: the two exact hypervolume algorithms agree at m=2; exact
// values match 1e7-sample Monte Carlo at m in {3,6}.

bool criterion_3(std::string& detail) {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(53);
    double worst_gap = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int n = 1 + static_cast<int>(gen() % 60);
        auto pts = oracle::random_points(n, 2, -0.2, 1.0, gen);
        Eigen::VectorXd ref = Eigen::VectorXd::Zero(2);
        worst_gap = std::max(worst_gap, std::abs(hypervolume_sweep_2d(pts, ref) -
                                                 hypervolume_recursive(pts, ref)));
    }
    detail += " sweep-vs-recursive=" + fmt(worst_gap, 3);
    if (worst_gap > 1e-9) return false;

    double worst_rel = 0.0;
    for (int t = 0; t < 20; ++t) {
        const int m = (t % 2 == 0) ? 3 : 6;
        const int n = 1 + static_cast<int>(gen() % 8);
        auto pts = oracle::random_points(n, m, 0.2, 1.0, gen);
        Eigen::VectorXd ref = Eigen::VectorXd::Zero(m);
        const double exact = hypervolume(pts, ref);
        const double mc = oracle::mc_hypervolume(pts, ref, 10000000, 5300 + t);
        worst_rel = std::max(worst_rel, std::abs(exact - mc) / exact);
    }
    detail += " mc-rel=" + fmt(worst_rel, 3);
    const double secs = seconds_since(t0);
    detail += " time=" + fmt(secs, 3) + "s";
    return worst_rel <= 0.01 && secs < 300.0;
}

// ---------------------------------------------------------------------------
// Criterion 4: sparsity matches its direct formula; single-point fronts
// report N/A.

bool criterion_4(std::string& detail) {
    std::mt19937_64 gen(54);
    double worst = 0.0;
    for (int t = 0; t < 300; ++t) {
        const int n = 2 + static_cast<int>(gen() % 40);
        const int m = 2 + static_cast<int>(gen() % 5);
        auto pts = oracle::random_points(n, m, -3.0, 3.0, gen);
        auto got = sparsity(pts);
        if (!got) {
            detail = " unexpected N/A on a multi-point front";
            return false;
        }
        const double want = oracle::sparsity_direct(pts);
        worst = std::max(worst, std::abs(*got - want) / std::max(1.0, std::abs(want)));
    }
    detail += " rel=" + fmt(worst, 3);
    auto single = sparsity(std::vector<Eigen::VectorXd>{Eigen::VectorXd::Ones(3)});
    detail += std::string(" single-point=") + (single ? "value" : "N/A");
    return worst <= 1e-12 && !single;
}

// ---------------------------------------------------------------------------
// Criterion 5: contraction modulus <= gamma on random MOMDPs; fixed-point
// iteration converges from distinct starts with geometric residual decay.

bool criterion_5(std::string& detail) {
    const auto t0 = Clock::now();
    const double gamma = 0.9;
    Rng rng(55);
    double worst_ratio = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const int S = 2 + rng.uniform_int(9);   // [2, 10]
        const int A = 2 + rng.uniform_int(3);   // [2, 4]
        TabularMOMDP mdp = random_tabular(derive_seed(900, inst), S, A, 2);
        PreferenceGrid grid = make_preference_grid(2, 21);
        ContractionReport rep = check_contraction(mdp, grid, 100, gamma, rng);
        worst_ratio = std::max(worst_ratio, rep.max_ratio);
        if (!rep.pass || rep.max_ratio > gamma + 1e-9) {
            detail = " instance " + std::to_string(inst) + " ratio " + fmt(rep.max_ratio);
            return false;
        }
    }
    detail += " worst-ratio=" + fmt(worst_ratio);

    const double tol = 1e-10;
    double worst_gap = 0.0;
    bool decay_ok = true;
    for (int inst = 0; inst < 3; ++inst) {
        TabularMOMDP mdp = random_tabular(derive_seed(901, inst), 6, 3, 2);
        PreferenceGrid grid = make_preference_grid(2, 21);
        FixedPointResult a = fixed_point_iterate(mdp, grid, gamma, tol, 100000);
        TabularQ start = TabularQ::random(rng, 6, 3, 21, 2, 10.0);
        FixedPointResult b = fixed_point_iterate(mdp, grid, gamma, tol, 100000, &start);
        worst_gap = std::max(worst_gap, metric_d(a.q, b.q, grid));

        TabularQ q = TabularQ::random(rng, 6, 3, 21, 2, 5.0);
        double prev = -1.0;
        for (int it = 0; it < 60; ++it) {
            TabularQ next = bellman_operator(q, mdp, grid, gamma);
            const double resid = metric_d(next, q, grid);
            if (prev > 1e-13 && resid > gamma * prev + 1e-12) decay_ok = false;
            prev = resid;
            q = next;
        }
    }
    detail += " start-gap=" + fmt(worst_gap, 3) +
              " bound=" + fmt(2.0 * tol / (1.0 - gamma), 3) +
              std::string(decay_ok ? " decay=geometric" : " decay=VIOLATED");
    const double secs = seconds_since(t0);
    detail += " time=" + fmt(secs, 3) + "s";
    return worst_gap < 2.0 * tol / (1.0 - gamma) && decay_ok && secs < 300.0;
}

// ---------------------------------------------------------------------------
// Criteria 6 and 7 share the same nine training runs (3 seeds x 3 parameter
// compositions) on the seeded depth-5 tree.

struct FtnOutcome {
    double hv = 0.0;
    double coverage = 0.0;  // fraction of 66 lattice preferences served well
};

DdqnConfig ftn_desk_config(ComposeMode mode, std::uint64_t seed) {
    DdqnConfig cfg;
    cfg.qnet.hidden = {32, 32};
    cfg.hyper_hidden = {32, 16};
    cfg.hyper_out_scale = 0.01;
    cfg.total_steps = 100000;
    cfg.batch_size = 16;
    cfg.her_extra = 3;
    cfg.gamma = 0.99;
    cfg.tau = 0.005;
    cfg.learning_rate = 1e-3;
    cfg.compose = mode;
    cfg.fusion = FusionConfig{0.05};
    cfg.epsilon = EpsilonSchedule{1.0, 0.05, 0};
    cfg.epsilon_decay_frac = 0.3;
    cfg.learn_start = 500;
    cfg.env_steps_per_update = 8;
    cfg.buffer_capacity = 20000;
    cfg.workers = 10;
    cfg.eval_interval = 5000;
    cfg.eval_grid = 66;
    cfg.eval_episodes = 1;
    cfg.seed = seed;
    return cfg;
}

FtnOutcome run_ftn(const Matrix& leaves, ComposeMode mode, std::uint64_t seed) {
    static std::map<std::tuple<int, std::uint64_t, double>, FtnOutcome> cache;
    const auto key = std::make_tuple(static_cast<int>(mode), seed, leaves.sum());
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    DdqnConfig cfg = ftn_desk_config(mode, seed);
    auto factory = [&leaves](std::uint64_t) {
        return std::unique_ptr<DiscreteEnv>(std::make_unique<FtnEnv>(5, leaves));
    };
    DdqnResult res = train_ddqn(cfg, factory);

    FtnOutcome out;
    out.hv = hypervolume(res.archive.points(), Eigen::VectorXd::Zero(kFtnObjectives));

    FtnEnv eval_env(5, leaves);
    const auto grid = simplex_grid(kFtnObjectives, 66);
    int served = 0;
    for (const auto& w : grid) {
        double best_leaf = -1.0;
        for (Eigen::Index i = 0; i < leaves.rows(); ++i) {
            best_leaf = std::max(best_leaf, w.dot(leaves.row(i).transpose()));
        }
        Eigen::VectorXd J = evaluate_policy(res.hyper, res.theta1, cfg.compose, cfg.fusion,
                                            cfg.interp, w, eval_env, 1);
        if (w.dot(J) >= 0.9 * best_leaf - 1e-12) ++served;
    }
    out.coverage = static_cast<double>(served) / static_cast<double>(grid.size());
    cache[key] = out;
    return out;
}

bool criterion_6(std::string& detail) {
    const Matrix leaves = gen_leaf_rewards(7, 5);
    FtnEnv env(5, leaves);
    const double oracle_hv =
        hypervolume(env.oracle_front(), Eigen::VectorXd::Zero(kFtnObjectives));
    detail += " oracle-hv=" + fmt(oracle_hv, 8);

    int hv_ok = 0, cov_ok = 0;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        FtnOutcome out = run_ftn(leaves, ComposeMode::Fusion, seed);
        detail += " s" + std::to_string(seed) + "=[hv " + fmt(out.hv / oracle_hv, 4) +
                  "x, cov " + fmt(out.coverage, 3) + "]";
        if (out.hv >= 0.95 * oracle_hv) ++hv_ok;
        if (out.coverage >= 0.80) ++cov_ok;
    }
    bool ok = hv_ok >= 2 && cov_ok >= 2;

    // The absolute published value is only checkable against the canonical
    // benchmark reward table, supplied out of band.
    const char* canonical = std::getenv("PSLMORL_FTN_REWARD_FILE");
    if (canonical == nullptr) {
        detail += " canonical-rewards=absent(sub-check skipped)";
    } else {
        Matrix canon = load_leaf_rewards(canonical);
        FtnEnv canon_env(5, canon);
        const double canon_hv =
            hypervolume(canon_env.oracle_front(), Eigen::VectorXd::Zero(kFtnObjectives));
        detail += " canonical-oracle-hv=" + fmt(canon_hv, 8);
        if (std::abs(canon_hv - 6920.58) > 0.01) {
            detail += "(outside 6920.58 +/- 0.01)";
            ok = false;
        }
        FtnOutcome out = run_ftn(canon, ComposeMode::Fusion, 1);
        detail += " canonical-trained=" + fmt(out.hv / canon_hv, 4) + "x";
        if (out.hv < 0.99 * canon_hv) ok = false;
    }
    return ok;
}

bool criterion_7(std::string& detail) {
    const Matrix leaves = gen_leaf_rewards(7, 5);
    std::map<ComposeMode, double> mean_hv;
    for (ComposeMode mode :
         {ComposeMode::Fusion, ComposeMode::Generated, ComposeMode::Additive}) {
        double total = 0.0;
        for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
            total += run_ftn(leaves, mode, seed).hv;
        }
        mean_hv[mode] = total / 3.0;
        detail += " " + to_string(mode) + "=" + fmt(mean_hv[mode], 8);
    }
    return mean_hv[ComposeMode::Fusion] >= mean_hv[ComposeMode::Generated] &&
           mean_hv[ComposeMode::Fusion] >= mean_hv[ComposeMode::Additive];
}

// ---------------------------------------------------------------------------
// Criterion 8: the TD3 instantiation produces a spread of mutually
// nondominated trade-offs on the point-mass task.

bool criterion_8(std::string& detail) {
    Td3Config cfg;
    cfg.actor.hidden = {32, 32};
    cfg.critic.hidden = {64, 64};
    cfg.hyper_hidden = {32, 16};
    cfg.hyper_out_scale = 0.01;
    cfg.total_steps = 200000;
    cfg.batch_size = 32;
    cfg.her_extra = 2;
    cfg.gamma = 0.99;
    cfg.tau = 0.005;
    cfg.actor_lr = 3e-4;
    cfg.critic_lr = 3e-4;
    cfg.fusion = FusionConfig{0.05};
    cfg.policy_delay = 10;
    cfg.exploration_noise = 0.1;
    cfg.smoothing_noise = 0.2;
    cfg.noise_clip = 0.5;
    cfg.c_angle = 10.0;
    cfg.learn_start = 1000;
    cfg.env_steps_per_update = 4;
    cfg.buffer_capacity = 100000;
    cfg.workers = 10;
    cfg.eval_interval = 10000;
    cfg.eval_grid = 11;
    cfg.eval_episodes = 1;
    cfg.ref_point = Eigen::VectorXd::Zero(2);
    cfg.seed = 1;

    auto factory = [](std::uint64_t) {
        PointNavEnv::Params p;
        return std::unique_ptr<ContinuousEnv>(std::make_unique<PointNavEnv>(p));
    };
    const auto t0 = Clock::now();
    Td3Result res = train_td3(cfg, factory);
    detail += " time=" + fmt(seconds_since(t0), 3) + "s points=" +
              std::to_string(res.archive.size());
    if (res.archive.size() < 5) return false;

    std::vector<Eigen::VectorXd> values;
    for (const auto& p : res.archive.points()) values.push_back(p.values);
    if (oracle::nondominated(values).size() != values.size()) {
        detail += " archive-not-mutually-nondominated";
        return false;
    }
    std::size_t fast = 0, thrifty = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i][0] > values[fast][0]) fast = i;
        if (values[i][1] > values[thrifty][1]) thrifty = i;
    }
    detail += " speed-max=(" + fmt(values[fast][0], 4) + "," + fmt(values[fast][1], 4) +
              ") efficiency-max=(" + fmt(values[thrifty][0], 4) + "," +
              fmt(values[thrifty][1], 4) + ")";
    return values[fast][0] > values[thrifty][0] && values[thrifty][1] > values[fast][1];
}

// ---------------------------------------------------------------------------
// Criterion 9: fusion alpha gates the gradient paths exactly, across whole
// training runs.

bool criterion_9(std::string& detail) {
    const Matrix leaves = gen_leaf_rewards(7, 3);
    auto ftn_factory = [&leaves](std::uint64_t) {
        return std::unique_ptr<DiscreteEnv>(std::make_unique<FtnEnv>(3, leaves));
    };

    auto ddqn_run = [&](double alpha, double lr) {
        DdqnConfig cfg;
        cfg.qnet.hidden = {16};
        cfg.hyper_hidden = {16};
        cfg.total_steps = 3000;
        cfg.batch_size = 8;
        cfg.learn_start = 100;
        cfg.buffer_capacity = 4000;
        cfg.env_steps_per_update = 4;
        cfg.workers = 4;
        cfg.eval_interval = 250;
        cfg.eval_grid = 3;
        cfg.fusion = FusionConfig{alpha};
        cfg.learning_rate = lr;
        cfg.seed = 17;
        return train_ddqn(cfg, ftn_factory);
    };

    // alpha = 0: every logged hypernetwork gradient norm is exactly zero, and
    // the hypernetwork parameters end identical under different learning
    // rates (no update ever reached them).
    DdqnResult a0 = ddqn_run(0.0, 1e-3);
    DdqnResult a0_fast = ddqn_run(0.0, 1e-2);
    double worst_hyp = 0.0;
    for (const auto& rec : a0.log) worst_hyp = std::max(worst_hyp, rec.grad_norm_hyper);
    const bool hyper_frozen =
        flatten(a0.hyper.net).data == flatten(a0_fast.hyper.net).data;
    detail += " ddqn-alpha0: max-hyper-grad=" + fmt(worst_hyp) +
              (hyper_frozen ? " params-frozen" : " PARAMS-MOVED");

    // alpha = 1: the base policy never receives a gradient.
    DdqnResult a1 = ddqn_run(1.0, 1e-3);
    DdqnResult a1_fast = ddqn_run(1.0, 1e-2);
    double worst_pol = 0.0;
    for (const auto& rec : a1.log) worst_pol = std::max(worst_pol, rec.grad_norm_policy);
    const bool policy_frozen = flatten(a1.theta1).data == flatten(a1_fast.theta1).data;
    detail += " ddqn-alpha1: max-policy-grad=" + fmt(worst_pol) +
              (policy_frozen ? " params-frozen" : " PARAMS-MOVED");

    // The same gating on the TD3 actor path.
    auto td3_run = [](double alpha) {
        Td3Config cfg;
        cfg.actor.hidden = {8};
        cfg.critic.hidden = {8};
        cfg.hyper_hidden = {8};
        cfg.total_steps = 1200;
        cfg.batch_size = 8;
        cfg.learn_start = 100;
        cfg.policy_delay = 2;
        cfg.env_steps_per_update = 4;
        cfg.workers = 2;
        cfg.eval_interval = 200;
        cfg.eval_grid = 3;
        cfg.fusion = FusionConfig{alpha};
        cfg.seed = 23;
        auto factory = [](std::uint64_t) {
            PointNavEnv::Params p;
            p.episode_limit = 25;
            return std::unique_ptr<ContinuousEnv>(std::make_unique<PointNavEnv>(p));
        };
        return train_td3(cfg, factory);
    };
    Td3Result t0run = td3_run(0.0);
    double td3_hyp = 0.0;
    for (const auto& rec : t0run.log) td3_hyp = std::max(td3_hyp, rec.grad_norm_hyper);
    Td3Result t1run = td3_run(1.0);
    double td3_pol = 0.0;
    for (const auto& rec : t1run.log) td3_pol = std::max(td3_pol, rec.grad_norm_policy);
    detail += " td3-alpha0: max-hyper-grad=" + fmt(td3_hyp) +
              " td3-alpha1: max-policy-grad=" + fmt(td3_pol);
    if (t0run.actor_updates < 1 || t1run.actor_updates < 1) {
        detail += " (no actor updates ran)";
        return false;
    }

    // Per-update exactness across both trainers, from the verification suite.
    VerifyCheck gate = verify_zero_alpha_gradient(20240817);
    detail += " per-update-worst=" + fmt(gate.worst);

    return worst_hyp == 0.0 && worst_pol == 0.0 && td3_hyp == 0.0 && td3_pol == 0.0 &&
           hyper_frozen && policy_frozen && gate.pass;
}

// ---------------------------------------------------------------------------
// Criterion 10: identical config and seed give byte-identical front CSVs in
// single-threaded mode. Uses the installed command-line binary when
// PSLMORL_CLI names it, otherwise exercises the library path in process.

std::string run_cli_train(const std::string& cli, const fs::path& cfg_path,
                          const fs::path& out) {
    const std::string cmd = cli + " train --config " + cfg_path.string() + " --out-dir " +
                            out.string() + " --deterministic 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) throw std::runtime_error("popen failed");
    char buf[4096];
    std::string output;
    while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) output.append(buf, n);
    const int status = pclose(pipe);
    if (status != 0) throw std::runtime_error("train command failed: " + output);
    for (const auto& entry : fs::recursive_directory_iterator(out)) {
        if (entry.path().filename() == "front.csv") {
            std::ifstream is(entry.path());
            std::stringstream ss;
            ss << is.rdbuf();
            return ss.str();
        }
    }
    throw std::runtime_error("no front.csv under " + out.string());
}

bool criterion_10(std::string& detail) {
    const char* cli = std::getenv("PSLMORL_CLI");
    if (cli != nullptr) {
        const fs::path root = fs::temp_directory_path() / "pslmorl_accept_det";
        fs::remove_all(root);
        fs::create_directories(root);
        const fs::path cfg_path = root / "config.json";
        {
            std::ofstream os(cfg_path);
            os << R"({
  "algo": "psl-ddqn",
  "seed": 11,
  "workers": 4,
  "env": {"name": "ftn", "depth": 2, "seed": 5},
  "algorithm": {"total_steps": 2000, "batch_size": 8, "learn_start": 64,
                 "buffer_capacity": 2000, "eval_interval": 500, "eval_grid": 6,
                 "policy_hidden": [16], "hyper_hidden": [8]}
})";
        }
        const std::string a = run_cli_train(cli, cfg_path, root / "a");
        const std::string b = run_cli_train(cli, cfg_path, root / "b");
        detail += " via-cli bytes=" + std::to_string(a.size());
        fs::remove_all(root);
        return !a.empty() && a == b;
    }

    // In-process fallback: same training twice, serialized fronts compared.
    const Matrix leaves = gen_leaf_rewards(5, 2);
    auto factory = [&leaves](std::uint64_t) {
        return std::unique_ptr<DiscreteEnv>(std::make_unique<FtnEnv>(2, leaves));
    };
    auto run_once = [&] {
        DdqnConfig cfg;
        cfg.qnet.hidden = {16};
        cfg.hyper_hidden = {8};
        cfg.total_steps = 2000;
        cfg.batch_size = 8;
        cfg.learn_start = 64;
        cfg.buffer_capacity = 2000;
        cfg.env_steps_per_update = 4;
        cfg.workers = 4;
        cfg.eval_interval = 500;
        cfg.eval_grid = 6;
        cfg.seed = 11;
        DdqnResult res = train_ddqn(cfg, factory);
        std::ostringstream os;
        write_front_csv(os, res.archive.points(), kFtnObjectives);
        return os.str();
    };
    const std::string a = run_once();
    const std::string b = run_once();
    detail += " in-process bytes=" + std::to_string(a.size());
    return !a.empty() && a == b;
}

struct Criterion {
    int id;
    const char* summary;
    std::function<bool(std::string&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "gradient paths match finite differences", criterion_1},
        {2, "pareto filter and archive match brute force", criterion_2},
        {3, "hypervolume algorithms cross-validate", criterion_3},
        {4, "sparsity matches the direct formula", criterion_4},
        {5, "scalarized backup contracts and converges", criterion_5},
        {6, "tree benchmark learns near-oracle fronts", criterion_6},
        {7, "fusion beats its ablations on mean hypervolume", criterion_7},
        {8, "td3 covers the point-mass trade-off curve", criterion_8},
        {9, "fusion alpha gates gradients exactly", criterion_9},
        {10, "training is deterministic per seed", criterion_10},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
            continue;
        }
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail += std::string(" exception: ") + e.what();
        }
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": " << c.summary
                  << " —" << detail << "\n";
        std::cout.flush();
        if (!ok) ++failures;
    }
    return failures;
}
