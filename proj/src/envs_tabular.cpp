#include "pslmorl/envs/tabular.hpp"

#include <cmath>
#include <stdexcept>

namespace pslmorl {

namespace {

constexpr double kDistTol = 1e-9;

int sample_categorical(Rng& rng, const Eigen::VectorXd& probs) {
    double u = rng.uniform();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);  // guard against rounding
}

}  // namespace

void TabularMOMDP::validate() const {
    if (state_count < 1 || state_count > 32) {
        throw std::invalid_argument("state_count must be in [1,32]");
    }
    if (action_count < 1 || action_count > 8) {
        throw std::invalid_argument("action_count must be in [1,8]");
    }
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    auto check_dist = [&](const Eigen::VectorXd& p, const char* what) {
        if (p.size() != state_count) {
            throw std::invalid_argument(std::string(what) + ": wrong length");
        }
        if ((p.array() < 0.0).any()) {
            throw std::invalid_argument(std::string(what) + ": negative probability");
        }
        if (std::abs(p.sum() - 1.0) > kDistTol) {
            throw std::invalid_argument(std::string(what) + ": does not sum to 1");
        }
    };
    if (static_cast<int>(transition.size()) != state_count ||
        static_cast<int>(reward.size()) != state_count) {
        throw std::invalid_argument("tensor outer dimension != state_count");
    }
    for (int s = 0; s < state_count; ++s) {
        if (static_cast<int>(transition[s].size()) != action_count ||
            static_cast<int>(reward[s].size()) != action_count) {
            throw std::invalid_argument("tensor inner dimension != action_count");
        }
        for (int a = 0; a < action_count; ++a) {
            check_dist(transition[s][a], "transition row");
            if (reward[s][a].size() != m || !reward[s][a].allFinite()) {
                throw std::invalid_argument("reward vector invalid");
            }
        }
    }
    check_dist(initial, "initial distribution");
}

int TabularMOMDP::sample_initial(Rng& rng) const { return sample_categorical(rng, initial); }

int TabularMOMDP::sample_next(Rng& rng, int s, int a) const {
    return sample_categorical(rng, transition[s][a]);
}

TabularMOMDP random_tabular(std::uint64_t seed, int state_count, int action_count, int m) {
    Rng rng(seed);
    TabularMOMDP out;
    out.state_count = state_count;
    out.action_count = action_count;
    out.m = m;
    out.transition.resize(state_count);
    out.reward.resize(state_count);
    for (int s = 0; s < state_count; ++s) {
        out.transition[s].resize(action_count);
        out.reward[s].resize(action_count);
        for (int a = 0; a < action_count; ++a) {
            out.transition[s][a] = rng.simplex_uniform(state_count);
            Eigen::VectorXd r(m);
            for (int i = 0; i < m; ++i) r[i] = rng.uniform();
            out.reward[s][a] = r;
        }
    }
    out.initial = rng.simplex_uniform(state_count);
    out.validate();
    return out;
}

TabularEnv::TabularEnv(TabularMOMDP momdp, std::uint64_t seed, int episode_limit,
                       double discount)
    : momdp_(std::move(momdp)), rng_(seed), episode_limit_(episode_limit),
      discount_(discount) {
    momdp_.validate();
    if (episode_limit_ < 1) throw std::invalid_argument("episode_limit must be >= 1");
    if (!(discount_ >= 0.0 && discount_ < 1.0)) {
        throw std::invalid_argument("discount must be in [0,1)");
    }
}

Eigen::VectorXd TabularEnv::encode(int s) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(momdp_.state_count);
    v[s] = 1.0;
    return v;
}

Eigen::VectorXd TabularEnv::reset() {
    state_ = momdp_.sample_initial(rng_);
    timer_ = 0;
    started_ = true;
    return encode(state_);
}

StepResult TabularEnv::step(int action) {
    if (!started_) throw std::logic_error("step before reset");
    if (timer_ >= episode_limit_) throw std::logic_error("step after episode end");
    if (action < 0 || action >= momdp_.action_count) {
        throw std::invalid_argument("action out of range");
    }
    StepResult res;
    res.reward = momdp_.reward[state_][action];
    state_ = momdp_.sample_next(rng_, state_, action);
    ++timer_;
    res.state = encode(state_);
    res.done = timer_ >= episode_limit_;
    return res;
}

MomdpDescriptor TabularEnv::descriptor() const {
    MomdpDescriptor d;
    d.m = momdp_.m;
    d.state_dim = momdp_.state_count;
    d.action_count = momdp_.action_count;
    d.discount = Eigen::VectorXd::Constant(momdp_.m, discount_);
    d.episode_limit = episode_limit_;
    return d;
}

}  // namespace pslmorl
