#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>

#include <Eigen/Core>

namespace pslmorl {

// Static description of a multi-objective MDP. Exactly one of
// state_dim/state_count and one of action_dim/action_count is nonzero,
// depending on whether the corresponding space is continuous or discrete.
struct MomdpDescriptor {
    int m = 0;
    int state_dim = 0;
    int state_count = 0;
    int action_dim = 0;
    int action_count = 0;
    Eigen::VectorXd discount;  // per-objective; all entries equal in practice
    int episode_limit = 0;

    void validate() const {
        if (m < 2) throw std::invalid_argument("descriptor: m must be >= 2");
        if (discount.size() != m) {
            throw std::invalid_argument("descriptor: discount size != m");
        }
        for (int i = 0; i < m; ++i) {
            if (!(discount[i] >= 0.0 && discount[i] < 1.0)) {
                throw std::invalid_argument("descriptor: discount outside [0,1)");
            }
        }
        if ((state_dim > 0) == (state_count > 0)) {
            throw std::invalid_argument("descriptor: need exactly one state space kind");
        }
        if ((action_dim > 0) == (action_count > 0)) {
            throw std::invalid_argument("descriptor: need exactly one action space kind");
        }
        if (episode_limit < 1) {
            throw std::invalid_argument("descriptor: episode_limit must be >= 1");
        }
    }
};

struct StepResult {
    Eigen::VectorXd state;
    Eigen::VectorXd reward;
    bool done = false;
};

// One stored interaction. action_index is used by discrete-action
// environments, action by continuous ones; the unused field stays empty/-1.
struct Transition {
    Eigen::VectorXd state;
    int action_index = -1;
    Eigen::VectorXd action;
    Eigen::VectorXd reward;
    Eigen::VectorXd next_state;
    bool done = false;
    Eigen::VectorXd preference;
};

class DiscreteEnv {
public:
    virtual ~DiscreteEnv() = default;
    virtual Eigen::VectorXd reset() = 0;
    virtual StepResult step(int action) = 0;
    virtual MomdpDescriptor descriptor() const = 0;
};

class ContinuousEnv {
public:
    virtual ~ContinuousEnv() = default;
    virtual Eigen::VectorXd reset() = 0;
    virtual StepResult step(const Eigen::VectorXd& action) = 0;
    virtual MomdpDescriptor descriptor() const = 0;
};

using DiscreteEnvFactory = std::function<std::unique_ptr<DiscreteEnv>(std::uint64_t seed)>;
using ContinuousEnvFactory =
    std::function<std::unique_ptr<ContinuousEnv>(std::uint64_t seed)>;

}  // namespace pslmorl
