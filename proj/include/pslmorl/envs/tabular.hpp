#pragma once

#include <cstdint>
#include <vector>

#include "pslmorl/envs/common.hpp"
#include "pslmorl/rng.hpp"

namespace pslmorl {

// Small finite MOMDP given by explicit tensors; the substrate for the
// contraction and fixed-point checks.
struct TabularMOMDP {
    int state_count = 0;
    int action_count = 0;
    int m = 0;
    std::vector<std::vector<Eigen::VectorXd>> transition;  // [s][a] -> dist over s'
    std::vector<std::vector<Eigen::VectorXd>> reward;      // [s][a] -> m-vector
    Eigen::VectorXd initial;                               // start distribution

    void validate() const;
    int sample_initial(Rng& rng) const;
    int sample_next(Rng& rng, int s, int a) const;
};

// Random instance: transition rows and the start distribution are uniform on
// the simplex, rewards uniform in [0,1]^m. Same seed, same instance.
TabularMOMDP random_tabular(std::uint64_t seed, int state_count, int action_count, int m);

// Rollout adapter so the tabular MOMDP can drive the discrete-action
// trainers. States are one-hot encoded; episodes cut off at episode_limit.
class TabularEnv : public DiscreteEnv {
public:
    TabularEnv(TabularMOMDP momdp, std::uint64_t seed, int episode_limit,
               double discount = 0.95);

    Eigen::VectorXd reset() override;
    StepResult step(int action) override;
    MomdpDescriptor descriptor() const override;

    int state() const { return state_; }

private:
    Eigen::VectorXd encode(int s) const;

    TabularMOMDP momdp_;
    Rng rng_;
    int episode_limit_;
    double discount_;
    int state_ = 0;
    int timer_ = 0;
    bool started_ = false;
};

}  // namespace pslmorl
