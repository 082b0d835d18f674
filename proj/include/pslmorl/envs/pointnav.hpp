#pragma once

#include "pslmorl/envs/common.hpp"

namespace pslmorl {

// Two-objective continuous-control task: a point mass on the plane driven by
// a bounded 2-d force. Objective 1 rewards forward (x) velocity, objective 2
// rewards low control effort, so fast policies and efficient policies trade
// off against each other.
//
// Dynamics per step (action clamped to [-1,1]^2):
//   velocity <- (1 - damping) * velocity + dt * action
//   position <- position + dt * velocity
//   r = (velocity_x, 1 - |action|^2 / 2)
// With damping > 0 the velocity is bounded by dt/damping.
class PointNavEnv : public ContinuousEnv {
public:
    struct Params {
        double dt = 0.1;
        double damping = 0.1;
        int episode_limit = 50;
    };

    PointNavEnv();
    explicit PointNavEnv(Params params);

    Eigen::VectorXd reset() override;
    StepResult step(const Eigen::VectorXd& action) override;
    MomdpDescriptor descriptor() const override;

    Eigen::Vector2d position() const { return position_; }
    Eigen::Vector2d velocity() const { return velocity_; }
    int timer() const { return timer_; }

private:
    Eigen::VectorXd encode_state() const;

    Params params_;
    Eigen::Vector2d position_ = Eigen::Vector2d::Zero();
    Eigen::Vector2d velocity_ = Eigen::Vector2d::Zero();
    int timer_ = 0;
    bool started_ = false;
};

}  // namespace pslmorl
