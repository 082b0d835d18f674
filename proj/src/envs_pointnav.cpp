#include "pslmorl/envs/pointnav.hpp"

#include <stdexcept>

namespace pslmorl {

PointNavEnv::PointNavEnv() : PointNavEnv(Params{}) {}

PointNavEnv::PointNavEnv(Params params) : params_(params) {
    if (params_.dt <= 0.0) throw std::invalid_argument("dt must be positive");
    if (params_.damping <= 0.0 || params_.damping >= 1.0) {
        throw std::invalid_argument("damping must be in (0,1)");
    }
    if (params_.episode_limit < 1) {
        throw std::invalid_argument("episode_limit must be >= 1");
    }
}

Eigen::VectorXd PointNavEnv::encode_state() const {
    Eigen::VectorXd s(4);
    s << position_[0], position_[1], velocity_[0], velocity_[1];
    return s;
}

Eigen::VectorXd PointNavEnv::reset() {
    position_.setZero();
    velocity_.setZero();
    timer_ = 0;
    started_ = true;
    return encode_state();
}

StepResult PointNavEnv::step(const Eigen::VectorXd& action) {
    if (!started_) throw std::logic_error("step before reset");
    if (timer_ >= params_.episode_limit) throw std::logic_error("step after episode end");
    if (action.size() != 2) throw std::invalid_argument("action must be 2-dimensional");
    const Eigen::Vector2d a = action.cwiseMax(-1.0).cwiseMin(1.0);
    velocity_ = (1.0 - params_.damping) * velocity_ + params_.dt * a;
    position_ += params_.dt * velocity_;
    ++timer_;
    StepResult res;
    res.state = encode_state();
    res.reward = Eigen::VectorXd(2);
    res.reward << velocity_[0], 1.0 - a.squaredNorm() / 2.0;
    res.done = timer_ >= params_.episode_limit;
    return res;
}

MomdpDescriptor PointNavEnv::descriptor() const {
    MomdpDescriptor d;
    d.m = 2;
    d.state_dim = 4;
    d.action_dim = 2;
    d.discount = Eigen::VectorXd::Constant(2, 0.995);
    d.episode_limit = params_.episode_limit;
    return d;
}

}  // namespace pslmorl
