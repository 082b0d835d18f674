#pragma once

#include <cstdint>
#include <string>

#include "pslmorl/envs/common.hpp"
#include "pslmorl/mlp.hpp"

namespace pslmorl {

inline constexpr int kFtnObjectives = 6;

// Loads a headerless CSV of leaf reward rows (6 columns). Throws with the
// offending line number on parse or shape failures.
Matrix load_leaf_rewards(const std::string& path);

// 2^depth rows, each drawn uniformly on the nonnegative part of the radius-10
// sphere in R^6 (|gaussian| normalized, scaled by 10).
Matrix gen_leaf_rewards(std::uint64_t seed, int depth);

// Fruit Tree Navigation: a full binary tree of the given depth. The agent
// starts at the root and picks left/right at every level; internal nodes pay
// a zero vector, the reached leaf pays its reward row, and the episode ends.
class FtnEnv : public DiscreteEnv {
public:
    // leaf_rewards must have 2^depth rows and 6 columns, all entries finite
    // and nonnegative.
    FtnEnv(int depth, Matrix leaf_rewards, bool onehot_level = false);

    Eigen::VectorXd reset() override;
    StepResult step(int action) override;  // 0 = left, 1 = right
    MomdpDescriptor descriptor() const override;

    int depth() const { return depth_; }
    int level() const { return level_; }
    int node_index() const { return index_; }
    bool done() const { return level_ == depth_; }
    const Matrix& leaf_rewards() const { return leaves_; }

    // Brute-force nondominated subset of the leaf reward rows.
    std::vector<Eigen::VectorXd> oracle_front() const;

    Eigen::VectorXd encode_state() const;
    int state_dim() const;

private:
    int depth_;
    Matrix leaves_;
    bool onehot_level_;
    int level_ = 0;
    int index_ = 0;
    bool started_ = false;
};

}  // namespace pslmorl
