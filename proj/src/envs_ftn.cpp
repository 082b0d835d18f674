#include "pslmorl/envs/ftn.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pslmorl/pareto.hpp"
#include "pslmorl/rng.hpp"

namespace pslmorl {

Matrix load_leaf_rewards(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::vector<std::array<double, kFtnObjectives>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::array<double, kFtnObjectives> row{};
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col >= kFtnObjectives) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": expected 6 columns");
            }
            try {
                row[col] = std::stod(cell);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": cannot parse '" + cell + "'");
            }
            if (!std::isfinite(row[col])) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": non-finite reward");
            }
            ++col;
        }
        if (col != kFtnObjectives) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 6 columns, got " + std::to_string(col));
        }
        rows.push_back(row);
    }
    if (rows.empty()) throw std::runtime_error(path + ": empty reward file");
    Matrix out(rows.size(), kFtnObjectives);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < kFtnObjectives; ++j) out(static_cast<Eigen::Index>(i), j) = rows[i][j];
    }
    return out;
}

Matrix gen_leaf_rewards(std::uint64_t seed, int depth) {
    if (depth < 1 || depth > 20) throw std::invalid_argument("depth out of range");
    Rng rng(seed);
    const Eigen::Index n = Eigen::Index{1} << depth;
    Matrix out(n, kFtnObjectives);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd v = rng.normal_vector(kFtnObjectives).cwiseAbs();
        out.row(i) = (10.0 * v / v.norm()).transpose();
    }
    return out;
}

FtnEnv::FtnEnv(int depth, Matrix leaf_rewards, bool onehot_level)
    : depth_(depth), leaves_(std::move(leaf_rewards)), onehot_level_(onehot_level) {
    if (depth_ < 1 || depth_ > 20) throw std::invalid_argument("depth out of range");
    const Eigen::Index want = Eigen::Index{1} << depth_;
    if (leaves_.rows() != want || leaves_.cols() != kFtnObjectives) {
        throw std::invalid_argument("leaf reward matrix must be 2^depth x 6, got " +
                                    std::to_string(leaves_.rows()) + " x " +
                                    std::to_string(leaves_.cols()));
    }
    if (!leaves_.allFinite() || (leaves_.array() < 0.0).any()) {
        throw std::invalid_argument("leaf rewards must be finite and nonnegative");
    }
}

int FtnEnv::state_dim() const { return onehot_level_ ? 2 + depth_ + 1 : 2; }

Eigen::VectorXd FtnEnv::encode_state() const {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(state_dim());
    s[0] = static_cast<double>(level_) / depth_;
    s[1] = static_cast<double>(index_) / static_cast<double>(Eigen::Index{1} << level_);
    if (onehot_level_) s[2 + level_] = 1.0;
    return s;
}

Eigen::VectorXd FtnEnv::reset() {
    level_ = 0;
    index_ = 0;
    started_ = true;
    return encode_state();
}

StepResult FtnEnv::step(int action) {
    if (!started_) throw std::logic_error("step before reset");
    if (done()) throw std::logic_error("step after episode end");
    if (action != 0 && action != 1) throw std::invalid_argument("action must be 0 or 1");
    ++level_;
    index_ = 2 * index_ + action;
    StepResult res;
    if (done()) {
        res.reward = leaves_.row(index_).transpose();
        res.done = true;
    } else {
        res.reward = Eigen::VectorXd::Zero(kFtnObjectives);
        res.done = false;
    }
    res.state = encode_state();
    return res;
}

MomdpDescriptor FtnEnv::descriptor() const {
    MomdpDescriptor d;
    d.m = kFtnObjectives;
    d.state_dim = state_dim();
    d.action_count = 2;
    d.discount = Eigen::VectorXd::Constant(kFtnObjectives, 0.99);
    d.episode_limit = depth_;
    return d;
}

std::vector<Eigen::VectorXd> FtnEnv::oracle_front() const {
    std::vector<Eigen::VectorXd> rows;
    rows.reserve(static_cast<std::size_t>(leaves_.rows()));
    for (Eigen::Index i = 0; i < leaves_.rows(); ++i) {
        rows.push_back(leaves_.row(i).transpose());
    }
    return pareto_filter(rows);
}

}  // namespace pslmorl
