#pragma once

#include <cstddef>
#include <vector>

#include "pslmorl/envs/common.hpp"
#include "pslmorl/preference.hpp"
#include "pslmorl/rng.hpp"

namespace pslmorl {

struct HerConfig {
    int extra_preferences = 3;  // relabeled copies emitted per sampled transition
};

// Fixed-capacity ring buffer of transitions; oldest entries are overwritten
// once full.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);

    // n uniform draws with replacement. Each draw is emitted once with its
    // stored preference and extra_preferences more times with a fresh
    // preference from the global distribution; states, actions, and rewards
    // are never altered by relabeling.
    std::vector<Transition> sample(Rng& rng, int n, const HerConfig& her, int m) const;

    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::size_t total_pushed() const { return total_pushed_; }
    const Transition& at(std::size_t i) const { return storage_[i]; }

private:
    std::size_t capacity_;
    std::vector<Transition> storage_;
    std::size_t cursor_ = 0;
    std::size_t total_pushed_ = 0;
};

}  // namespace pslmorl
