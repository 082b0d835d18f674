#include "pslmorl/replay.hpp"

#include <stdexcept>

namespace pslmorl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ < 1) throw std::invalid_argument("capacity must be >= 1");
    storage_.reserve(capacity_);
}

void ReplayBuffer::push(Transition t) {
    if (storage_.size() < capacity_) {
        storage_.push_back(std::move(t));
    } else {
        storage_[cursor_] = std::move(t);
    }
    cursor_ = (cursor_ + 1) % capacity_;
    ++total_pushed_;
}

std::vector<Transition> ReplayBuffer::sample(Rng& rng, int n, const HerConfig& her,
                                             int m) const {
    if (storage_.empty()) throw std::logic_error("sample from empty replay buffer");
    if (n < 1) throw std::invalid_argument("sample size must be >= 1");
    if (her.extra_preferences < 0) throw std::invalid_argument("extra_preferences < 0");
    std::vector<Transition> out;
    out.reserve(static_cast<std::size_t>(n) * (1 + her.extra_preferences));
    for (int i = 0; i < n; ++i) {
        const Transition& t = storage_[static_cast<std::size_t>(
            rng.uniform_int(static_cast<int>(storage_.size())))];
        out.push_back(t);
        for (int k = 0; k < her.extra_preferences; ++k) {
            Transition relabeled = t;
            relabeled.preference = sample_preference(rng, m);
            out.push_back(std::move(relabeled));
        }
    }
    return out;
}

}  // namespace pslmorl
