#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "pslmorl/preference.hpp"
#include "pslmorl/replay.hpp"
#include "pslmorl/rng.hpp"

using namespace pslmorl;

namespace {

Transition make_transition(int id, int m) {
    Transition t;
    t.state = Eigen::VectorXd::Constant(3, static_cast<double>(id));
    t.action_index = id % 2;
    t.reward = Eigen::VectorXd::Constant(m, 0.1 * id);
    t.next_state = Eigen::VectorXd::Constant(3, static_cast<double>(id) + 0.5);
    t.done = (id % 3 == 0);
    t.preference = Eigen::VectorXd::Constant(m, 1.0 / m);
    return t;
}

}  // namespace

TEST_CASE("ring buffer overwrites the oldest entry once full") {
    ReplayBuffer buf(2);
    for (int id = 0; id < 3; ++id) buf.push(make_transition(id, 2));
    CHECK(buf.size() == 2);
    CHECK(buf.capacity() == 2);
    CHECK(buf.total_pushed() == 3);
    // Slot 0 was recycled for id 2; slot 1 still holds id 1.
    CHECK(buf.at(0).state[0] == 2.0);
    CHECK(buf.at(1).state[0] == 1.0);
}

TEST_CASE("sampling from an empty buffer throws") {
    ReplayBuffer buf(4);
    Rng rng(1);
    CHECK_THROWS_AS(buf.sample(rng, 1, HerConfig{0}, 2), std::logic_error);
}

TEST_CASE("her emits one stored plus extra relabeled copies per draw") {
    ReplayBuffer buf(8);
    for (int id = 0; id < 5; ++id) buf.push(make_transition(id, 2));
    Rng rng(7);
    const HerConfig her{3};
    auto batch = buf.sample(rng, 4, her, 2);
    REQUIRE(batch.size() == 16);  // 4 draws x (1 + 3)
    for (int g = 0; g < 4; ++g) {
        const Transition& head = batch[static_cast<std::size_t>(g * 4)];
        // The head copy carries the stored behavior preference.
        CHECK(head.preference == Eigen::VectorXd::Constant(2, 0.5));
        for (int k = 1; k < 4; ++k) {
            const Transition& relab = batch[static_cast<std::size_t>(g * 4 + k)];
            // Dynamics fields are shared verbatim within the group.
            CHECK(relab.state == head.state);
            CHECK(relab.action_index == head.action_index);
            CHECK(relab.reward == head.reward);
            CHECK(relab.next_state == head.next_state);
            CHECK(relab.done == head.done);
            // The relabeled preference is a fresh simplex point.
            CHECK(is_valid_preference(relab.preference));
        }
    }
}

TEST_CASE("relabeled preferences look uniform on the simplex") {
    ReplayBuffer buf(4);
    buf.push(make_transition(0, 2));
    Rng rng(2024);
    double sum0 = 0.0;
    int count = 0;
    for (int i = 0; i < 2500; ++i) {
        auto batch = buf.sample(rng, 1, HerConfig{3}, 2);
        for (std::size_t k = 1; k < batch.size(); ++k) {
            sum0 += batch[k].preference[0];
            ++count;
        }
    }
    CHECK(count == 7500);
    CHECK(std::abs(sum0 / count - 0.5) < 0.02);
}

TEST_CASE("uniform index sampling passes a chi-square check") {
    const int slots = 8;
    ReplayBuffer buf(slots);
    for (int id = 0; id < slots; ++id) buf.push(make_transition(id, 2));
    Rng rng(999);
    const int draws = 100000;
    std::vector<int> counts(slots, 0);
    auto batch = buf.sample(rng, draws, HerConfig{0}, 2);
    REQUIRE(batch.size() == static_cast<std::size_t>(draws));
    for (const auto& t : batch) {
        int id = static_cast<int>(t.state[0]);
        REQUIRE(id >= 0);
        REQUIRE(id < slots);
        ++counts[static_cast<std::size_t>(id)];
    }
    const double expected = static_cast<double>(draws) / slots;
    double chi2 = 0.0;
    for (int c : counts) {
        const double d = c - expected;
        chi2 += d * d / expected;
    }
    // 7 degrees of freedom; 24.32 is the 0.999 quantile.
    CHECK(chi2 < 24.32);
}

TEST_CASE("sampling never mutates stored transitions") {
    ReplayBuffer buf(4);
    for (int id = 0; id < 4; ++id) buf.push(make_transition(id, 3));
    Rng rng(5);
    for (int round = 0; round < 50; ++round) buf.sample(rng, 8, HerConfig{2}, 3);
    for (int id = 0; id < 4; ++id) {
        const Transition& t = buf.at(static_cast<std::size_t>(id));
        const Transition fresh = make_transition(id, 3);
        CHECK(t.state == fresh.state);
        CHECK(t.reward == fresh.reward);
        CHECK(t.next_state == fresh.next_state);
        CHECK(t.preference == fresh.preference);
        CHECK(t.done == fresh.done);
    }
}

TEST_CASE("zero-capacity buffers are rejected") {
    CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);
}
