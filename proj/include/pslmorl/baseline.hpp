#pragma once

#include "pslmorl/config.hpp"
#include "pslmorl/pareto.hpp"

namespace pslmorl {

struct RadialBaselineResult {
    std::vector<ObjectivePoint> front;    // dominance-filtered returns
    std::vector<ObjectivePoint> returns;  // one per weight, in grid order
};

// Trains an independent scalar-reward network per evenly spaced weight
// (reward w^T r, standard double-Q targets, no hypernetwork) and filters the
// greedy-policy returns.
RadialBaselineResult train_radial_baseline(const RadialBaselineConfig& cfg,
                                           const DiscreteEnvFactory& make_env,
                                           std::uint64_t seed);

}  // namespace pslmorl
