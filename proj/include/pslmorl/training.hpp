#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pslmorl/hypernet.hpp"
#include "pslmorl/pareto.hpp"

namespace pslmorl {

// One JSON-lines record of training progress. eval_* fields are only
// meaningful when has_eval is set (evaluation checkpoints).
struct TrainLogRecord {
    long step = 0;
    double loss = 0.0;
    double epsilon = 0.0;       // exploration parameter (noise sigma for td3)
    bool has_eval = false;
    double eval_hv = 0.0;
    double eval_sp = 0.0;       // -1 encodes "N/A" (single-point fronts)
    double grad_norm_policy = 0.0;
    double grad_norm_hyper = 0.0;
};

std::string to_jsonl(const TrainLogRecord& rec);

// Optional callbacks; all may be left empty. on_checkpoint fires at every
// evaluation boundary and once more with tag "final" (or "diverged" right
// before a non-finite-loss abort).
struct TrainHooks {
    std::function<void(const TrainLogRecord&)> on_log;
    std::function<void(const std::string& tag, long step, const Hypernetwork& hyper,
                       const MlpParams& theta1)>
        on_checkpoint;
};

// Linear decay from start to end over decay_steps, then flat.
struct EpsilonSchedule {
    double start = 1.0;
    double end = 0.05;
    long decay_steps = 1;

    double at(long step) const {
        if (step >= decay_steps) return end;
        const double t = static_cast<double>(step) / static_cast<double>(decay_steps);
        return start + (end - start) * t;
    }
};

}  // namespace pslmorl
