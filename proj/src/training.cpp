#include "pslmorl/training.hpp"

#include <json.hpp>

namespace pslmorl {

std::string to_jsonl(const TrainLogRecord& rec) {
    nlohmann::json j;
    j["step"] = rec.step;
    j["loss"] = rec.loss;
    j["epsilon"] = rec.epsilon;
    if (rec.has_eval) {
        j["eval_hv"] = rec.eval_hv;
        if (rec.eval_sp < 0.0) {
            j["eval_sp"] = "N/A";
        } else {
            j["eval_sp"] = rec.eval_sp;
        }
    }
    j["grad_norm_policy"] = rec.grad_norm_policy;
    j["grad_norm_hyper"] = rec.grad_norm_hyper;
    return j.dump();
}

}  // namespace pslmorl
