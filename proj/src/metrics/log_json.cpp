#include <json.hpp>

#include "cityforge/metrics/metrics.hpp"

namespace cityforge::metrics {

std::string run_log_json(const RunLog& log) {
    nlohmann::ordered_json j;
    j["seed"] = log.seed;
    j["proposed"] = log.proposed();
    j["executed"] = log.executed();
    j["correct"] = log.correct();
    if (log.proposed() > 0) j["er_at_1"] = er_at_1(log);
    if (log.executed() > 0) j["sr_at_1"] = sr_at_1(log);
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    for (const RunRecord& r : log.records) {
        nlohmann::ordered_json o;
        o["index"] = r.index;
        o["instruction"] = r.instruction;
        o["proposed"] = r.proposed;
        o["executed"] = r.executed;
        o["correct"] = r.correct;
        o["rounds"] = r.rounds;
        o["committed"] = r.committed;
        o["passed"] = r.passed;
        if (!r.error.empty()) {
            o["error"] = r.error;
            o["error_message"] = r.error_message;
        }
        o["trace"] = r.trace;
        records.push_back(std::move(o));
    }
    j["records"] = std::move(records);
    return j.dump(2);
}

}  // namespace cityforge::metrics
