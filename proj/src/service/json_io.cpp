#include "json_io.hpp"

#include <json.hpp>

#include "cityforge/core/text.hpp"

namespace cityforge::service {

using nlohmann::ordered_json;

namespace {

ordered_json report_object(const agents::EvalReport& report) {
    ordered_json j;
    j["passed"] = report.passed;
    j["min_iou"] = report.min_iou();
    ordered_json iou = ordered_json::object();
    for (const auto& [cls, v] : report.per_class_iou) iou[cls] = v;
    j["per_class_iou"] = std::move(iou);
    j["violations"] = report.violations;
    return j;
}

ordered_json trace_array(const std::vector<agents::ExecutionRecord>& trace) {
    ordered_json a = ordered_json::array();
    for (const agents::ExecutionRecord& e : trace) {
        ordered_json o;
        o["classname"] = e.classname;
        ordered_json args = ordered_json::object();
        for (const auto& [k, v] : e.arguments) args[k] = v;
        o["arguments"] = std::move(args);
        o["outcome"] = e.outcome;
        if (e.produced) o["produced"] = std::string(protocol::format_label(*e.produced));
        o["revision"] = e.revision;
        a.push_back(std::move(o));
    }
    return a;
}

template <typename T>
T field(const ordered_json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ServiceError(ServiceErrc::BadRequest, std::string("config field has the wrong type: ") + key);
    }
}

}  // namespace

void apply_config_json(SceneRequest& request, const std::string& json) {
    ordered_json j;
    try {
        j = ordered_json::parse(json);
    } catch (const nlohmann::json::exception& e) {
        throw ServiceError(ServiceErrc::BadRequest, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ServiceError(ServiceErrc::BadRequest, "config must be a JSON object");
    request.seed = field<std::uint64_t>(j, "seed", request.seed);
    request.cell_size = field<double>(j, "cell_size", request.cell_size);
    request.height_scale = field<double>(j, "height_scale", request.height_scale);
    request.style = field<std::string>(j, "style", request.style);
    request.weather = field<std::string>(j, "weather", request.weather);
    if (!(request.cell_size > 0.0)) throw ServiceError(ServiceErrc::BadRequest, "cell_size must be positive");
}

std::string config_json(const SceneRequest& request) {
    ordered_json j;
    j["seed"] = request.seed;
    j["cell_size"] = request.cell_size;
    j["height_scale"] = request.height_scale;
    j["style"] = request.style;
    j["weather"] = request.weather;
    return j.dump(2);
}

std::string eval_report_json(const agents::EvalReport& report) { return report_object(report).dump(); }

std::string SceneStore::report_json(const std::string& id) const {
    const std::vector<Revision> revs = revisions(id);
    const std::vector<Attempt> tries = attempts(id);
    ordered_json j;
    j["id"] = id;
    ordered_json ra = ordered_json::array();
    for (const Revision& r : revs) {
        ordered_json o;
        o["index"] = r.index;
        o["instruction"] = r.instruction;
        o["report"] = report_object(r.report);
        o["trace"] = trace_array(r.trace);
        o["objects"] = r.state->objects.size();
        ra.push_back(std::move(o));
    }
    j["revisions"] = std::move(ra);
    std::size_t p = 0, e = 0, c = 0;
    ordered_json aa = ordered_json::array();
    for (const Attempt& a : tries) {
        p += a.proposed;
        e += a.executed;
        c += a.correct;
        ordered_json o;
        o["instruction"] = a.instruction;
        o["proposed"] = a.proposed;
        o["executed"] = a.executed;
        o["correct"] = a.correct;
        o["committed"] = a.committed;
        if (!a.error.empty()) o["error"] = a.error;
        aa.push_back(std::move(o));
    }
    j["attempts"] = std::move(aa);
    ordered_json counters;
    counters["proposed"] = p;
    counters["executed"] = e;
    counters["correct"] = c;
    counters["er_at_1"] = p ? ordered_json(static_cast<double>(e) / static_cast<double>(p)) : ordered_json();
    counters["sr_at_1"] = e ? ordered_json(static_cast<double>(c) / static_cast<double>(e)) : ordered_json();
    j["counters"] = std::move(counters);
    return j.dump(2);
}

std::string created_json(const CreateResult& created) {
    ordered_json j;
    j["id"] = created.id;
    j["revision"] = 0;
    j["report"] = report_object(created.report);
    return j.dump();
}

std::string edit_json(const EditResult& edit) {
    ordered_json j;
    j["revision"] = edit.revision;
    j["applied"] = edit.applied;
    j["report"] = report_object(edit.run.report);
    j["trace"] = trace_array(edit.run.executions);
    j["proposed"] = edit.run.proposed;
    j["executed"] = edit.run.executed;
    j["correct"] = edit.run.correct;
    j["rounds"] = edit.run.rounds;
    if (edit.run.error) {
        j["error"] = std::string(agents::errc_label(*edit.run.error));
        j["message"] = edit.run.error_message;
    }
    return j.dump();
}

std::string error_json(std::string_view kind, const std::string& message) {
    ordered_json j;
    j["error"] = std::string(kind);
    j["message"] = message;
    return j.dump();
}

std::optional<std::string> edit_instruction(const std::string& body, const std::string& content_type) {
    if (content_type.find("json") == std::string::npos) {
        std::string t = trim(body);
        if (t.empty()) return std::nullopt;
        return t;
    }
    try {
        const ordered_json j = ordered_json::parse(body);
        if (!j.is_object() || !j.contains("instruction") || !j["instruction"].is_string()) return std::nullopt;
        return j["instruction"].get<std::string>();
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

std::string remote_request_json(const agents::Instruction& instruction, const protocol::ActionRegistry& registry,
                                 const agents::GuidanceDoc& guidance) {
    ordered_json j;
    j["instruction"] = instruction.text;
    j["guidance"] = guidance.text;
    ordered_json actions = ordered_json::array();
    for (const protocol::ActionManifest* m : registry.manifests())
        actions.push_back(ordered_json::parse(protocol::manifest_json(*m)));
    j["actions"] = std::move(actions);
    j["temperature"] = 0;
    return j.dump();
}

agents::ActionStep remote_step(const std::string& body) {
    auto bad = [](const std::string& why) {
        return agents::AgentError(agents::AgentErrc::Uninterpretable, "", "model endpoint: " + why);
    };
    ordered_json j;
    try {
        j = ordered_json::parse(body);
    } catch (const nlohmann::json::exception&) {
        throw bad("answer is not JSON");
    }
    if (!j.is_object() || !j.contains("classname") || !j["classname"].is_string()) throw bad("no classname");
    agents::ActionStep step;
    step.classname = j["classname"].get<std::string>();
    if (j.contains("arguments")) {
        if (!j["arguments"].is_object()) throw bad("arguments must be an object");
        for (const auto& [k, v] : j["arguments"].items()) step.arguments[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    return step;
}

}  // namespace cityforge::service
