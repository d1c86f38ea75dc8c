#include "payloads.hpp"

#include <json.hpp>

namespace cityforge::agents {

using nlohmann::ordered_json;

namespace {

ordered_json args_json(const std::map<std::string, std::string>& args) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : args) j[k] = v;
    return j;
}

}  // namespace

std::optional<std::string> payload_string(const std::string& json, std::string_view key) {
    const auto j = ordered_json::parse(json, nullptr, false);
    if (!j.is_object()) return std::nullopt;
    auto it = j.find(std::string(key));
    if (it == j.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
}

std::string labels_payload(const std::vector<std::string>& vocabulary, const protocol::ActionRegistry& registry) {
    ordered_json tags = ordered_json::object();
    for (const protocol::ActionManifest* m : registry.manifests()) tags[m->classname] = m->tags;
    return ordered_json{{"vocabulary", vocabulary}, {"tags", std::move(tags)}}.dump();
}

std::string workflow_payload(const Workflow& workflow) {
    ordered_json steps = ordered_json::array();
    for (const ActionStep& s : workflow.steps) {
        steps.push_back({{"classname", s.classname},
                         {"arguments", args_json(s.arguments)},
                         {"produces", s.produces ? std::string(protocol::format_label(*s.produces)) : ""},
                         {"inserted", s.inserted}});
    }
    return ordered_json{{"steps", std::move(steps)}}.dump();
}

std::string record_payload(const ExecutionRecord& r) {
    ordered_json required = ordered_json::array();
    for (protocol::DataFormat f : protocol::formats_in(r.required)) required.push_back(protocol::format_label(f));
    ordered_json before = ordered_json::array();
    for (protocol::DataFormat f : protocol::formats_in(r.available_before)) before.push_back(protocol::format_label(f));
    return ordered_json{{"classname", r.classname},
                        {"arguments", args_json(r.arguments)},
                        {"outcome", r.outcome},
                        {"available_before", std::move(before)},
                        {"required", std::move(required)},
                        {"produced", r.produced ? std::string(protocol::format_label(*r.produced)) : ""},
                        {"revision", r.revision}}
        .dump();
}

std::string bindings_payload(const std::map<std::string, std::string>& bindings) {
    return args_json(bindings).dump();
}

std::string failure_payload(std::string_view classname, std::string_view kind, std::string_view message) {
    return ordered_json{{"classname", classname}, {"kind", kind}, {"message", message}}.dump();
}

std::string report_payload(const EvalReport& report, int round) {
    ordered_json iou = ordered_json::object();
    for (const auto& [k, v] : report.per_class_iou) iou[k] = v;
    return ordered_json{{"round", round},
                        {"passed", report.passed},
                        {"per_class_iou", std::move(iou)},
                        {"violations", report.violations}}
        .dump();
}

}  // namespace cityforge::agents
