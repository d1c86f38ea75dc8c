#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cityforge/agents/agents.hpp"

// JSON payloads of the message pool; kept in one translation unit.
namespace cityforge::agents {

std::optional<std::string> payload_string(const std::string& json, std::string_view key);
std::string labels_payload(const std::vector<std::string>& vocabulary, const protocol::ActionRegistry& registry);
std::string workflow_payload(const Workflow& workflow);
std::string record_payload(const ExecutionRecord& record);
std::string bindings_payload(const std::map<std::string, std::string>& bindings);
std::string failure_payload(std::string_view classname, std::string_view kind, std::string_view message);
std::string report_payload(const EvalReport& report, int round);

}  // namespace cityforge::agents
