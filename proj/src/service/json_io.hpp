#pragma once

#include <optional>
#include <string>

#include "cityforge/service/service.hpp"

namespace cityforge::service {

std::string created_json(const CreateResult& created);
std::string edit_json(const EditResult& edit);
std::string error_json(std::string_view kind, const std::string& message);

/// Instruction from an edit body: {"instruction": "..."} or the bare text.
std::optional<std::string> edit_instruction(const std::string& body, const std::string& content_type);

std::string remote_request_json(const agents::Instruction& instruction, const protocol::ActionRegistry& registry,
                                 const agents::GuidanceDoc& guidance);
/// Throws Uninterpretable on a malformed answer.
agents::ActionStep remote_step(const std::string& body);

}  // namespace cityforge::service
