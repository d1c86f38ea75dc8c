#include "cityforge/agents/agents.hpp"
#include "payloads.hpp"

namespace cityforge::agents {

std::optional<std::string> pool_binding(const MessagePool& pool, const std::string& param) {
    if (auto v = pool.binding(param)) return v;
    if (param != "obj_name" && param.ends_with("obj_name")) return pool.binding("obj_name");
    return std::nullopt;
}

ExecutionRecord execute(const protocol::ActionRegistry& registry, ActionContext& context, const ActionStep& step,
                        scene::SceneState& state, MessagePool& pool) {
    const protocol::ActionManifest& m = registry.manifest(step.classname);
    ExecutionRecord rec;
    rec.classname = m.classname;
    rec.available_before = state.available;
    rec.required = required_formats(m, step, &pool);
    auto reject = [&](AgentErrc kind, const std::string& detail, const std::string& message) {
        pool.publish("failures", "executor", failure_payload(m.classname, errc_label(kind), message));
        throw AgentError(kind, detail, message);
    };

    for (const protocol::ActionInput& in : m.inputs) {
        std::optional<std::string> v;
        if (auto it = step.arguments.find(in.name); it != step.arguments.end()) {
            v = it->second;
        } else if (auto b = pool_binding(pool, in.name)) {
            v = *b;
        } else if (protocol::has(state.available, in.format)) {
            v = "@workspace";
        } else if (in.default_value) {
            v = *in.default_value;
        }
        if (!v) reject(AgentErrc::ArgumentBinding, in.name, m.classname + ": cannot bind parameter " + in.name);
        rec.arguments[in.name] = *v;
    }

    scene::SceneState next = state;
    protocol::ActionCall call{next, rec.arguments, context, {}};
    try {
        registry.implementation(m.classname)(call);
    } catch (const AgentError& e) {
        if (e.kind() != AgentErrc::ActionFailed) throw;
        reject(AgentErrc::ActionFailed, m.classname, m.classname + ": " + e.what());
    } catch (const Error& e) {
        reject(AgentErrc::ActionFailed, m.classname, m.classname + ": " + e.what());
    }
    next.revision = state.revision + 1;
    if (m.output) next.available |= protocol::bit(*m.output);
    state = std::move(next);

    rec.outcome = "ok";
    rec.produced = m.output;
    rec.revision = state.revision;
    pool.publish("trace", "executor", record_payload(rec));
    if (!call.published.empty()) pool.publish("bindings", "executor", bindings_payload(call.published));
    return rec;
}

}  // namespace cityforge::agents
