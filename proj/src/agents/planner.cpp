#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>

#include "cityforge/agents/agents.hpp"
#include "payloads.hpp"

namespace cityforge::agents {

using protocol::ActionManifest;
using protocol::DataFormat;
using protocol::FormatSet;

namespace {

[[noreturn]] void unsatisfiable(DataFormat f) {
    const std::string label(protocol::format_label(f));
    throw AgentError(AgentErrc::Unsatisfiable, label, "no conversion chain produces " + label);
}

ActionStep step_for(const ActionManifest& m, bool inserted) {
    ActionStep s;
    s.classname = m.classname;
    s.produces = m.output;
    s.inserted = inserted;
    return s;
}

}  // namespace

bool Workflow::done() const {
    return std::all_of(steps.begin(), steps.end(), [](const ActionStep& s) { return s.executed; });
}

std::vector<const ActionManifest*> conversion_edges(const protocol::ActionRegistry& registry) {
    std::set<std::string> builtin;
    for (const ActionManifest& m : protocol::builtin_conversions()) builtin.insert(m.classname);
    std::vector<const ActionManifest*> out;
    for (const ActionManifest* m : registry.manifests()) {
        if (!m->output) continue;
        if (builtin.count(m->classname) || m->classname.ends_with("_conversion")) out.push_back(m);
    }
    return out;
}

std::vector<const ActionManifest*> shortest_chain(const std::vector<const ActionManifest*>& edges, FormatSet available,
                                                  DataFormat target) {
    if (protocol::has(available, target)) return {};
    std::vector<const ActionManifest*> sorted = edges;
    std::sort(sorted.begin(), sorted.end(),
              [](const ActionManifest* a, const ActionManifest* b) { return a->classname < b->classname; });
    // Breadth-first over reachable format sets. Expanding edges in classname
    // order from a FIFO queue reaches every set first along the
    // lexicographically smallest shortest chain.
    struct Parent {
        FormatSet from;
        const ActionManifest* edge;
    };
    std::unordered_map<FormatSet, Parent> parent;
    parent.emplace(available, Parent{available, nullptr});
    std::deque<FormatSet> queue{available};
    while (!queue.empty()) {
        const FormatSet cur = queue.front();
        queue.pop_front();
        for (const ActionManifest* e : sorted) {
            const FormatSet need = e->input_formats();
            if ((need & cur) != need || protocol::has(cur, *e->output)) continue;
            const FormatSet next = cur | protocol::bit(*e->output);
            if (parent.count(next)) continue;
            parent.emplace(next, Parent{cur, e});
            if (*e->output == target) {
                std::vector<const ActionManifest*> chain;
                for (FormatSet s = next; s != available; s = parent.at(s).from) chain.push_back(parent.at(s).edge);
                std::reverse(chain.begin(), chain.end());
                return chain;
            }
            queue.push_back(next);
        }
    }
    unsatisfiable(target);
}

FormatSet required_formats(const ActionManifest& manifest, const ActionStep& step, const MessagePool* pool) {
    FormatSet out = 0;
    for (const protocol::ActionInput& in : manifest.inputs) {
        if (step.arguments.count(in.name) || in.default_value) continue;
        if (pool && pool_binding(*pool, in.name)) continue;
        out |= protocol::bit(in.format);
    }
    return out;
}

Workflow plan_workflow(const protocol::ActionRegistry& registry, const ActionStep& goal, FormatSet available,
                       MessagePool* pool) {
    const ActionManifest& gm = registry.manifest(goal.classname);
    const auto edges = conversion_edges(registry);
    Workflow w;
    FormatSet have = available;
    const FormatSet missing = required_formats(gm, goal, pool) & ~available;
    for (DataFormat f : protocol::formats_in(missing)) {
        if (protocol::has(have, f)) continue;
        for (const ActionManifest* m : shortest_chain(edges, have, f)) {
            w.steps.push_back(step_for(*m, true));
            have |= protocol::bit(*m->output);
        }
    }
    ActionStep g = goal;
    g.produces = gm.output;
    g.executed = false;
    w.steps.push_back(std::move(g));
    if (pool) pool->publish("workflow", "planner", workflow_payload(w));
    return w;
}

ActionStep next_action(const protocol::ActionRegistry& registry, const Workflow& workflow, FormatSet available,
                       const MessagePool* pool) {
    const ActionStep* blocked = nullptr;
    for (const ActionStep& s : workflow.steps) {
        if (s.executed) continue;
        const FormatSet need = required_formats(registry.manifest(s.classname), s, pool);
        if ((need & available) == need) return s;
        if (!blocked) blocked = &s;
    }
    if (!blocked) throw AgentError(AgentErrc::Unsatisfiable, "", "workflow has no pending step");
    const FormatSet missing = required_formats(registry.manifest(blocked->classname), *blocked, pool) & ~available;
    const DataFormat first = protocol::formats_in(missing).front();
    const auto chain = shortest_chain(conversion_edges(registry), available, first);
    return step_for(*chain.front(), true);
}

}  // namespace cityforge::agents
