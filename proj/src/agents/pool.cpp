#include <filesystem>

#include "cityforge/agents/agents.hpp"
#include "cityforge/core/text.hpp"
#include "payloads.hpp"

namespace cityforge::agents {

std::string_view errc_label(AgentErrc kind) {
    switch (kind) {
        case AgentErrc::Uninterpretable: return "uninterpretable";
        case AgentErrc::Unsatisfiable: return "unsatisfiable";
        case AgentErrc::ArgumentBinding: return "argument_binding";
        case AgentErrc::ActionFailed: return "action_failed";
    }
    return "unknown";
}

MessagePool::MessagePool(const MessagePool& other) {
    std::lock_guard lock(other.mutex_);
    entries_ = other.entries_;
    next_ = other.next_;
}

MessagePool& MessagePool::operator=(const MessagePool& other) {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_, other.mutex_);
    entries_ = other.entries_;
    next_ = other.next_;
    return *this;
}

std::uint64_t MessagePool::publish(std::string topic, std::string producer, std::string payload) {
    std::lock_guard lock(mutex_);
    const std::uint64_t seq = next_++;
    entries_.push_back({seq, std::move(topic), std::move(producer), std::move(payload)});
    return seq;
}

std::vector<PoolEntry> MessagePool::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

std::vector<PoolEntry> MessagePool::topic(std::string_view name) const {
    std::lock_guard lock(mutex_);
    std::vector<PoolEntry> out;
    for (const PoolEntry& e : entries_) {
        if (e.topic == name) out.push_back(e);
    }
    return out;
}

std::size_t MessagePool::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::size_t MessagePool::count(std::string_view topic) const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (const PoolEntry& e : entries_) n += e.topic == topic;
    return n;
}

std::optional<std::string> MessagePool::binding(std::string_view key) const {
    std::lock_guard lock(mutex_);
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
        if (it->topic != "bindings") continue;
        if (auto v = payload_string(it->payload, key)) return v;
    }
    return std::nullopt;
}

Guidance default_guidance() {
    Guidance g;
    g.annotator.text =
        "Derive concepts from the action descriptions and tag every action with each concept it mentions.";
    g.planner.text =
        "Map the instruction to one goal action. Close missing input formats with the shortest chain of "
        "conversions. Prefer the earliest step that can run.";
    g.executor.text =
        "Bind each parameter from the instruction first, then from earlier results, then from the action "
        "defaults. Never invent object names.";
    g.evaluator.text =
        "Render the scene from above in semantic colors and compare each class with the reference layout. "
        "Buildings must not overlap and everything must stay inside the scene.";
    return g;
}

Guidance load_guidance(const std::string& dir) {
    Guidance g = default_guidance();
    const std::pair<const char*, GuidanceDoc*> files[] = {
        {"annotator.txt", &g.annotator}, {"planner.txt", &g.planner},
        {"executor.txt", &g.executor},   {"evaluator.txt", &g.evaluator}};
    for (const auto& [name, doc] : files) {
        const std::filesystem::path p = std::filesystem::path(dir) / name;
        if (!std::filesystem::exists(p)) continue;
        std::string text = trim(read_file(p.string()));
        if (text.empty()) throw Error("empty guidance document: " + p.string());
        doc->text = std::move(text);
    }
    return g;
}

}  // namespace cityforge::agents
