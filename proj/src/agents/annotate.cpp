#include <algorithm>
#include <cctype>
#include <set>

#include "cityforge/agents/agents.hpp"
#include "cityforge/core/text.hpp"
#include "payloads.hpp"

namespace cityforge::agents {

namespace {

// Lowercase alphabetic runs.
std::vector<std::string> words_of(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

bool starts_with_stem(const std::string& word, const Concept& c) {
    return std::any_of(c.stems.begin(), c.stems.end(), [&](const std::string& s) { return word.starts_with(s); });
}

}  // namespace

const std::vector<Concept>& concept_table() {
    static const std::vector<Concept> table = {
        {"conversion", {"convert", "conversion"}}, {"generation", {"generat"}}, {"retrieval", {"retriev"}},
        {"placement", {"plac"}},                   {"extraction", {"extract"}}, {"meshing", {"mesh"}},
    };
    return table;
}

std::vector<std::string> annotate(protocol::ActionRegistry& registry, MessagePool& pool) {
    if (registry.size() == 0) return {};
    std::map<std::string, int> occurrences;
    for (const protocol::ActionManifest* m : registry.manifests()) {
        std::vector<std::string> words = words_of(m->description);
        for (std::string& w : words_of(m->classname)) words.push_back(std::move(w));
        for (const std::string& w : words) {
            for (const Concept& c : concept_table()) {
                if (starts_with_stem(w, c)) ++occurrences[c.name];
            }
        }
    }
    std::vector<std::string> vocabulary;
    for (const auto& [name, n] : occurrences) {
        if (n >= 2) vocabulary.push_back(name);
    }
    std::vector<std::string> names;
    for (const protocol::ActionManifest* m : registry.manifests()) names.push_back(m->classname);
    for (const std::string& name : names) {
        std::set<std::string> tags;
        for (const std::string& w : words_of(registry.manifest(name).description)) {
            for (const Concept& c : concept_table()) {
                if (std::binary_search(vocabulary.begin(), vocabulary.end(), c.name) && starts_with_stem(w, c)) {
                    tags.insert(c.name);
                }
            }
        }
        registry.set_tags(name, {tags.begin(), tags.end()});
    }
    pool.publish("labels", "annotator", labels_payload(vocabulary, registry));
    return vocabulary;
}

}  // namespace cityforge::agents
