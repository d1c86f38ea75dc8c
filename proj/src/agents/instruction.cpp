#include <algorithm>
#include <charconv>
#include <set>

#include "cityforge/agents/agents.hpp"
#include "cityforge/core/text.hpp"

namespace cityforge::agents {

namespace {

const std::set<std::string, std::less<>> kVerbs = {"generate", "scale",  "raise",     "recolor",
                                                   "place",    "remove", "set-style", "set-weather"};

// Words that may sit in a selector without naming anything.
const std::set<std::string, std::less<>> kFiller = {"a",    "an",       "all",  "the",      "this", "that",
                                                    "of",   "from",     "on",   "in",       "with", "every",
                                                    "each", "semantic", "map",  "layout",   "input", "new",
                                                    "some", "more",     "data", "osm",      "file", "given"};

const std::set<std::string, std::less<>> kPronouns = {"it", "them", "its"};

[[noreturn]] void uninterpretable(std::string_view text, const std::string& why) {
    throw AgentError(AgentErrc::Uninterpretable, std::string(text), "cannot interpret \"" + std::string(text) + "\": " + why);
}

std::optional<double> parse_number(std::string_view s) {
    if (s.starts_with('+')) s.remove_prefix(1);
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string join(const std::vector<std::string>& words, std::size_t from = 0) {
    std::string out;
    for (std::size_t i = from; i < words.size(); ++i) {
        if (!out.empty()) out += ' ';
        out += words[i];
    }
    return out;
}

// Object name, class selector or nothing (pronoun).
std::optional<std::string> object_selector(const Goal& g, std::string_view text) {
    std::optional<std::string> cls;
    bool pronoun = false;
    for (const std::string& w : g.selector) {
        if (object_name_like(w)) return w;
        if (auto c = class_word(w); c && !cls) cls = *c;
        if (kPronouns.count(w)) pronoun = true;
    }
    if (cls) return "class:" + *cls;
    if (pronoun) return std::nullopt;
    uninterpretable(text, "no object or class to " + g.verb);
}

std::string magnitude(const Goal& g) { return format_number(*g.amount) + (g.percent ? "%" : ""); }

}  // namespace

std::optional<std::string> class_word(std::string_view word) {
    static const std::map<std::string, std::string, std::less<>> table = {
        {"building", "building"},     {"buildings", "building"},    {"house", "building"},
        {"houses", "building"},       {"road", "road"},             {"roads", "road"},
        {"street", "road"},           {"streets", "road"},          {"tree", "tree"},
        {"trees", "tree"},            {"park", "green"},            {"parks", "green"},
        {"green", "green"},           {"greenery", "green"},        {"water", "water"},
        {"lake", "water"},            {"lakes", "water"},           {"streetlamp", "streetlamp"},
        {"streetlamps", "streetlamp"}, {"lamp", "streetlamp"},      {"lamps", "streetlamp"},
        {"cube", "cube"},             {"cubes", "cube"},            {"city", "city"},
        {"scene", "city"},            {"town", "city"},             {"point", "point"},
        {"points", "point"},          {"line", "line"},             {"lines", "line"},
        {"face", "face"},             {"faces", "face"},
    };
    auto it = table.find(word);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

bool object_name_like(std::string_view w) {
    const auto us = w.rfind('_');
    if (us == std::string_view::npos || us == 0 || us + 1 == w.size()) return false;
    for (std::size_t i = us + 1; i < w.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(w[i]))) return false;
    }
    for (std::size_t i = 0; i < us; ++i) {
        const char c = w[i];
        if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_')) {
            return false;
        }
    }
    return std::islower(static_cast<unsigned char>(w[0]));
}

Goal parse_instruction(std::string_view text) {
    std::vector<std::string> words = split_words(lowercase(trim(text)));
    if (words.empty()) uninterpretable(text, "empty instruction");
    while (!words.empty() && (words.back() == "." || words.back() == "!")) words.pop_back();
    if (!words.empty()) {
        std::string& last = words.back();
        while (!last.empty() && (last.back() == '.' || last.back() == '!')) last.pop_back();
    }
    Goal g;
    g.verb = words[0];
    if (!kVerbs.count(g.verb)) uninterpretable(text, "unknown verb \"" + g.verb + "\"");
    for (std::size_t i = 1; i < words.size(); ++i) {
        const std::string& w = words[i];
        if (w == "by") {
            if (i + 1 >= words.size()) uninterpretable(text, "\"by\" without a number");
            std::string_view num = words[++i];
            if (num.ends_with('%')) {
                g.percent = true;
                num.remove_suffix(1);
            }
            g.amount = parse_number(num);
            if (!g.amount) uninterpretable(text, "\"by\" without a number");
        } else if (w == "to") {
            if (i + 1 >= words.size()) uninterpretable(text, "\"to\" without a value");
            g.value = join(words, i + 1);
            break;
        } else if (!kFiller.count(w)) {
            g.selector.push_back(w);
        }
    }
    return g;
}

ActionStep goal_step(const Goal& g) {
    const std::string text = g.verb + " " + join(g.selector);
    ActionStep s;
    if (g.verb == "generate") {
        std::optional<std::string> cls;
        for (const std::string& w : g.selector) {
            if ((cls = class_word(w))) break;
        }
        if (!cls) uninterpretable(text, "nothing to generate");
        if (*cls == "city") {
            s.classname = "city_generation";
        } else if (*cls == "building") {
            s.classname = "building_generation";
        } else if (*cls == "road") {
            s.classname = "road_generation";
        } else if (*cls == "tree" || *cls == "streetlamp") {
            s.classname = "asset_placement";
            s.arguments["asset"] = *cls;
            if (g.amount) s.arguments["count"] = format_number(*g.amount);
        } else if (*cls == "cube") {
            s.classname = "cube_generation";
            if (g.amount) s.arguments["edge"] = format_number(*g.amount);
        } else if (*cls == "point" || *cls == "line" || *cls == "face") {
            s.classname = *cls + "_generation";
            if (g.amount) s.arguments["count"] = format_number(*g.amount);
        } else {
            uninterpretable(text, "cannot generate " + *cls);
        }
    } else if (g.verb == "scale") {
        if (!g.amount) uninterpretable(text, "scale needs \"by <factor>\"");
        const double f = g.percent ? 1.0 + *g.amount / 100.0 : *g.amount;
        s.classname = "scale_object";
        if (auto sel = object_selector(g, text)) s.arguments["scaled_obj_name"] = *sel;
        const std::string v = format_number(f);
        s.arguments["scale_factor"] = "(" + v + "," + v + "," + v + ")";
    } else if (g.verb == "raise") {
        if (!g.amount) uninterpretable(text, "raise needs \"by <amount>\"");
        s.classname = "raise_object";
        if (auto sel = object_selector(g, text)) s.arguments["obj_name"] = *sel;
        s.arguments["amount"] = magnitude(g);
    } else if (g.verb == "recolor") {
        if (!g.value) uninterpretable(text, "recolor needs \"to <color>\"");
        s.classname = "recolor_object";
        if (auto sel = object_selector(g, text)) s.arguments["obj_name"] = *sel;
        s.arguments["color"] = *g.value;
    } else if (g.verb == "place") {
        if (g.selector.empty()) uninterpretable(text, "nothing to place");
        s.classname = "asset_placement";
        s.arguments["asset"] = join(g.selector);
        if (g.amount) s.arguments["count"] = format_number(*g.amount);
    } else if (g.verb == "remove") {
        s.classname = "remove_object";
        if (auto sel = object_selector(g, text)) s.arguments["obj_name"] = *sel;
    } else if (g.verb == "set-style" || g.verb == "set-weather") {
        const std::string value = g.value ? *g.value : join(g.selector);
        if (value.empty()) uninterpretable(text, g.verb + " needs a value");
        if (g.verb == "set-style") {
            s.classname = "style_modification";
            s.arguments["style"] = value;
        } else {
            s.classname = "weather_adjustment";
            s.arguments["weather"] = value;
        }
    } else {
        uninterpretable(text, "unknown verb \"" + g.verb + "\"");
    }
    return s;
}

ActionStep RuleLanguageClient::interpret(Instruction& instruction, const protocol::ActionRegistry& registry,
                                         const GuidanceDoc&) const {
    instruction.goal = parse_instruction(instruction.text);
    ActionStep s = goal_step(*instruction.goal);
    if (!registry.contains(s.classname)) {
        uninterpretable(instruction.text, "no registered action " + s.classname);
    }
    return s;
}

}  // namespace cityforge::agents
