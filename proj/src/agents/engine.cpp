#include <charconv>
#include <cmath>

#include "cityforge/agents/agents.hpp"
#include "cityforge/core/rng.hpp"
#include "cityforge/core/text.hpp"
#include "cityforge/osm/osm.hpp"
#include "payloads.hpp"

namespace cityforge::agents {

using protocol::DataFormat;

namespace {

std::optional<double> to_double(std::string_view s) {
    s = std::string_view(s).substr(0, s.size());
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s.starts_with('+')) s.remove_prefix(1);
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

const LanguageClient& rule_language() {
    static const RuleLanguageClient client;
    return client;
}

const VisionClient& rule_vision() {
    static const RuleVisionClient client;
    return client;
}

// Index of the pending workflow step equal to `s`, if any.
std::optional<std::size_t> pending_index(const Workflow& w, const ActionStep& s) {
    for (std::size_t i = 0; i < w.steps.size(); ++i) {
        const ActionStep& t = w.steps[i];
        if (!t.executed && t.classname == s.classname && t.arguments == s.arguments) return i;
    }
    return std::nullopt;
}

}  // namespace

std::shared_ptr<assets::AssetLibrary> default_library() {
    auto lib = std::make_shared<assets::AssetLibrary>();
    for (int i = 0; i < 12; ++i) {
        assets::AssetParams p;
        p.canopy_radius = 1.5 + 0.15 * i;
        p.canopy_height = 2.5 + 0.25 * (i % 5);
        p.trunk_height = 1.5 + 0.1 * (i % 4);
        assets::generate_asset(*lib, "tree", p, derive_seed(0, "catalog.tree:" + std::to_string(i)));
    }
    for (int i = 0; i < 12; ++i) {
        assets::AssetParams p;
        p.pole_height = 4.0 + 0.4 * i;
        p.arm_length = 1.0 + 0.1 * (i % 5);
        assets::generate_asset(*lib, "streetlamp", p, derive_seed(0, "catalog.streetlamp:" + std::to_string(i)));
    }
    for (int i = 0; i < 12; ++i) {
        assets::AssetParams p;
        p.width = 8.0 + 2.0 * (i % 4);
        p.depth = 8.0 + 3.0 * (i % 3);
        p.height = 9.0 + 6.0 * (i % 5);
        p.roof = i % 2 ? "gabled" : "flat";
        assets::generate_asset(*lib, "building", p, derive_seed(0, "catalog.building:" + std::to_string(i)));
    }
    return lib;
}

scene::SceneState ingest(const SceneInputs& in) {
    if (in.osm_xml && in.semantic_png) throw Error("give either an OSM file or a semantic map, not both");
    if (!in.osm_xml && !in.semantic_png) throw Error("no layout input: an OSM file or a semantic map is required");
    scene::SceneState s;
    s.seed = in.seed;
    if (in.osm_xml) {
        const osm::OsmDocument doc = osm::parse_osm(*in.osm_xml);
        auto layers = std::make_shared<const osm::LayerSet>(osm::classify_layers(doc, osm::bbox_origin(doc)));
        for (const osm::Road& r : layers->roads) s.data.lines.push_back({r.line, r.highway, r.width});
        for (const osm::Building& b : layers->buildings) s.data.faces.push_back({b.footprint, "building"});
        for (const geom::Polygon& w : layers->water) s.data.faces.push_back({w, "water"});
        for (const osm::Landuse& l : layers->landuse) s.data.faces.push_back({l.area, l.label});
        s.data.geodata = std::move(layers);
        s.available = protocol::format_set({DataFormat::GeographicInformationData, DataFormat::Surface, DataFormat::Line});
    } else {
        const auto& png = *in.semantic_png;
        auto grid = std::make_shared<const raster::ClassGrid>(
            in.satellite ? raster::quantize_satellite(png, in.palette, in.cell_size)
                         : raster::load_semantic_map(png, in.palette, in.cell_size));
        s.bounds = grid->extent();
        s.data.semantic = std::move(grid);
        s.available = protocol::format_set({DataFormat::Point, DataFormat::Image});
    }
    if (in.height_png) {
        s.data.terrain = std::make_shared<const raster::HeightGrid>(
            raster::load_height_png(*in.height_png, in.cell_size, in.height_scale));
    }
    if (!in.style.empty()) s.environment["style"] = in.style;
    if (!in.weather.empty()) s.environment["weather"] = in.weather;
    return s;
}

std::optional<ActionStep> damped(const ActionStep& step, int round) {
    const double k = std::ldexp(1.0, -round);
    ActionStep out = step;
    if (auto it = out.arguments.find("scale_factor"); it != out.arguments.end()) {
        std::string t;
        for (char c : it->second) {
            if (c != '(' && c != ')' && c != ' ') t += c;
        }
        std::string rebuilt;
        std::size_t start = 0;
        std::size_t parts = 0;
        while (true) {
            const auto comma = t.find(',', start);
            const auto v = to_double(std::string_view(t).substr(start, comma == std::string::npos ? std::string::npos
                                                                                                    : comma - start));
            if (!v) return std::nullopt;
            rebuilt += (parts++ ? "," : "") + format_number(1.0 + (*v - 1.0) * k);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        it->second = parts == 1 ? rebuilt : "(" + rebuilt + ")";
        return out;
    }
    if (auto it = out.arguments.find("amount"); it != out.arguments.end()) {
        std::string a = it->second;
        const bool percent = a.ends_with('%');
        if (percent) a.pop_back();
        const auto v = to_double(a);
        if (!v) return std::nullopt;
        it->second = format_number(*v * k) + (percent ? "%" : "");
        return out;
    }
    return std::nullopt;
}

Engine::Engine(EngineConfig config) : config_(std::move(config)), registry_(make_registry()) {
    if (!config_.library) config_.library = default_library();
    MessagePool scratch;
    vocabulary_ = annotate(registry_, scratch);
    labels_payload_ = scratch.entries().front().payload;
}

void Engine::open_session(MessagePool& pool) const { pool.publish("labels", "annotator", labels_payload_); }

RunResult Engine::run(scene::SceneState& state, MessagePool& pool, const std::string& text,
                      const raster::ClassGrid* reference, bool commit_failed) const {
    const LanguageClient& language = config_.language ? *config_.language : rule_language();
    const VisionClient& vision = config_.vision ? *config_.vision : rule_vision();
    RunResult r;
    r.instruction = text;
    auto record_error = [&](const AgentError& e, std::string_view producer) {
        r.error = e.kind();
        r.error_message = e.what();
        pool.publish("failures", std::string(producer), failure_payload(e.detail(), errc_label(e.kind()), e.what()));
    };

    Instruction instruction{text, std::nullopt};
    ActionStep goal;
    try {
        goal = language.interpret(instruction, registry_, config_.guidance.planner);
    } catch (const AgentError& e) {
        record_error(e, "planner");
        return r;
    }

    ActionContext ctx{config_.library, config_.presets, config_.layout_params};
    for (int round = 0; round <= config_.max_replans; ++round) {
        const std::optional<ActionStep> step = round == 0 ? std::optional<ActionStep>(goal) : damped(goal, round);
        if (!step) break;
        r.rounds = round + 1;
        scene::SceneState cand = state;
        MessagePool cpool = pool;
        Workflow w;
        try {
            w = plan_workflow(registry_, *step, cand.available, &cpool);
        } catch (const AgentError& e) {
            r.proposed += 1;  // the goal action itself
            record_error(e, "planner");
            return r;
        }
        r.proposed += w.steps.size();
        double prev = reference ? evaluate(cand, reference).min_iou() : 1.0;
        bool failed = false;
        while (!w.done() && !failed) {
            try {
                const ActionStep next = next_action(registry_, w, cand.available, &cpool);
                std::size_t idx = 0;
                if (auto i = pending_index(w, next)) {
                    idx = *i;
                } else {
                    idx = static_cast<std::size_t>(
                        std::find_if(w.steps.begin(), w.steps.end(), [](const ActionStep& s) { return !s.executed; }) -
                        w.steps.begin());
                    w.steps.insert(w.steps.begin() + static_cast<std::ptrdiff_t>(idx), next);
                    ++r.proposed;
                }
                r.executions.push_back(execute(registry_, ctx, w.steps[idx], cand, cpool));
                w.steps[idx].executed = true;
                ++r.executed;
                const EvalReport after = evaluate(cand, reference);
                if (after.violations.empty() && (!reference || after.min_iou() >= prev - 1e-12)) ++r.correct;
                prev = after.min_iou();
            } catch (const AgentError& e) {
                record_error(e, "executor");
                failed = true;
            }
        }
        r.workflow = w;
        if (failed) return r;

        r.report = vision.evaluate(cand, instruction, config_.guidance.evaluator, reference);
        const bool last = round == config_.max_replans || !damped(goal, round + 1);
        if (r.report.passed || (commit_failed && last)) {
            cpool.publish("evaluation", "evaluator", report_payload(r.report, round));
            state = std::move(cand);
            pool = cpool;
            r.committed = true;
            return r;
        }
        // Routed back to the planner for the next round.
        pool.publish("evaluation", "evaluator", report_payload(r.report, round));
    }
    return r;
}

}  // namespace cityforge::agents
