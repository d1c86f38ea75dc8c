#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <set>

#include "cityforge/agents/agents.hpp"
#include "cityforge/core/text.hpp"
#include "cityforge/geometry/mesh.hpp"

using namespace cityforge;
using namespace cityforge::agents;
using protocol::DataFormat;
using protocol::FormatSet;
using protocol::bit;

namespace {

const std::string kData = CITYFORGE_DATA_DIR;

AgentErrc error_kind(const std::function<void()>& f) {
    try {
        f();
    } catch (const AgentError& e) {
        return e.kind();
    }
    FAIL("no AgentError");
    return AgentErrc::ActionFailed;
}

SceneInputs semantic_inputs() {
    SceneInputs in;
    const std::string png = read_file(kData + "/semantic_sample.png");
    in.semantic_png = std::vector<std::uint8_t>(png.begin(), png.end());
    in.cell_size = 2.0;
    return in;
}

SceneInputs osm_inputs() {
    SceneInputs in;
    in.osm_xml = read_file(kData + "/sample.osm");
    return in;
}

const Engine& engine() {
    static const Engine e;
    return e;
}

struct Session {
    scene::SceneState state;
    MessagePool pool;
};

Session generated(const SceneInputs& in) {
    Session s{ingest(in), {}};
    engine().open_session(s.pool);
    const RunResult r = engine().run(s.state, s.pool, "generate city", s.state.data.semantic.get(), true);
    REQUIRE(r.committed);
    return s;
}

// Shortest applicable edge sequence by exhaustive depth-first enumeration.
std::optional<std::size_t> exhaustive_length(const std::vector<const protocol::ActionManifest*>& edges,
                                             FormatSet available, DataFormat target, std::size_t max_depth) {
    std::function<bool(FormatSet, std::size_t)> reach = [&](FormatSet have, std::size_t depth) {
        if (protocol::has(have, target)) return true;
        if (depth == 0) return false;
        for (const auto* e : edges) {
            if ((e->input_formats() & ~have) != 0 || !e->output) continue;
            if (reach(have | bit(*e->output), depth - 1)) return true;
        }
        return false;
    };
    for (std::size_t d = 0; d <= max_depth; ++d) {
        if (reach(available, d)) return d;
    }
    return std::nullopt;
}

raster::ClassGrid blank_grid(int w, int h) {
    raster::ClassGrid g;
    g.width = w;
    g.height = h;
    for (const auto& e : raster::default_palette().entries) g.labels.push_back(e.label);
    g.classes.assign(static_cast<std::size_t>(w * h), *g.class_of("ground"));
    return g;
}

void paint(raster::ClassGrid& g, int c0, int r0, int c1, int r1, const char* label) {
    for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) g.classes[static_cast<std::size_t>(r * g.width + c)] = *g.class_of(label);
    }
}

}  // namespace

// ------------------------------------------------------------------ pool

TEST_CASE("message pool sequence and bindings") {
    MessagePool p;
    CHECK(p.publish("a", "x", "{}") == 1);
    CHECK(p.publish("bindings", "executor", R"({"obj_name": "bldg_1"})") == 2);
    CHECK(p.publish("bindings", "executor", R"({"obj_name": "bldg_2", "n": "3"})") == 3);
    const auto all = p.entries();
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i].seq > all[i - 1].seq);
    CHECK(p.count("bindings") == 2);
    CHECK(p.binding("obj_name") == "bldg_2");
    CHECK(p.binding("n") == "3");
    CHECK_FALSE(p.binding("missing"));
    CHECK(pool_binding(p, "scaled_obj_name") == "bldg_2");

    MessagePool copy = p;
    copy.publish("z", "y", "{}");
    CHECK(p.size() == 3);
    CHECK(copy.size() == 4);
}

TEST_CASE("guidance documents") {
    const auto dir = std::filesystem::temp_directory_path() / "cityforge_guidance_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    write_file((dir / "planner.txt").string(), "  Plan carefully.\n");
    const Guidance g = load_guidance(dir.string());
    CHECK(g.planner.text == "Plan carefully.");
    CHECK(g.executor.text == default_guidance().executor.text);
    write_file((dir / "evaluator.txt").string(), "\n \n");
    CHECK_THROWS_AS(load_guidance(dir.string()), Error);
    std::filesystem::remove_all(dir);

    const Guidance shipped = load_guidance(kData + "/guidance");
    CHECK_FALSE(shipped.annotator.text.empty());
}

// ------------------------------------------------------------- annotator

TEST_CASE("annotator vocabulary over the builtins") {
    protocol::ActionRegistry reg;
    for (auto m : protocol::builtin_conversions()) reg.add(m, [](protocol::ActionCall&) {});
    MessagePool pool;
    const auto vocab = annotate(reg, pool);

    // keyword oracle: stems counted over the raw descriptions
    std::map<std::string, std::vector<std::string>> stems = {
        {"conversion", {"convert"}}, {"generation", {"generat"}}, {"retrieval", {"retriev"}},
        {"placement", {"plac"}},     {"extraction", {"extract"}}, {"meshing", {"mesh"}}};
    std::set<std::string> expected;
    for (const auto& [concept_name, ss] : stems) {
        std::size_t n = 0;
        for (const auto& m : protocol::builtin_conversions()) {
            std::string d = m.description + " " + m.classname;
            for (char& c : d) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            for (const auto& s : ss) {
                for (std::size_t at = d.find(s); at != std::string::npos; at = d.find(s, at + 1)) ++n;
            }
        }
        if (n >= 2) expected.insert(concept_name);
    }
    CHECK(std::set<std::string>(vocab.begin(), vocab.end()) == expected);
    CHECK(expected.size() == 6);

    const auto& tags = reg.manifest("point_to_face_conversion").tags;
    CHECK(std::find(tags.begin(), tags.end(), "conversion") != tags.end());
    const auto& t2 = reg.manifest("asset_mesh_retrieval").tags;
    CHECK(std::find(t2.begin(), t2.end(), "retrieval") != t2.end());
    CHECK(std::find(t2.begin(), t2.end(), "meshing") != t2.end());
    CHECK(pool.count("labels") == 1);

    protocol::ActionRegistry empty;
    MessagePool p2;
    CHECK(annotate(empty, p2).empty());
    CHECK(p2.size() == 0);
}

// --------------------------------------------------------------- grammar

TEST_CASE("instruction grammar") {
    const Goal g = parse_instruction("raise building bldg_3 by 10%");
    CHECK(g.verb == "raise");
    REQUIRE(g.amount);
    CHECK(*g.amount == 10.0);
    CHECK(g.percent);

    ActionStep s = goal_step(parse_instruction("scale building bldg_7 by 2"));
    CHECK(s.classname == "scale_object");
    CHECK(s.arguments.at("scaled_obj_name") == "bldg_7");
    CHECK(s.arguments.at("scale_factor") == "(2,2,2)");

    s = goal_step(parse_instruction("recolor all roads to gray"));
    CHECK(s.classname == "recolor_object");
    CHECK(s.arguments.at("obj_name") == "class:road");
    CHECK(s.arguments.at("color") == "gray");

    s = goal_step(parse_instruction("set-weather to fog"));
    CHECK(s.classname == "weather_adjustment");
    CHECK(s.arguments.at("weather") == "fog");

    s = goal_step(parse_instruction("scale it by 1.05"));
    CHECK_FALSE(s.arguments.count("scaled_obj_name"));

    CHECK(goal_step(parse_instruction("generate city")).classname == "city_generation");
    CHECK(goal_step(parse_instruction("generate buildings from this semantic map")).classname == "building_generation");
    CHECK(goal_step(parse_instruction("generate cube by 2")).arguments.at("edge") == "2");

    CHECK(error_kind([] { parse_instruction("frobnicate everything"); }) == AgentErrc::Uninterpretable);
    CHECK(error_kind([] { parse_instruction(""); }) == AgentErrc::Uninterpretable);
    CHECK(error_kind([] { parse_instruction("raise building bldg_3 by lots"); }) == AgentErrc::Uninterpretable);
}

// -------------------------------------------------------------- planning

TEST_CASE("vertices-to-faces workflow") {
    const auto& reg = engine().registry();
    const FormatSet avail = bit(DataFormat::Point) | bit(DataFormat::Image);
    const ActionStep goal = goal_step(parse_instruction("generate buildings from this semantic map"));
    MessagePool pool;
    const Workflow w = plan_workflow(reg, goal, avail, &pool);
    REQUIRE(w.steps.size() == 2);
    CHECK(w.steps[0].classname == "point_to_face_conversion");
    CHECK(w.steps[0].inserted);
    CHECK(w.steps[1].classname == "building_generation");
    CHECK(pool.count("workflow") == 1);

    const Workflow one = plan_workflow(reg, goal, bit(DataFormat::Surface));
    REQUIRE(one.steps.size() == 1);
    CHECK(one.steps[0].classname == "building_generation");
}

TEST_CASE("unsatisfiable goals") {
    protocol::ActionRegistry reg;
    protocol::ActionManifest m;
    m.classname = "needs_image";
    m.description = "Reads an image.";
    m.inputs = {{"img", DataFormat::Image, "image", std::nullopt}};
    m.output = DataFormat::SceneLayout;
    reg.add(m, [](protocol::ActionCall&) {});
    for (auto b : protocol::builtin_conversions()) reg.add(b, [](protocol::ActionCall&) {});
    ActionStep goal{"needs_image", {}, DataFormat::SceneLayout, false, false};
    CHECK(error_kind([&] { plan_workflow(reg, goal, bit(DataFormat::Point)); }) == AgentErrc::Unsatisfiable);
    const auto edges = conversion_edges(engine().registry());
    CHECK(error_kind([&] { shortest_chain(edges, bit(DataFormat::Color), DataFormat::ComplexGeometry); }) ==
          AgentErrc::Unsatisfiable);
}

TEST_CASE("next action prefers the shortest chain") {
    const auto& reg = engine().registry();
    Workflow w;
    w.steps.push_back({"building_generation", {}, DataFormat::ComplexGeometry, false, false});
    ActionStep a = next_action(reg, w, bit(DataFormat::Point));
    CHECK(a.classname == "point_to_face_conversion");
    CHECK(a.inserted);
    a = next_action(reg, w, bit(DataFormat::Surface));
    CHECK(a.classname == "building_generation");
    CHECK_FALSE(a.inserted);
    CHECK(error_kind([&] { next_action(reg, w, bit(DataFormat::Color)); }) == AgentErrc::Unsatisfiable);

    // only the two-step route exists without point_to_face
    std::vector<const protocol::ActionManifest*> edges;
    for (const auto* e : conversion_edges(reg)) {
        if (e->classname != "point_to_face_conversion") edges.push_back(e);
    }
    const auto chain = shortest_chain(edges, bit(DataFormat::Point), DataFormat::Surface);
    REQUIRE(chain.size() == 2);
    CHECK(chain[0]->classname == "point_to_line_conversion");
    CHECK(chain[1]->classname == "line_to_face_conversion");
}

TEST_CASE("chain lengths match exhaustive enumeration") {
    const auto edges = conversion_edges(engine().registry());
    const auto& fmts = protocol::all_formats();
    std::size_t checked = 0;
    for (std::size_t i = 0; i < fmts.size(); ++i) {
        for (std::size_t j = i; j < fmts.size(); ++j) {
            const FormatSet src = bit(fmts[i]) | bit(fmts[j]);
            for (DataFormat target : fmts) {
                const auto oracle = exhaustive_length(edges, src, target, 4);
                std::optional<std::size_t> got;
                try {
                    got = shortest_chain(edges, src, target).size();
                } catch (const AgentError&) {
                }
                if (got && *got > 4) got.reset();
                CHECK(got == oracle);
                ++checked;
            }
        }
    }
    CHECK(checked == 105 * 14);
}

// ------------------------------------------------------------- execution

TEST_CASE("scale_object doubles the bounding box") {
    Session s = generated(osm_inputs());
    ActionContext ctx{engine().config().library, nullptr, {}};
    const std::string name = "bldg_1";
    REQUIRE(s.state.objects.count(name));
    const geom::BBox3 before = scene::world_bounds(s.state.objects.at(name));
    const std::uint64_t rev = s.state.revision;
    ActionStep step{"scale_object", {{"scaled_obj_name", name}, {"scale_factor", "(2,2,2)"}}, std::nullopt, false, false};
    execute(engine().registry(), ctx, step, s.state, s.pool);
    const geom::BBox3 after = scene::world_bounds(s.state.objects.at(name));
    CHECK(after.max.x - after.min.x == doctest::Approx(2 * (before.max.x - before.min.x)).epsilon(1e-9));
    CHECK(after.max.y - after.min.y == doctest::Approx(2 * (before.max.y - before.min.y)).epsilon(1e-9));
    CHECK(after.max.z - after.min.z == doctest::Approx(2 * (before.max.z - before.min.z)).epsilon(1e-9));
    CHECK(s.state.revision == rev + 1);

    step.arguments["scaled_obj_name"] = "bldg_999999";
    const std::size_t traces = s.pool.count("trace");
    CHECK(error_kind([&] { execute(engine().registry(), ctx, step, s.state, s.pool); }) == AgentErrc::ActionFailed);
    CHECK(s.state.revision == rev + 1);
    CHECK(s.pool.count("trace") == traces);
    CHECK(s.pool.count("failures") >= 1);
}

TEST_CASE("cube_generation builds a unit cube") {
    scene::SceneState st;
    st.bounds = {-10, -10, 10, 10};
    MessagePool pool;
    ActionContext ctx{engine().config().library, nullptr, {}};
    const ExecutionRecord r = execute(engine().registry(), ctx,
                                      {"cube_generation", {{"edge", "1"}}, DataFormat::BasicGeometry, false, false}, st, pool);
    CHECK(r.produced == DataFormat::BasicGeometry);
    CHECK(protocol::has(st.available, DataFormat::BasicGeometry));
    REQUIRE(st.objects.count("cube_1"));
    const auto& mesh = *st.objects.at("cube_1").mesh;
    CHECK(mesh.positions.size() == 8);
    CHECK(geom::mesh_volume(mesh) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pool.binding("obj_name") == "cube_1");
    CHECK(st.revision == 1);
}

TEST_CASE("argument binding precedence and errors") {
    scene::SceneState st;
    st.bounds = {-10, -10, 10, 10};
    MessagePool pool;
    ActionContext ctx{engine().config().library, nullptr, {}};
    const auto& reg = engine().registry();
    execute(reg, ctx, {"cube_generation", {{"edge", "2"}}, std::nullopt, false, false}, st, pool);
    execute(reg, ctx, {"cube_generation", {{"edge", "1"}}, std::nullopt, false, false}, st, pool);
    // pool binding: the newest object
    const ExecutionRecord r =
        execute(reg, ctx, {"raise_object", {{"amount", "1"}}, std::nullopt, false, false}, st, pool);
    CHECK(r.arguments.at("obj_name") == "cube_2");
    // the instruction wins over the pool
    const ExecutionRecord r2 =
        execute(reg, ctx, {"raise_object", {{"obj_name", "cube_1"}, {"amount", "1"}}, std::nullopt, false, false}, st,
                pool);
    CHECK(r2.arguments.at("obj_name") == "cube_1");
    // nothing to bind
    MessagePool empty;
    scene::SceneState st2;
    CHECK(error_kind([&] {
              execute(reg, ctx, {"recolor_object", {{"color", "red"}}, std::nullopt, false, false}, st2, empty);
          }) == AgentErrc::ArgumentBinding);
}

// ------------------------------------------------------------ evaluation

TEST_CASE("evaluator identity and empty scene") {
    raster::ClassGrid ref = blank_grid(64, 48);
    paint(ref, 4, 4, 20, 16, "building");
    paint(ref, 30, 0, 36, 48, "road");
    paint(ref, 40, 20, 60, 44, "green");
    paint(ref, 44, 24, 52, 32, "water");
    const EvalReport id = evaluate(scene_from_grid(ref), &ref);
    CHECK(id.passed);
    for (const auto& [cls, v] : id.per_class_iou) CHECK(v == 1.0);
    CHECK(id.per_class_iou.size() == 4);

    scene::SceneState empty;
    empty.bounds = ref.extent();
    const EvalReport e = evaluate(empty, &ref);
    CHECK_FALSE(e.passed);
    CHECK(e.per_class_iou.at("building") == 0.0);

    // pure function of its inputs
    const EvalReport again = evaluate(scene_from_grid(ref), &ref);
    CHECK(again.per_class_iou == id.per_class_iou);
    CHECK(again.rendered->classes == id.rendered->classes);
}

TEST_CASE("half-covered buildings match a pixel-count oracle") {
    raster::ClassGrid ref = blank_grid(80, 60);
    const int boxes[][4] = {{2, 2, 12, 10}, {20, 5, 34, 19}, {40, 30, 50, 58}, {60, 10, 78, 20}};
    for (const auto& b : boxes) paint(ref, b[0], b[1], b[2], b[3], "building");
    scene::SceneState st;
    st.bounds = ref.extent();
    int k = 0;
    for (const auto& b : boxes) {
        const int mid = (b[0] + b[2]) / 2;
        // left half, in world coordinates (row 0 is the top edge)
        layout::Footprint fp;
        const double x0 = b[0], x1 = mid, y0 = ref.height - b[3], y1 = ref.height - b[1];
        fp.polygon = {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, {}};
        fp.height = 10;
        scene::SceneObject o = scene::building_object("bldg_" + std::to_string(++k), fp);
        st.objects.emplace(o.name, o);
    }
    const EvalReport rep = evaluate(st, &ref);
    const auto bcls = *ref.class_of("building");
    std::size_t inter = 0, uni = 0;
    for (int r = 0; r < ref.height; ++r) {
        for (int c = 0; c < ref.width; ++c) {
            const bool in_ref = ref.at(c, r) == bcls;
            bool in_scene = false;
            const geom::Point2 p = ref.pixel_center(c, r);
            for (const auto& b : boxes) {
                const int mid = (b[0] + b[2]) / 2;
                in_scene |= p.x > b[0] && p.x < mid && p.y > ref.height - b[3] && p.y < ref.height - b[1];
            }
            inter += in_ref && in_scene;
            uni += in_ref || in_scene;
        }
    }
    const double oracle = static_cast<double>(inter) / static_cast<double>(uni);
    CHECK(std::abs(rep.per_class_iou.at("building") - oracle) < 1e-9);
    CHECK(oracle == doctest::Approx(0.5));
    CHECK_FALSE(rep.passed);
}

TEST_CASE("structural checks") {
    scene::SceneState st;
    st.bounds = {0, 0, 100, 100};
    layout::Footprint a, b;
    a.polygon = {{{10, 10}, {30, 10}, {30, 30}, {10, 30}}, {}};
    b.polygon = {{{20, 20}, {40, 20}, {40, 40}, {20, 40}}, {}};
    st.objects.emplace("bldg_1", scene::building_object("bldg_1", a));
    CHECK(structural_violations(st).empty());
    st.objects.emplace("bldg_2", scene::building_object("bldg_2", b));
    CHECK(structural_violations(st).size() == 1);
    st.objects.erase("bldg_2");
    layout::Footprint out;
    out.polygon = {{{90, 90}, {120, 90}, {120, 120}, {90, 120}}, {}};
    st.objects.emplace("bldg_3", scene::building_object("bldg_3", out));
    CHECK(structural_violations(st).size() == 1);
    CHECK_FALSE(evaluate(st, nullptr).passed);
}

// ---------------------------------------------------------------- engine

TEST_CASE("semantic generation passes and the trace is format-sound") {
    Session s{ingest(semantic_inputs()), {}};
    engine().open_session(s.pool);
    const RunResult r = engine().run(s.state, s.pool, "generate city", s.state.data.semantic.get());
    REQUIRE(r.committed);
    CHECK(r.report.passed);
    CHECK(r.report.min_iou() >= 0.85);
    CHECK(r.report.min_iou() == evaluate(s.state, s.state.data.semantic.get()).min_iou());
    REQUIRE(r.workflow.steps.size() == 3);
    CHECK(r.workflow.steps.back().classname == "city_generation");

    // revision equals trace count; every step had its formats when it ran
    CHECK(s.state.revision == s.pool.count("trace"));
    FormatSet avail = ingest(semantic_inputs()).available;
    for (const ExecutionRecord& e : r.executions) {
        CAPTURE(e.classname);
        CHECK(e.available_before == avail);
        CHECK((e.required & ~e.available_before) == 0);
        if (e.produced) avail |= bit(*e.produced);
    }
    CHECK(avail == s.state.available);
}

TEST_CASE("edits, replanning and determinism") {
    Session s = generated(osm_inputs());
    const double h0 = scene::world_bounds(s.state.objects.at("bldg_3")).max.z;
    RunResult r = engine().run(s.state, s.pool, "raise building bldg_3 by 10%", nullptr);
    CHECK(r.committed);
    CHECK(r.proposed == 1);
    CHECK(r.correct == 1);
    const double h1 = scene::world_bounds(s.state.objects.at("bldg_3")).max.z;
    const double base = scene::world_bounds(s.state.objects.at("bldg_3")).min.z;
    CHECK((h1 - base) == doctest::Approx(1.1 * (h0 - base)).epsilon(1e-9));

    // a pronoun binds the last object
    r = engine().run(s.state, s.pool, "scale it by 1.05", nullptr);
    CHECK(r.committed);
    CHECK(r.proposed == 1);
    REQUIRE(r.executions.size() == 1);
    CHECK(r.executions[0].arguments.at("scaled_obj_name") == "bldg_3");

    // overlapping buildings fail every round; the state stays put
    const auto before = scene::export_glb(s.state).bytes;
    const std::uint64_t rev = s.state.revision;
    r = engine().run(s.state, s.pool, "scale all buildings by 3", nullptr);
    CHECK_FALSE(r.committed);
    CHECK(r.rounds == 3);
    CHECK_FALSE(r.report.passed);
    CHECK(r.correct < r.executed);
    CHECK(s.state.revision == rev);
    CHECK(scene::export_glb(s.state).bytes == before);
    CHECK(s.pool.count("evaluation") >= 3);
    // bounded: goal plus its chain per round
    CHECK(r.executed <= static_cast<std::size_t>(r.rounds) * 5);

    r = engine().run(s.state, s.pool, "frobnicate everything", nullptr);
    CHECK(r.error == AgentErrc::Uninterpretable);
    CHECK(r.proposed == 0);

    r = engine().run(s.state, s.pool, "set-style baroque", nullptr);
    CHECK(r.error == AgentErrc::ActionFailed);
    CHECK(r.executed == 0);
    CHECK(r.proposed == 1);

    // same inputs and seed give the same bytes
    Session a = generated(osm_inputs()), b = generated(osm_inputs());
    CHECK(scene::export_glb(a.state).bytes == scene::export_glb(b.state).bytes);
}

TEST_CASE("damped magnitudes") {
    ActionStep s{"scale_object", {{"scale_factor", "(3,3,3)"}, {"scaled_obj_name", "x"}}, std::nullopt, false, false};
    auto d = damped(s, 1);
    REQUIRE(d);
    CHECK(d->arguments.at("scale_factor") == "(2,2,2)");
    d = damped(s, 2);
    CHECK(d->arguments.at("scale_factor") == "(1.5,1.5,1.5)");
    ActionStep r{"raise_object", {{"amount", "20%"}}, std::nullopt, false, false};
    CHECK(damped(r, 1)->arguments.at("amount") == "10%");
    CHECK_FALSE(damped(ActionStep{"city_generation", {}, std::nullopt, false, false}, 1));
}

TEST_CASE("ingest rejects missing or conflicting layout inputs") {
    CHECK_THROWS_AS(ingest(SceneInputs{}), Error);
    SceneInputs both = semantic_inputs();
    both.osm_xml = read_file(kData + "/sample.osm");
    CHECK_THROWS_AS(ingest(both), Error);
    const scene::SceneState o = ingest(osm_inputs());
    CHECK(protocol::has(o.available, DataFormat::GeographicInformationData));
    CHECK(protocol::has(o.available, DataFormat::Line));
    const scene::SceneState sm = ingest(semantic_inputs());
    CHECK(protocol::has(sm.available, DataFormat::Point));
    CHECK(protocol::has(sm.available, DataFormat::Image));
    CHECK_FALSE(protocol::has(sm.available, DataFormat::Surface));
}

TEST_CASE("default library retrieval stays within kind") {
    const auto lib = default_library();
    for (const char* kind : {"tree", "streetlamp"}) {
        for (const auto& c : lib->top_k(lib->client().embed(kind), 10)) CHECK(lib->at(c.index).kind == kind);
    }
}
