#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "cityforge/agents/agents.hpp"
#include "cityforge/core/rng.hpp"
#include "cityforge/core/text.hpp"
#include "cityforge/geometry/mesh.hpp"
#include "cityforge/geometry/polygon.hpp"
#include "cityforge/geometry/split.hpp"
#include "cityforge/osm/osm.hpp"

namespace cityforge::protocol {

const std::string& ActionCall::arg(const std::string& name) const {
    auto it = args.find(name);
    if (it == args.end()) {
        throw agents::AgentError(agents::AgentErrc::ActionFailed, "", "missing argument " + name);
    }
    return it->second;
}

}  // namespace cityforge::protocol

namespace cityforge::agents {

using geom::Point2;
using protocol::ActionCall;
using protocol::ActionInput;
using protocol::ActionManifest;
using protocol::DataFormat;
using scene::SceneObject;
using scene::SceneState;

namespace {

constexpr const char* kWorkspace = "@workspace";

[[noreturn]] void fail(const std::string& reason) { throw AgentError(AgentErrc::ActionFailed, "", reason); }

double number(const std::string& s, const std::string& what) {
    std::string_view v = trim(s);
    if (v.starts_with('+')) v.remove_prefix(1);
    double out = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) fail(what + " is not a number: " + s);
    return out;
}

std::size_t count_arg(const ActionCall& call, const std::string& name, std::size_t max) {
    const double v = number(call.arg(name), name);
    if (v < 1.0 || v > static_cast<double>(max)) fail(name + " must be between 1 and " + std::to_string(max));
    return static_cast<std::size_t>(std::llround(v));
}

// "(a,b,c)", "a,b,c" or a single number applied to all three axes.
geom::Vec3 tuple3(const std::string& s, const std::string& what) {
    std::string t;
    for (char c : s) {
        if (c != '(' && c != ')' && c != ' ') t += c;
    }
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
        const auto comma = t.find(',', start);
        parts.push_back(number(t.substr(start, comma - start), what));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (parts.size() == 1) return {parts[0], parts[0], parts[0]};
    if (parts.size() != 3) fail(what + " needs 1 or 3 components: " + s);
    return {parts[0], parts[1], parts[2]};
}

std::uint64_t action_seed(const SceneState& s, std::string_view action) {
    return derive_seed(s.seed, "action." + std::string(action) + ":" + std::to_string(s.revision));
}

std::vector<std::string> select(const SceneState& s, const std::string& selector) {
    std::vector<std::string> out;
    if (selector.starts_with("class:")) {
        const std::string cls = selector.substr(6);
        for (const auto& [name, o] : s.objects) {
            if (o.semantic_class == cls) out.push_back(name);
        }
        if (out.empty()) fail("no " + cls + " objects in the scene");
        return out;
    }
    if (!s.objects.count(selector)) fail("object not found: " + selector);
    return {selector};
}

void expand_bounds(SceneState& s, const SceneObject& o) {
    const geom::BBox3 b = scene::world_bounds(o);
    if (b.empty()) return;
    s.bounds.expand(Point2{b.min.x, b.min.y});
    s.bounds.expand(Point2{b.max.x, b.max.y});
}

geom::BBox domain(const SceneState& s) {
    if (!s.bounds.empty() && s.bounds.width() > 0 && s.bounds.height() > 0) return s.bounds;
    return {0.0, 0.0, 100.0, 100.0};
}

std::string text_arg(const ActionCall& call, const std::string& name) {
    const std::string& v = call.arg(name);
    if (v == kWorkspace) {
        if (call.state.data.text.empty()) fail("no text in the workspace");
        return call.state.data.text;
    }
    return v;
}

const scene::PresetTable& presets(const ActionCall& call) {
    return call.context.presets ? *call.context.presets : scene::default_presets();
}

std::string env(const SceneState& s, const std::string& key) {
    auto it = s.environment.find(key);
    return it == s.environment.end() ? std::string() : it->second;
}

// ------------------------------------------------------------ layout helpers

layout::LayoutParams params_for(const SceneState& s, const ActionContext& ctx) {
    layout::LayoutParams p = ctx.layout_params;
    if (s.data.terrain) {
        p.terrain = *s.data.terrain;
        if (s.data.geodata) {
            const geom::BBox e = s.data.terrain->extent();
            p.terrain_origin = {-e.width() / 2, -e.height() / 2};
        }
    }
    if (s.data.semantic && !s.data.geodata) {
        // Semantic maps mark building pixels, so each building region is one
        // footprint rather than a block to subdivide.
        p.footprint_inset = 0.0;
        p.parcel_target_area = std::numeric_limits<double>::infinity();
    }
    return p;
}

std::vector<raster::Region> regions_of(const std::vector<layout::SemanticArea>& faces) {
    std::vector<raster::Region> out;
    for (const layout::SemanticArea& f : faces) {
        raster::Region r;
        r.polygon = f.polygon;
        r.unsimplified = f.polygon;
        r.label = f.semantic_class;
        out.push_back(std::move(r));
    }
    return out;
}

layout::CityLayout build_layout(const SceneState& s, const ActionContext& ctx) {
    const layout::LayoutParams p = params_for(s, ctx);
    if (s.data.geodata) return layout::assemble_from_osm(*s.data.geodata, s.seed, p);
    geom::BBox extent;
    if (s.data.semantic) {
        extent = s.data.semantic->extent();
    } else {
        for (const auto& f : s.data.faces) extent.expand(geom::bbox(f.polygon));
        for (const auto& l : s.data.lines) {
            for (Point2 q : l.line.points) extent.expand(q);
        }
    }
    return layout::assemble_from_regions(regions_of(s.data.faces), s.data.lines, extent, s.seed, p);
}

std::shared_ptr<const layout::CityLayout> current_layout(SceneState& s, const ActionContext& ctx) {
    if (!s.data.layout) s.data.layout = std::make_shared<const layout::CityLayout>(build_layout(s, ctx));
    return s.data.layout;
}

void erase_class(SceneState& s, const std::vector<std::string>& classes) {
    std::erase_if(s.objects, [&](const auto& kv) {
        return std::find(classes.begin(), classes.end(), kv.second.semantic_class) != classes.end();
    });
}

void restyle(SceneState& s, const ActionCall& call) {
    scene::apply_style(s, presets(call).style_for(env(s, "style")), s.seed);
}

// ------------------------------------------------------------ builtins

void point_to_face(ActionCall& call) {
    SceneState& s = call.state;
    std::vector<layout::SemanticArea> faces;
    if (s.data.semantic) {
        for (raster::Region& r : raster::vectorize_regions(*s.data.semantic)) {
            if (r.label == "ground" || r.label == "road") continue;
            faces.push_back({std::move(r.polygon), r.label});
        }
    } else if (s.data.points.size() >= 3) {
        geom::Ring hull = geom::convex_hull(s.data.points);
        if (hull.size() < 3 || geom::ring_signed_area(hull) <= geom::kEps) fail("points are collinear");
        faces.push_back({geom::Polygon{std::move(hull), {}}, "building"});
    } else {
        fail("no point data");
    }
    if (faces.empty()) fail("no labelled regions in the point layer");
    s.data.faces = std::move(faces);
    s.data.layout.reset();
}

void point_to_line(ActionCall& call) {
    SceneState& s = call.state;
    std::vector<layout::RoadInput> lines;
    if (s.data.semantic) {
        lines = layout::road_centerlines(*s.data.semantic);
        if (lines.empty()) fail("no road-class points");
    } else if (s.data.points.size() >= 2) {
        lines.push_back({geom::Polyline{s.data.points}, "residential", 8.0});
    } else {
        fail("no point data");
    }
    s.data.lines = std::move(lines);
    s.data.layout.reset();
}

void line_to_face(ActionCall& call) {
    SceneState& s = call.state;
    if (s.data.lines.empty()) fail("no lines");
    std::vector<layout::SemanticArea> faces;
    for (geom::Polygon& p : layout::graph_faces(layout::build_road_graph(s.data.lines))) {
        faces.push_back({std::move(p), "building"});
    }
    if (faces.empty()) fail("lines enclose no face");
    s.data.faces = std::move(faces);
    s.data.layout.reset();
}

void cube_generation(ActionCall& call) {
    SceneState& s = call.state;
    const double e = number(call.arg("edge"), "edge");
    if (e <= 0.0) fail("edge must be positive");
    SceneObject o;
    o.name = s.unique_name("cube");
    o.semantic_class = "cube";
    auto mesh = assets::box_mesh(0, 0, e, e, 0, e);
    mesh.semantic_class = "cube";
    o.mesh = std::make_shared<const geom::Mesh>(std::move(mesh));
    o.material = {"cube", {0.7, 0.7, 0.7}, 0.5, {0, 0, 0}};
    expand_bounds(s, o);
    s.data.primitives.push_back(o.name);
    call.published["obj_name"] = o.name;
    s.objects.emplace(o.name, std::move(o));
}

void point_generation(ActionCall& call) {
    SceneState& s = call.state;
    const std::size_t n = count_arg(call, "count", 10000);
    const geom::BBox d = domain(s);
    Rng rng(action_seed(s, "point_generation"));
    s.data.points.clear();
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform(d.min_x, d.max_x);
        const double y = rng.uniform(d.min_y, d.max_y);
        s.data.points.push_back({x, y});
    }
}

void line_generation(ActionCall& call) {
    SceneState& s = call.state;
    const std::size_t n = count_arg(call, "count", 1000);
    const geom::BBox d = domain(s);
    Rng rng(action_seed(s, "line_generation"));
    s.data.lines.clear();
    for (std::size_t i = 0; i < n; ++i) {
        const double ax = rng.uniform(d.min_x, d.max_x), ay = rng.uniform(d.min_y, d.max_y);
        const double bx = rng.uniform(d.min_x, d.max_x), by = rng.uniform(d.min_y, d.max_y);
        s.data.lines.push_back({geom::Polyline{{{ax, ay}, {bx, by}}}, "residential", 8.0});
    }
    s.data.layout.reset();
}

void face_generation(ActionCall& call) {
    SceneState& s = call.state;
    const std::size_t n = count_arg(call, "count", 1000);
    const geom::BBox d = domain(s);
    Rng rng(action_seed(s, "face_generation"));
    std::vector<geom::BBox> taken;
    std::vector<layout::SemanticArea> faces;
    for (std::size_t attempt = 0; attempt < 100 * n && faces.size() < n; ++attempt) {
        const double w = rng.uniform(10.0, 30.0), h = rng.uniform(10.0, 30.0);
        if (w > d.width() || h > d.height()) continue;
        const double x = rng.uniform(d.min_x, d.max_x - w), y = rng.uniform(d.min_y, d.max_y - h);
        const geom::BBox b{x, y, x + w, y + h};
        // 1 m gap keeps faces from touching.
        if (std::any_of(taken.begin(), taken.end(), [&](const geom::BBox& t) { return t.overlaps(b, 1.0); })) continue;
        taken.push_back(b);
        faces.push_back({geom::Polygon{{{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}}, {}}, "building"});
    }
    if (faces.empty()) fail("no room for faces");
    s.data.faces = std::move(faces);
    s.data.layout.reset();
}

std::shared_ptr<const geom::Mesh> placement_mesh(ActionCall& call, std::string& kind, scene::Material& material) {
    SceneState& s = call.state;
    const std::string& asset = call.arg("asset");
    if (asset == kWorkspace) {
        if (!s.data.asset) fail("no asset in the workspace");
        kind = "asset";
        if (s.data.material) material = *s.data.material;
        return s.data.asset;
    }
    if (!call.context.library || call.context.library->empty()) fail("asset library is empty");
    const assets::AssetRecord r = call.context.library->retrieve(asset, action_seed(s, "asset_placement.pick"));
    kind = r.kind == "building" ? "prop" : r.kind;
    material = {r.kind, r.material.base_color, r.material.roughness, {0, 0, 0}};
    s.data.asset_id = r.id;
    return r.mesh;
}

void asset_placement(ActionCall& call) {
    SceneState& s = call.state;
    const std::size_t n = count_arg(call, "count", 200);
    std::string kind;
    scene::Material material;
    const auto mesh = placement_mesh(call, kind, material);
    const geom::BBox3 mb = geom::bounds(*mesh);
    const double r = std::max({-mb.min.x, mb.max.x, -mb.min.y, mb.max.y, 0.1});
    if (s.bounds.empty()) fail("scene has no extent to place into");

    Rng rng(action_seed(s, "asset_placement"));
    std::vector<Point2> candidates;
    if (s.data.layout && !s.data.layout->roads.edges.empty()) {
        const auto& g = s.data.layout->roads;
        for (const layout::RoadEdge& e : g.edges) {
            const Point2 a = g.vertices[e.a], b = g.vertices[e.b];
            const double len = geom::distance(a, b);
            if (len <= 0.0) continue;
            const Point2 dir = (b - a) * (1.0 / len);
            const double off = e.width / 2 + r + 0.5;
            for (double t = 7.5; t < len; t += 15.0) {
                candidates.push_back(a + dir * t + geom::perp(dir) * off);
                candidates.push_back(a + dir * t - geom::perp(dir) * off);
            }
        }
    } else {
        for (int i = 0; i < 256; ++i) {
            candidates.push_back({rng.uniform(s.bounds.min_x, s.bounds.max_x), rng.uniform(s.bounds.min_y, s.bounds.max_y)});
        }
    }
    for (std::size_t i = candidates.size(); i > 1; --i) std::swap(candidates[i - 1], candidates[rng.below(i)]);

    std::vector<geom::Polygon> footprints;
    std::vector<Point2> occupied;
    for (const auto& [name, o] : s.objects) {
        if (auto fp = scene::world_footprint(o)) {
            footprints.push_back(std::move(*fp));
        } else if (o.semantic_class != "road" && o.semantic_class != "green" && o.semantic_class != "water") {
            occupied.push_back({o.transform.translation.x, o.transform.translation.y});
        }
    }
    std::vector<geom::BBox> fp_boxes;
    for (const auto& f : footprints) fp_boxes.push_back(geom::bbox(f));

    std::vector<std::string> placed;
    for (const Point2& p : candidates) {
        if (placed.size() >= n) break;
        if (p.x - r < s.bounds.min_x || p.x + r > s.bounds.max_x || p.y - r < s.bounds.min_y ||
            p.y + r > s.bounds.max_y) {
            continue;
        }
        bool clear = true;
        for (std::size_t k = 0; k < footprints.size() && clear; ++k) {
            if (!fp_boxes[k].contains(p, r)) continue;
            clear = !geom::contains(footprints[k], p) && geom::distance_to_boundary(p, footprints[k]) >= r;
        }
        for (const Point2& q : occupied) {
            if (!clear) break;
            clear = geom::distance(p, q) >= 2 * r;
        }
        if (!clear) continue;
        SceneObject o;
        o.name = s.unique_name(kind);
        o.semantic_class = kind;
        o.mesh = mesh;
        o.material = material;
        o.transform.translation = {p.x, p.y, 0.0};
        o.transform.yaw = rng.uniform(0.0, 2.0 * std::numbers::pi);
        occupied.push_back(p);
        placed.push_back(o.name);
        s.objects.emplace(o.name, std::move(o));
    }
    if (placed.empty()) fail("no free position for " + kind);
    call.published["obj_name"] = placed.front();
}

void osm_file_retrieval(ActionCall& call) {
    SceneState& s = call.state;
    const std::string path = text_arg(call, "path");
    std::string xml;
    try {
        xml = read_file(path);
    } catch (const Error& e) {
        fail(e.what());
    }
    const osm::OsmDocument doc = osm::parse_osm(xml);
    s.data.geodata = std::make_shared<const osm::LayerSet>(osm::classify_layers(doc, osm::bbox_origin(doc)));
    s.data.layout.reset();
}

void object_meshing(ActionCall& call) {
    SceneState& s = call.state;
    std::shared_ptr<const geom::Mesh> last;
    for (const std::string& name : s.data.primitives) {
        auto it = s.objects.find(name);
        if (it == s.objects.end()) continue;
        geom::Mesh m = *it->second.mesh;
        geom::compute_normals(m);
        if (!geom::is_closed(m)) fail("primitive " + name + " is not closed");
        last = std::make_shared<const geom::Mesh>(std::move(m));
        it->second.mesh = last;
        call.published["obj_name"] = name;
    }
    if (!last) fail("no primitive to mesh");
    s.data.asset = last;
    s.data.primitives.clear();
}

void texture_information_extraction(ActionCall& call) {
    SceneState& s = call.state;
    if (!s.data.material) fail("no material in the workspace");
    const scene::Material& m = *s.data.material;
    s.data.text = "base_color " + format_fixed(m.base_color[0], 3) + " " + format_fixed(m.base_color[1], 3) + " " +
                  format_fixed(m.base_color[2], 3) + " roughness " + format_fixed(m.roughness, 3);
}

assets::AssetRecord retrieve(ActionCall& call, std::string_view tag) {
    if (!call.context.library || call.context.library->empty()) fail("asset library is empty");
    return call.context.library->retrieve(text_arg(call, "query"), action_seed(call.state, tag));
}

void asset_material_retrieval(ActionCall& call) {
    const assets::AssetRecord r = retrieve(call, "asset_material_retrieval");
    call.state.data.material = scene::Material{r.id, r.material.base_color, r.material.roughness, {0, 0, 0}};
}

void asset_mesh_retrieval(ActionCall& call) {
    const assets::AssetRecord r = retrieve(call, "asset_mesh_retrieval");
    call.state.data.asset = r.mesh;
    call.state.data.asset_id = r.id;
}

void scene_object_information_extraction(ActionCall& call) {
    SceneState& s = call.state;
    std::map<std::string, std::size_t> per_class;
    for (const auto& [name, o] : s.objects) ++per_class[o.semantic_class];
    std::string t = std::to_string(s.objects.size()) + " objects";
    for (const auto& [cls, n] : per_class) t += "; " + cls + " " + std::to_string(n);
    if (!s.bounds.empty()) {
        t += "; bounds " + format_fixed(s.bounds.min_x, 2) + " " + format_fixed(s.bounds.min_y, 2) + " " +
             format_fixed(s.bounds.max_x, 2) + " " + format_fixed(s.bounds.max_y, 2);
    }
    s.data.text = std::move(t);
}

// ------------------------------------------------------------ scene actions

void city_generation(ActionCall& call) {
    SceneState& s = call.state;
    const layout::CityLayout lay = build_layout(s, call.context);
    std::string style = env(s, "style"), weather = env(s, "weather");
    SceneState fresh =
        scene::instantiate(lay, call.context.library.get(), style, weather, s.seed, presets(call), {});
    erase_class(s, {"building", "road", "green", "water", "tree"});
    s.bounds = fresh.bounds;
    for (auto& [name, o] : s.objects) expand_bounds(s, o);
    for (auto& [name, o] : fresh.objects) {
        if (s.objects.count(name)) fail("object name clash: " + name);
        s.objects.emplace(name, std::move(o));
    }
    for (auto& [k, v] : fresh.environment) s.environment[k] = v;
    s.data.layout = fresh.data.layout;
}

void building_generation(ActionCall& call) {
    SceneState& s = call.state;
    const auto lay = current_layout(s, call.context);
    if (lay->footprints.empty()) fail("faces leave no room for buildings");
    erase_class(s, {"building"});
    for (std::size_t i = 0; i < lay->footprints.size(); ++i) {
        SceneObject o = scene::building_object("bldg_" + std::to_string(i + 1), lay->footprints[i]);
        if (s.objects.count(o.name)) fail("object name clash: " + o.name);
        s.objects.emplace(o.name, std::move(o));
    }
    if (!lay->bounds.empty()) s.bounds.expand(lay->bounds);
    for (auto& [name, o] : s.objects) expand_bounds(s, o);
    restyle(s, call);
    s.data.asset = s.objects.at("bldg_1").mesh;
    call.published["obj_name"] = "bldg_1";
}

void road_generation(ActionCall& call) {
    SceneState& s = call.state;
    std::shared_ptr<const layout::CityLayout> lay = s.data.layout;
    if (!lay) {
        if (s.data.lines.empty()) fail("no lines");
        layout::CityLayout l;
        l.roads = layout::build_road_graph(s.data.lines);
        for (const Point2& v : l.roads.vertices) l.bounds.expand(v);
        lay = std::make_shared<const layout::CityLayout>(std::move(l));
    }
    const auto& g = lay->roads;
    if (g.edges.empty()) fail("lines form no road");
    erase_class(s, {"road"});
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const layout::RoadEdge& e = g.edges[i];
        double z = 0.0;
        if (lay->road_elevation.size() == g.vertices.size()) {
            z = 0.5 * (lay->road_elevation[e.a] + lay->road_elevation[e.b]);
        }
        SceneObject o = scene::road_object("road_" + std::to_string(i + 1), g.vertices[e.a], g.vertices[e.b], e.width, z);
        if (s.objects.count(o.name)) fail("object name clash: " + o.name);
        s.objects.emplace(o.name, std::move(o));
    }
    for (auto& [name, o] : s.objects) expand_bounds(s, o);
    restyle(s, call);
    s.data.asset = s.objects.at("road_1").mesh;
}

void scale_object(ActionCall& call) {
    SceneState& s = call.state;
    const geom::Vec3 f = tuple3(call.arg("scale_factor"), "scale_factor");
    if (f.x <= 0 || f.y <= 0 || f.z <= 0) fail("scale factors must be positive");
    const auto names = select(s, call.arg("scaled_obj_name"));
    for (const std::string& n : names) {
        geom::Vec3& sc = s.objects.at(n).transform.scale;
        sc = {sc.x * f.x, sc.y * f.y, sc.z * f.z};
    }
    s.data.asset = s.objects.at(names.front()).mesh;
    call.published["obj_name"] = names.front();
}

void raise_object(ActionCall& call) {
    SceneState& s = call.state;
    std::string amount = trim(call.arg("amount"));
    const bool percent = amount.ends_with('%');
    if (percent) amount.pop_back();
    const double a = number(amount, "amount");
    const auto names = select(s, call.arg("obj_name"));
    for (const std::string& n : names) {
        SceneObject& o = s.objects.at(n);
        const geom::BBox3 b = scene::world_bounds(o);
        const double h = b.empty() ? 0.0 : b.max.z - o.transform.translation.z;
        if (h <= 0.0) fail(n + " has no height");
        const double f = percent ? 1.0 + a / 100.0 : (h + a) / h;
        if (f <= 0.0) fail("cannot lower " + n + " below its base");
        o.transform.scale.z *= f;
    }
    s.data.asset = s.objects.at(names.front()).mesh;
    call.published["obj_name"] = names.front();
}

std::optional<scene::Color3> parse_color(const std::string& text) {
    static const std::map<std::string, scene::Color3, std::less<>> named = {
        {"red", {0.8, 0.1, 0.1}},      {"green", {0.2, 0.6, 0.2}},     {"blue", {0.15, 0.3, 0.8}},
        {"white", {0.95, 0.95, 0.95}}, {"black", {0.05, 0.05, 0.05}},  {"gray", {0.5, 0.5, 0.5}},
        {"grey", {0.5, 0.5, 0.5}},     {"yellow", {0.9, 0.8, 0.1}},    {"orange", {0.9, 0.5, 0.1}},
        {"brown", {0.45, 0.3, 0.15}},  {"beige", {0.85, 0.8, 0.65}},   {"purple", {0.5, 0.2, 0.6}},
        {"pink", {0.95, 0.6, 0.7}},    {"teal", {0.1, 0.5, 0.5}},      {"silver", {0.75, 0.75, 0.78}},
        {"gold", {0.85, 0.65, 0.15}},  {"cyan", {0.1, 0.8, 0.85}},     {"brick", {0.6, 0.25, 0.18}},
    };
    const std::string t = lowercase(trim(text));
    if (auto it = named.find(t); it != named.end()) return it->second;
    if (t.size() == 7 && t[0] == '#') {
        scene::Color3 c{};
        for (int i = 0; i < 3; ++i) {
            unsigned v = 0;
            auto [p, ec] = std::from_chars(t.data() + 1 + 2 * i, t.data() + 3 + 2 * i, v, 16);
            if (ec != std::errc() || p != t.data() + 3 + 2 * i) return std::nullopt;
            c[static_cast<std::size_t>(i)] = v / 255.0;
        }
        return c;
    }
    return std::nullopt;
}

void recolor_object(ActionCall& call) {
    SceneState& s = call.state;
    const auto color = parse_color(call.arg("color"));
    if (!color) fail("unknown color: " + call.arg("color"));
    const auto names = select(s, call.arg("obj_name"));
    for (const std::string& n : names) s.objects.at(n).material.base_color = *color;
    s.data.material = s.objects.at(names.front()).material;
    s.data.asset = s.objects.at(names.front()).mesh;
    call.published["obj_name"] = names.front();
}

void remove_object(ActionCall& call) {
    SceneState& s = call.state;
    for (const std::string& n : select(s, call.arg("obj_name"))) s.objects.erase(n);
}

void style_modification(ActionCall& call) {
    const scene::StylePreset* p = presets(call).find_style(call.arg("style"));
    if (!p) fail("unknown style: " + call.arg("style"));
    scene::apply_style(call.state, *p, call.state.seed);
}

void weather_adjustment(ActionCall& call) {
    const scene::WeatherPreset* p = presets(call).find_weather(call.arg("weather"));
    if (!p) fail("unknown weather: " + call.arg("weather"));
    scene::apply_weather(call.state, *p);
}

ActionManifest engine_action(std::string classname, std::string description, std::vector<ActionInput> inputs,
                             DataFormat output, std::string limitation) {
    ActionManifest m;
    m.run = "cityforge::actions::" + classname;
    m.classname = std::move(classname);
    m.description = std::move(description);
    m.inputs = std::move(inputs);
    m.output = output;
    m.limitation = std::move(limitation);
    return m;
}

}  // namespace

protocol::ActionRegistry make_registry() {
    using F = DataFormat;
    protocol::ActionRegistry reg;
    const std::map<std::string, protocol::ActionRegistry::Implementation> builtin = {
        {"point_to_face_conversion", point_to_face},
        {"cube_generation", cube_generation},
        {"point_generation", point_generation},
        {"line_generation", line_generation},
        {"face_generation", face_generation},
        {"line_to_face_conversion", line_to_face},
        {"asset_placement", asset_placement},
        {"point_to_line_conversion", point_to_line},
        {"osm_file_retrieval", osm_file_retrieval},
        {"object_meshing", object_meshing},
        {"texture_information_extraction", texture_information_extraction},
        {"asset_material_retrieval", asset_material_retrieval},
        {"asset_mesh_retrieval", asset_mesh_retrieval},
        {"scene_object_information_extraction", scene_object_information_extraction},
    };
    for (ActionManifest m : protocol::builtin_conversions()) {
        if (m.classname == "asset_placement") {
            m.inputs.push_back({"count", F::RandomNumber, "number of copies to place", "1"});
        }
        auto impl = builtin.at(m.classname);
        reg.add(std::move(m), std::move(impl));
    }
    auto in = [](std::string name, F f, std::string d) { return ActionInput{std::move(name), f, std::move(d), {}}; };
    reg.add(engine_action("city_generation", "Generating a city scene from faces and lines.",
                          {in("faces", F::Surface, "semantic faces"), in("lines", F::Line, "road center lines")},
                          F::SceneLayout, "Replaces the buildings, roads, areas and trees of the scene."),
            city_generation);
    reg.add(engine_action("building_generation", "Generating buildings on faces.",
                          {in("faces", F::Surface, "faces to build on")}, F::ComplexGeometry,
                          "Replaces the buildings of the scene."),
            building_generation);
    reg.add(engine_action("road_generation", "Generating road meshes along lines.",
                          {in("lines", F::Line, "road center lines")}, F::ComplexGeometry,
                          "Replaces the roads of the scene."),
            road_generation);
    reg.add(engine_action("scale_object", "Scale an object",
                          {in("scaled_obj_name", F::StringInformation, "scaled object name"),
                           in("scale_factor", F::Point, "scale factor")},
                          F::ComplexGeometry, "Scales about the object origin."),
            scale_object);
    reg.add(engine_action("raise_object", "Raise an object by meters or by a percentage of its height",
                          {in("obj_name", F::StringInformation, "object name or class:<class>"),
                           in("amount", F::RandomNumber, "meters, or percent with a trailing %")},
                          F::ComplexGeometry, "The base stays in place."),
            raise_object);
    reg.add(engine_action("recolor_object", "Recolor an object",
                          {in("obj_name", F::StringInformation, "object name or class:<class>"),
                           in("color", F::Color, "color name or #rrggbb")},
                          F::ComplexGeometry, "Changes the base color only."),
            recolor_object);
    reg.add(engine_action("remove_object", "Remove an object from the scene",
                          {in("obj_name", F::StringInformation, "object name or class:<class>")}, F::SceneLayout,
                          "Removed objects are gone from later revisions."),
            remove_object);
    reg.add(engine_action("style_modification", "Modify the style of the city",
                          {in("style", F::StringInformation, "style name or keyword")}, F::SceneLayout,
                          "Styles come from the preset table."),
            style_modification);
    reg.add(engine_action("weather_adjustment", "Adjust the weather of the scene",
                          {in("weather", F::StringInformation, "weather name or keyword")}, F::SceneLayout,
                          "Weathers come from the preset table."),
            weather_adjustment);
    return reg;
}

}  // namespace cityforge::agents
