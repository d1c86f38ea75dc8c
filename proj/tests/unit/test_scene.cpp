#include <doctest.h>

#include <json.hpp>

#include <cstring>
#include <sstream>

#include "cityforge/assets/assets.hpp"
#include "cityforge/geometry/polygon.hpp"
#include "cityforge/scene/scene.hpp"

using namespace cityforge;
using namespace cityforge::scene;
using nlohmann::json;

namespace {

std::uint32_t u32_at(const std::vector<std::uint8_t>& b, std::size_t at) {
    return std::uint32_t(b[at]) | std::uint32_t(b[at + 1]) << 8 | std::uint32_t(b[at + 2]) << 16 |
           std::uint32_t(b[at + 3]) << 24;
}

float f32_at(const std::vector<std::uint8_t>& b, std::size_t at) {
    const std::uint32_t u = u32_at(b, at);
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

// Minimal reader for the checks below, written against the container
// layout rather than the exporter.
struct Glb {
    json doc;
    std::vector<std::uint8_t> bin;
};

Glb read_glb(const std::vector<std::uint8_t>& b) {
    REQUIRE(b.size() >= 20);
    REQUIRE(std::string(b.begin(), b.begin() + 4) == "glTF");
    REQUIRE(u32_at(b, 4) == 2);
    REQUIRE(u32_at(b, 8) == b.size());
    const std::uint32_t jl = u32_at(b, 12);
    REQUIRE(u32_at(b, 16) == 0x4E4F534A);
    REQUIRE(jl % 4 == 0);
    Glb g;
    g.doc = json::parse(std::string(b.begin() + 20, b.begin() + 20 + jl));
    std::size_t at = 20 + jl;
    if (at < b.size()) {
        const std::uint32_t bl = u32_at(b, at);
        REQUIRE(u32_at(b, at + 4) == 0x004E4942);
        REQUIRE(bl % 4 == 0);
        REQUIRE(at + 8 + bl == b.size());
        g.bin.assign(b.begin() + static_cast<std::ptrdiff_t>(at + 8), b.end());
    }
    return g;
}

void check_structure(const Glb& g) {
    if (!g.doc.contains("buffers")) {
        CHECK(g.bin.empty());
        return;
    }
    const std::size_t blen = g.doc["buffers"][0]["byteLength"];
    CHECK(g.bin.size() == (blen + 3) / 4 * 4);
    for (const auto& v : g.doc["bufferViews"]) {
        const std::size_t off = v["byteOffset"], len = v["byteLength"];
        CHECK(off % 4 == 0);
        CHECK(off + len <= blen);
    }
    for (const auto& a : g.doc["accessors"]) {
        const auto& v = g.doc["bufferViews"][a["bufferView"].get<std::size_t>()];
        const std::size_t comps = a["type"] == "VEC3" ? 3 : 1;
        CHECK(a["count"].get<std::size_t>() * comps * 4 <= v["byteLength"].get<std::size_t>());
    }
}

layout::Footprint square(double x, double y, double s, double h) {
    layout::Footprint f;
    f.polygon = {{{x, y}, {x + s, y}, {x + s, y + s}, {x, y + s}}, {}};
    f.height = h;
    return f;
}

layout::CityLayout small_layout(bool green) {
    layout::CityLayout l;
    l.roads.vertices = {{0, 0}, {100, 0}, {100, 100}};
    l.roads.edges = {{0, 1, "residential", 8.0}, {1, 2, "primary", 12.0}};
    l.footprints = {square(10, 10, 10, 20), square(30, 10, 12, 9), square(50, 10, 8, 30)};
    if (green) l.areas.push_back({{{{10, 40}, {90, 40}, {90, 90}, {10, 90}}, {}}, "green"});
    l.bounds = {0, 0, 100, 100};
    return l;
}

geom::Mesh unit_cube() {
    geom::Mesh m;
    for (int i = 0; i < 8; ++i) m.positions.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
    const std::uint32_t f[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
    for (const auto& q : f) {
        m.triangles.push_back({q[0], q[1], q[2]});
        m.triangles.push_back({q[0], q[2], q[3]});
    }
    return m;
}

}  // namespace

TEST_CASE("instantiate counts objects") {
    const layout::CityLayout l = small_layout(false);
    const SceneState s = instantiate(l, nullptr, "modern", "clear", 1);
    CHECK(s.objects.size() == 5);
    CHECK(s.count_class("building") == 3);
    CHECK(s.count_class("road") == 2);
    for (const auto& [name, o] : s.objects) {
        if (o.semantic_class != "building") continue;
        REQUIRE(o.footprint);
        CHECK(world_bounds(o).max.z > 0.0);
    }
}

TEST_CASE("trees scatter on green areas at the Poisson-disk radius") {
    const SceneState s = instantiate(small_layout(true), nullptr, "modern", "clear", 7);
    const std::size_t trees = s.count_class("tree");
    CHECK(trees > 0);
    CHECK(s.objects.size() == 5 + 1 + trees);
    std::vector<geom::Point2> pts;
    for (const auto& [name, o] : s.objects) {
        if (o.semantic_class == "tree") pts.push_back({o.transform.translation.x, o.transform.translation.y});
    }
    const geom::Polygon green{{{10, 40}, {90, 40}, {90, 90}, {10, 90}}, {}};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(geom::contains(green, pts[i]));
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
            CHECK(std::sqrt(dx * dx + dy * dy) >= 6.0 - 1e-9);
        }
    }
}

TEST_CASE("style and weather presets") {
    const SceneState s = instantiate(small_layout(false), nullptr, "night city", "fog", 1);
    CHECK(s.environment.at("style") == "night");
    CHECK(s.environment.at("sun_elevation") == "-10");
    CHECK(s.environment.at("weather") == "fog");
    CHECK(std::stod(s.environment.at("fog_density")) > 0.0);
    CHECK(default_presets().style_for("something else").name == "modern");
    CHECK(default_presets().find_style("brick houses")->name == "traditional");
    CHECK(default_presets().find_style("xyz") == nullptr);

    const PresetTable back = parse_presets(presets_json(default_presets()));
    REQUIRE(back.styles.size() == default_presets().styles.size());
    REQUIRE(back.weathers.size() == default_presets().weathers.size());
    for (std::size_t i = 0; i < back.styles.size(); ++i) {
        CHECK(back.styles[i].name == default_presets().styles[i].name);
        CHECK(back.styles[i].sun_elevation == default_presets().styles[i].sun_elevation);
        CHECK(back.styles[i].keywords == default_presets().styles[i].keywords);
    }
}

TEST_CASE("instantiate is deterministic") {
    const SceneState a = instantiate(small_layout(true), nullptr, "traditional", "rain", 42);
    const SceneState b = instantiate(small_layout(true), nullptr, "traditional", "rain", 42);
    REQUIRE(a.objects.size() == b.objects.size());
    for (auto ia = a.objects.begin(), ib = b.objects.begin(); ia != a.objects.end(); ++ia, ++ib) {
        CHECK(ia->first == ib->first);
        CHECK(ia->second.transform == ib->second.transform);
        CHECK(ia->second.material == ib->second.material);
    }
    CHECK(export_glb(a).bytes == export_glb(b).bytes);
    CHECK(export_obj(a) == export_obj(b));
}

TEST_CASE("empty scene container") {
    const ExportBundle e = export_glb(SceneState{});
    const Glb g = read_glb(e.bytes);
    CHECK(g.doc["asset"]["version"] == "2.0");
    CHECK(g.doc["scenes"].size() == 1);
    CHECK_FALSE(g.doc.contains("meshes"));
    CHECK(g.bin.empty());
    CHECK(e.object_count == 0);
    CHECK(validate_glb(e.bytes).ok);
}

TEST_CASE("unit cube container") {
    SceneState s;
    SceneObject o;
    o.name = "cube_1";
    o.mesh = std::make_shared<const geom::Mesh>(unit_cube());
    o.semantic_class = "cube";
    s.objects.emplace(o.name, o);
    const ExportBundle e = export_glb(s);
    const Glb g = read_glb(e.bytes);
    check_structure(g);
    REQUIRE(g.doc["nodes"].size() == 1);
    const auto& prim = g.doc["meshes"][0]["primitives"][0];
    CHECK(g.doc["accessors"][prim["attributes"]["POSITION"].get<std::size_t>()]["count"] == 8);
    CHECK(g.doc["accessors"][prim["indices"].get<std::size_t>()]["count"] == 36);
    CHECK(e.triangle_count == 12);
}

TEST_CASE("container structure, extrema and triangle totals on a city") {
    assets::AssetLibrary lib;
    assets::generate_asset(lib, "tree", {}, 1);
    SceneState s = instantiate(small_layout(true), &lib, "modern", "clear", 3);
    const ExportBundle e = export_glb(s);
    const Glb g = read_glb(e.bytes);
    check_structure(g);

    // node order and triangle conservation
    std::vector<std::string> names;
    for (const auto& n : g.doc["nodes"]) names.push_back(n["name"]);
    CHECK(std::is_sorted(names.begin(), names.end()));
    CHECK(names.size() == s.objects.size());
    std::size_t tris = 0;
    for (const auto& n : g.doc["nodes"]) {
        if (!n.contains("mesh")) continue;
        const auto& prim = g.doc["meshes"][n["mesh"].get<std::size_t>()]["primitives"][0];
        tris += g.doc["accessors"][prim["indices"].get<std::size_t>()]["count"].get<std::size_t>() / 3;
    }
    CHECK(tris == s.triangle_count());
    CHECK(e.triangle_count == s.triangle_count());

    // POSITION min/max against the raw floats
    for (const auto& m : g.doc["meshes"]) {
        const auto& acc = g.doc["accessors"][m["primitives"][0]["attributes"]["POSITION"].get<std::size_t>()];
        const auto& view = g.doc["bufferViews"][acc["bufferView"].get<std::size_t>()];
        const std::size_t off = view["byteOffset"], count = acc["count"];
        float lo[3] = {INFINITY, INFINITY, INFINITY}, hi[3] = {-INFINITY, -INFINITY, -INFINITY};
        for (std::size_t i = 0; i < count; ++i) {
            for (int k = 0; k < 3; ++k) {
                const float f = f32_at(g.bin, off + 12 * i + 4 * static_cast<std::size_t>(k));
                lo[k] = std::min(lo[k], f);
                hi[k] = std::max(hi[k], f);
            }
        }
        for (int k = 0; k < 3; ++k) {
            CHECK(acc["min"][k].get<float>() == lo[k]);
            CHECK(acc["max"][k].get<float>() == hi[k]);
        }
        // index range
        const auto& ia = g.doc["accessors"][m["primitives"][0]["indices"].get<std::size_t>()];
        const auto& iv = g.doc["bufferViews"][ia["bufferView"].get<std::size_t>()];
        for (std::size_t i = 0; i < ia["count"].get<std::size_t>(); ++i)
            REQUIRE(u32_at(g.bin, iv["byteOffset"].get<std::size_t>() + 4 * i) < count);
    }
    const GlbReport r = validate_glb(e.bytes);
    CHECK(r.ok);
    CHECK(r.triangles == s.triangle_count());

    // corrupting the declared length is caught
    std::vector<std::uint8_t> bad = e.bytes;
    bad[8] ^= 0x10;
    CHECK_FALSE(validate_glb(bad).ok);
}

TEST_CASE("OBJ export re-imports") {
    SceneState one;
    SceneObject t;
    t.name = "tri";
    geom::Mesh m;
    m.positions = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    m.triangles = {{0, 1, 2}};
    t.mesh = std::make_shared<const geom::Mesh>(m);
    one.objects.emplace(t.name, t);
    const std::string obj = export_obj(one);
    std::size_t v = 0, f = 0;
    std::istringstream in(obj);
    for (std::string line; std::getline(in, line);) {
        v += line.starts_with("v ");
        f += line.starts_with("f ");
    }
    CHECK(v == 3);
    CHECK(f == 1);

    std::istringstream empty(export_obj(SceneState{}));
    for (std::string line; std::getline(empty, line);) CHECK((line.empty() || line[0] == '#'));

    // city: counts and 1-based indices in range
    const SceneState s = instantiate(small_layout(true), nullptr, "modern", "clear", 5);
    std::size_t verts = 0, faces = 0, groups = 0, expected_v = 0;
    for (const auto& [name, o] : s.objects) expected_v += o.mesh ? o.mesh->positions.size() : 0;
    std::istringstream city(export_obj(s));
    for (std::string line; std::getline(city, line);) {
        if (line.starts_with("v ")) ++verts;
        if (line.starts_with("o ")) ++groups;
        if (line.starts_with("f ")) {
            ++faces;
            std::istringstream fs(line.substr(2));
            for (std::string tok; fs >> tok;) {
                const long idx = std::stol(tok.substr(0, tok.find('/')));
                REQUIRE(idx >= 1);
                REQUIRE(static_cast<std::size_t>(idx) <= verts);
            }
        }
    }
    CHECK(verts == expected_v);
    CHECK(faces == s.triangle_count());
    CHECK(groups == s.objects.size());
}
