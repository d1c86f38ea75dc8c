#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "cityforge/core/text.hpp"
#include "cityforge/geometry/mesh.hpp"
#include "cityforge/geometry/polygon.hpp"
#include "cityforge/scene/scene.hpp"

namespace cityforge::scene {

using geom::Point2;
using geom::Vec3;

geom::Vec3 apply(const Transform& t, Vec3 p) {
    const double x = p.x * t.scale.x, y = p.y * t.scale.y, z = p.z * t.scale.z;
    const double c = std::cos(t.yaw), s = std::sin(t.yaw);
    return {c * x - s * y + t.translation.x, s * x + c * y + t.translation.y, z + t.translation.z};
}

geom::Mesh world_mesh(const SceneObject& obj) {
    geom::Mesh m;
    if (!obj.mesh) return m;
    m = *obj.mesh;
    const Transform& t = obj.transform;
    const double c = std::cos(t.yaw), s = std::sin(t.yaw);
    for (Vec3& p : m.positions) p = apply(t, p);
    for (Vec3& n : m.normals) {
        // inverse-transpose of the scale, then the rotation
        const Vec3 a{n.x / t.scale.x, n.y / t.scale.y, n.z / t.scale.z};
        const Vec3 r{c * a.x - s * a.y, s * a.x + c * a.y, a.z};
        const double len = geom::norm(r);
        n = len > 0 ? r * (1.0 / len) : Vec3{0, 0, 1};
    }
    return m;
}

geom::BBox3 world_bounds(const SceneObject& obj) {
    geom::BBox3 b;
    if (!obj.mesh) return b;
    for (const Vec3& p : obj.mesh->positions) b.expand(apply(obj.transform, p));
    return b;
}

std::optional<geom::Polygon> world_footprint(const SceneObject& obj) {
    if (!obj.footprint) return std::nullopt;
    auto map_ring = [&](const geom::Ring& r) {
        geom::Ring out;
        for (const Point2& p : r) {
            const Vec3 w = apply(obj.transform, {p.x, p.y, 0.0});
            out.push_back({w.x, w.y});
        }
        return out;
    };
    geom::Polygon out{map_ring(obj.footprint->outer), {}};
    for (const geom::Ring& h : obj.footprint->holes) out.holes.push_back(map_ring(h));
    return out;
}

std::string SceneState::unique_name(const std::string& prefix) const {
    for (std::size_t n = 1;; ++n) {
        std::string name = prefix + "_" + std::to_string(n);
        if (!objects.count(name)) return name;
    }
}

std::size_t SceneState::count_class(const std::string& semantic_class) const {
    std::size_t n = 0;
    for (const auto& [name, o] : objects) n += o.semantic_class == semantic_class;
    return n;
}

std::size_t SceneState::triangle_count() const {
    std::size_t n = 0;
    for (const auto& [name, o] : objects) n += o.mesh ? o.mesh->triangles.size() : 0;
    return n;
}

namespace {

std::vector<std::string> words_of(const std::string& text) {
    std::string cleaned;
    for (char c : lowercase(text)) cleaned += (std::isalnum(static_cast<unsigned char>(c)) ? c : ' ');
    return split_words(cleaned);
}

template <typename Preset>
const Preset* find_preset(const std::vector<Preset>& presets, const std::string& text) {
    const auto words = words_of(text);
    for (const Preset& p : presets) {
        for (const std::string& w : words) {
            if (w == p.name || std::find(p.keywords.begin(), p.keywords.end(), w) != p.keywords.end()) return &p;
        }
    }
    return nullptr;
}

Color3 tint(Color3 c, std::uint64_t seed, const std::string& name) {
    Rng rng(derive_seed(seed, "scene.tint:" + name));
    const double f = rng.uniform(0.92, 1.08);
    for (double& v : c) v = std::clamp(v * f, 0.0, 1.0);
    return c;
}

std::shared_ptr<const geom::Mesh> tree_mesh(const assets::AssetLibrary* library, std::uint64_t seed) {
    if (library && !library->empty()) {
        const assets::AssetRecord r = library->retrieve("tree", derive_seed(seed, "scene.tree_asset"));
        if (r.kind == "tree" && r.mesh) return r.mesh;
    }
    assets::AssetLibrary scratch;
    return assets::generate_asset(scratch, "tree", {}, derive_seed(seed, "scene.tree_asset")).mesh;
}

}  // namespace

const StylePreset* PresetTable::find_style(const std::string& text) const { return find_preset(styles, text); }
const WeatherPreset* PresetTable::find_weather(const std::string& text) const { return find_preset(weathers, text); }

const StylePreset& PresetTable::style_for(const std::string& text) const {
    const StylePreset* p = find_style(text);
    return p ? *p : styles.at(0);
}

const WeatherPreset& PresetTable::weather_for(const std::string& text) const {
    const WeatherPreset* p = find_weather(text);
    return p ? *p : weathers.at(0);
}

const PresetTable& default_presets() {
    static const PresetTable table = [] {
        PresetTable t;
        StylePreset modern;
        modern.name = "modern";
        modern.keywords = {"contemporary", "glass", "futuristic"};
        modern.building = {0.62, 0.66, 0.7};
        modern.building_roughness = 0.25;
        StylePreset traditional;
        traditional.name = "traditional";
        traditional.keywords = {"historic", "old", "brick", "classic"};
        traditional.building = {0.62, 0.32, 0.24};
        traditional.building_roughness = 0.85;
        traditional.road = {0.4, 0.37, 0.33};
        traditional.sun_elevation = 40.0;
        StylePreset night;
        night.name = "night";
        night.keywords = {"evening", "dark", "midnight"};
        night.building = {0.16, 0.17, 0.22};
        night.emissive = {0.45, 0.38, 0.2};
        night.road = {0.08, 0.08, 0.09};
        night.green = {0.06, 0.14, 0.07};
        night.water = {0.03, 0.06, 0.14};
        night.sun_elevation = -10.0;
        night.sun_azimuth = 300.0;
        t.styles = {modern, traditional, night};

        t.weathers = {
            {"clear", {"sunny", "fine"}, 0.0, 0.0, "none"},
            {"overcast", {"cloudy", "grey", "gray"}, 0.005, 0.8, "none"},
            {"fog", {"foggy", "mist", "misty", "haze", "hazy"}, 0.08, 0.6, "none"},
            {"rain", {"rainy", "storm", "stormy", "wet"}, 0.02, 0.9, "rain"},
            {"snow", {"snowy", "winter"}, 0.03, 0.85, "snow"},
        };
        return t;
    }();
    return table;
}

void apply_style(SceneState& state, const StylePreset& style, std::uint64_t seed) {
    for (auto& [name, o] : state.objects) {
        if (o.semantic_class == "building") {
            o.material = {"building", tint(style.building, seed, name), style.building_roughness, style.emissive};
        } else if (o.semantic_class == "road") {
            o.material = {"road", style.road, 0.9, {0, 0, 0}};
        } else if (o.semantic_class == "green") {
            o.material = {"green", style.green, 0.95, {0, 0, 0}};
        } else if (o.semantic_class == "water") {
            o.material = {"water", style.water, 0.1, {0, 0, 0}};
        }
    }
    state.environment["style"] = style.name;
    state.environment["sun_elevation"] = format_number(style.sun_elevation);
    state.environment["sun_azimuth"] = format_number(style.sun_azimuth);
}

void apply_weather(SceneState& state, const WeatherPreset& weather) {
    state.environment["weather"] = weather.name;
    state.environment["fog_density"] = format_number(weather.fog_density);
    state.environment["cloud_cover"] = format_number(weather.cloud_cover);
    state.environment["precipitation"] = weather.precipitation;
}

SceneObject building_object(const std::string& name, const layout::Footprint& fp) {
    const Point2 c = geom::ring_centroid(fp.polygon.outer);
    SceneObject o;
    o.name = name;
    o.semantic_class = "building";
    o.footprint = geom::translated(fp.polygon, Point2{-c.x, -c.y});
    auto mesh = geom::extrude(*o.footprint, fp.height);
    mesh.semantic_class = "building";
    o.mesh = std::make_shared<const geom::Mesh>(std::move(mesh));
    o.transform.translation = {c.x, c.y, fp.base};
    o.material.name = "building";
    return o;
}

SceneObject road_object(const std::string& name, Point2 a, Point2 b, double width, double z) {
    const Point2 mid = (a + b) * 0.5;
    SceneObject o;
    o.name = name;
    o.semantic_class = "road";
    auto mesh = geom::sweep_profile(geom::Polyline{{a - mid, b - mid}}, width);
    mesh.semantic_class = "road";
    o.mesh = std::make_shared<const geom::Mesh>(std::move(mesh));
    o.transform.translation = {mid.x, mid.y, z + 0.05};
    o.material.name = "road";
    return o;
}

SceneObject area_object(const std::string& name, const layout::SemanticArea& area) {
    const Point2 c = geom::ring_centroid(area.polygon.outer);
    SceneObject o;
    o.name = name;
    o.semantic_class = area.semantic_class;
    auto mesh = geom::flat_mesh(geom::translated(area.polygon, Point2{-c.x, -c.y}));
    mesh.semantic_class = area.semantic_class;
    o.mesh = std::make_shared<const geom::Mesh>(std::move(mesh));
    o.transform.translation = {c.x, c.y, 0.02};
    o.material.name = area.semantic_class;
    return o;
}

std::vector<Point2> poisson_disk(const geom::Polygon& poly, double radius, double clearance, Rng& rng,
                                 std::vector<Point2>& taken) {
    const geom::BBox box = geom::bbox(poly);
    const double cell = radius / std::sqrt(2.0);
    auto key = [&](Point2 p) {
        return std::pair<long, long>{static_cast<long>(std::floor((p.x - box.min_x) / cell)),
                                     static_cast<long>(std::floor((p.y - box.min_y) / cell))};
    };
    struct Hash {
        std::size_t operator()(const std::pair<long, long>& k) const {
            return std::hash<long>()(k.first * 73856093L ^ k.second * 19349663L);
        }
    };
    std::unordered_map<std::pair<long, long>, std::vector<Point2>, Hash> grid;
    for (const Point2& p : taken) {
        if (box.contains(p, radius)) grid[key(p)].push_back(p);
    }
    auto ok = [&](Point2 p) {
        if (!box.contains(p)) return false;
        const auto [kx, ky] = key(p);
        for (long dy = -2; dy <= 2; ++dy) {
            for (long dx = -2; dx <= 2; ++dx) {
                auto it = grid.find({kx + dx, ky + dy});
                if (it == grid.end()) continue;
                for (const Point2& q : it->second) {
                    if (geom::distance(p, q) < radius) return false;
                }
            }
        }
        return geom::locate(p, poly, 0.0) == geom::Location::Inside && geom::distance_to_boundary(p, poly) >= clearance;
    };

    std::vector<Point2> out, active;
    auto accept = [&](Point2 p) {
        out.push_back(p);
        active.push_back(p);
        grid[key(p)].push_back(p);
        taken.push_back(p);
    };
    for (int attempt = 0; attempt < 30 && out.empty(); ++attempt) {
        const Point2 p{rng.uniform(box.min_x, box.max_x), rng.uniform(box.min_y, box.max_y)};
        if (ok(p)) accept(p);
    }
    while (!active.empty()) {
        const std::size_t i = rng.below(active.size());
        const Point2 base = active[i];
        bool found = false;
        for (int k = 0; k < 30; ++k) {
            const double a = rng.uniform(0.0, 2.0 * M_PI);
            const double r = radius * (1.0 + rng.uniform());
            const Point2 p{base.x + r * std::cos(a), base.y + r * std::sin(a)};
            if (ok(p)) {
                accept(p);
                found = true;
                break;
            }
        }
        if (!found) {
            active[i] = active.back();
            active.pop_back();
        }
    }
    return out;
}

SceneState instantiate(const layout::CityLayout& layout, const assets::AssetLibrary* library, const std::string& style,
                       const std::string& weather, std::uint64_t seed, const PresetTable& presets,
                       const InstantiateOptions& options) {
    SceneState s;
    s.seed = seed;
    for (std::size_t i = 0; i < layout.footprints.size(); ++i) {
        SceneObject o = building_object("bldg_" + std::to_string(i + 1), layout.footprints[i]);
        s.objects.emplace(o.name, std::move(o));
    }
    const auto& g = layout.roads;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const auto& e = g.edges[i];
        double z = 0.0;
        if (layout.road_elevation.size() == g.vertices.size()) {
            z = 0.5 * (layout.road_elevation[e.a] + layout.road_elevation[e.b]);
        }
        SceneObject o = road_object("road_" + std::to_string(i + 1), g.vertices[e.a], g.vertices[e.b], e.width, z);
        s.objects.emplace(o.name, std::move(o));
    }
    std::map<std::string, std::size_t> area_count;
    for (const layout::SemanticArea& a : layout.areas) {
        SceneObject o = area_object(a.semantic_class + "_" + std::to_string(++area_count[a.semantic_class]), a);
        s.objects.emplace(o.name, std::move(o));
    }
    if (options.trees) {
        std::shared_ptr<const geom::Mesh> tree;
        double crown = 0.0;
        std::vector<Point2> taken;
        Rng rng(derive_seed(seed, "scene.trees"));
        std::size_t n = 0;
        for (const layout::SemanticArea& a : layout.areas) {
            if (a.semantic_class != "green") continue;
            if (!tree) {
                tree = tree_mesh(library, seed);
                const geom::BBox3 b = geom::bounds(*tree);
                crown = std::max({-b.min.x, b.max.x, -b.min.y, b.max.y});
            }
            for (const Point2& p : poisson_disk(a.polygon, options.tree_spacing, crown, rng, taken)) {
                bool clear = true;
                for (const layout::Footprint& fp : layout.footprints) {
                    if (geom::bbox(fp.polygon).contains(p, crown) &&
                        (geom::contains(fp.polygon, p) || geom::distance_to_boundary(p, fp.polygon) < crown)) {
                        clear = false;
                        break;
                    }
                }
                if (!clear) continue;
                SceneObject o;
                o.name = "tree_" + std::to_string(++n);
                o.semantic_class = "tree";
                o.mesh = tree;
                o.transform.translation = {p.x, p.y, 0.0};
                o.material = {"tree", {0.18, 0.45, 0.16}, 0.9, {0, 0, 0}};
                s.objects.emplace(o.name, std::move(o));
            }
        }
    }
    apply_style(s, presets.style_for(style), seed);
    apply_weather(s, presets.weather_for(weather));
    s.bounds = layout.bounds;
    for (const auto& [name, o] : s.objects) {
        const geom::BBox3 b = world_bounds(o);
        if (b.empty()) continue;
        s.bounds.expand(Point2{b.min.x, b.min.y});
        s.bounds.expand(Point2{b.max.x, b.max.y});
    }
    s.data.layout = std::make_shared<const layout::CityLayout>(layout);
    return s;
}

}  // namespace cityforge::scene
