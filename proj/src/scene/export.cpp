#include <algorithm>
#include <cstring>
#include <json.hpp>
#include <sstream>

#include "cityforge/core/text.hpp"
#include "cityforge/geometry/mesh.hpp"
#include "cityforge/scene/scene.hpp"

namespace cityforge::scene {

using nlohmann::json;

namespace {

constexpr std::uint32_t kGlbMagic = 0x46546C67;
constexpr std::uint32_t kChunkJson = 0x4E4F534A;
constexpr std::uint32_t kChunkBin = 0x004E4942;

// Layout plane to Y up.
std::array<float, 3> y_up(const geom::Vec3& v) {
    return {static_cast<float>(v.x), static_cast<float>(v.z), static_cast<float>(-v.y)};
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::vector<std::uint8_t>& out, float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    put_u32(out, v);
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& b, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
    return v;
}

float get_f32(const std::vector<std::uint8_t>& b, std::size_t at) {
    const std::uint32_t v = get_u32(b, at);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
}

json color(const Color3& c) { return json::array({c[0], c[1], c[2]}); }

Color3 read_color(const json& j, const char* key, Color3 def) {
    if (!j.contains(key)) return def;
    return j.at(key).get<Color3>();
}

}  // namespace

PresetTable parse_presets(const std::string& text) {
    PresetTable t;
    try {
        const json j = json::parse(text);
        for (const json& s : j.at("styles")) {
            StylePreset p;
            p.name = s.at("name").get<std::string>();
            p.keywords = s.value("keywords", std::vector<std::string>{});
            p.building = read_color(s, "building", p.building);
            p.building_roughness = s.value("building_roughness", p.building_roughness);
            p.emissive = read_color(s, "emissive", p.emissive);
            p.road = read_color(s, "road", p.road);
            p.green = read_color(s, "green", p.green);
            p.water = read_color(s, "water", p.water);
            p.sun_elevation = s.value("sun_elevation", p.sun_elevation);
            p.sun_azimuth = s.value("sun_azimuth", p.sun_azimuth);
            t.styles.push_back(std::move(p));
        }
        for (const json& w : j.at("weathers")) {
            WeatherPreset p;
            p.name = w.at("name").get<std::string>();
            p.keywords = w.value("keywords", std::vector<std::string>{});
            p.fog_density = w.value("fog_density", 0.0);
            p.cloud_cover = w.value("cloud_cover", 0.0);
            p.precipitation = w.value("precipitation", std::string("none"));
            t.weathers.push_back(std::move(p));
        }
    } catch (const json::exception& e) {
        throw Error(std::string("bad preset table: ") + e.what());
    }
    if (t.styles.empty() || t.weathers.empty()) throw Error("preset table needs at least one style and one weather");
    return t;
}

std::string presets_json(const PresetTable& table) {
    json j;
    j["styles"] = json::array();
    for (const StylePreset& p : table.styles) {
        j["styles"].push_back({{"name", p.name},
                               {"keywords", p.keywords},
                               {"building", color(p.building)},
                               {"building_roughness", p.building_roughness},
                               {"emissive", color(p.emissive)},
                               {"road", color(p.road)},
                               {"green", color(p.green)},
                               {"water", color(p.water)},
                               {"sun_elevation", p.sun_elevation},
                               {"sun_azimuth", p.sun_azimuth}});
    }
    j["weathers"] = json::array();
    for (const WeatherPreset& p : table.weathers) {
        j["weathers"].push_back({{"name", p.name},
                                 {"keywords", p.keywords},
                                 {"fog_density", p.fog_density},
                                 {"cloud_cover", p.cloud_cover},
                                 {"precipitation", p.precipitation}});
    }
    return j.dump(2);
}

ExportBundle export_glb(const SceneState& state) {
    json doc;
    doc["asset"] = {{"version", "2.0"}, {"generator", "cityforge"}};
    doc["scene"] = 0;
    json scene_entry = {{"name", "city"}, {"extras", state.environment}};

    std::vector<std::uint8_t> bin;
    json nodes = json::array(), meshes = json::array(), materials = json::array(), accessors = json::array(),
         views = json::array();
    std::vector<Material> material_list;
    std::map<std::pair<const geom::Mesh*, std::size_t>, std::size_t> mesh_index;
    std::size_t triangles = 0;

    auto add_view = [&](std::size_t offset, std::size_t length, int target) {
        views.push_back({{"buffer", 0}, {"byteOffset", offset}, {"byteLength", length}, {"target", target}});
        return views.size() - 1;
    };

    for (const auto& [name, obj] : state.objects) {
        json node = {{"name", name}, {"extras", {{"semantic_class", obj.semantic_class}}}};
        const auto t = y_up(obj.transform.translation);
        node["translation"] = {t[0], t[1], t[2]};
        if (obj.transform.yaw != 0.0) {
            node["rotation"] = {0.0, std::sin(obj.transform.yaw / 2), 0.0, std::cos(obj.transform.yaw / 2)};
        }
        const geom::Vec3& s = obj.transform.scale;
        if (s.x != 1.0 || s.y != 1.0 || s.z != 1.0) node["scale"] = {s.x, s.z, s.y};

        if (obj.mesh && !obj.mesh->triangles.empty()) {
            auto mit = std::find(material_list.begin(), material_list.end(), obj.material);
            const std::size_t mat = static_cast<std::size_t>(mit - material_list.begin());
            if (mit == material_list.end()) {
                material_list.push_back(obj.material);
                const Material& m = obj.material;
                json jm = {{"name", m.name},
                           {"pbrMetallicRoughness",
                            {{"baseColorFactor", {m.base_color[0], m.base_color[1], m.base_color[2], 1.0}},
                             {"metallicFactor", 0.0},
                             {"roughnessFactor", m.roughness}}}};
                if (m.emissive != Color3{0, 0, 0}) jm["emissiveFactor"] = color(m.emissive);
                materials.push_back(std::move(jm));
            }
            const auto key = std::make_pair(obj.mesh.get(), mat);
            auto it = mesh_index.find(key);
            if (it == mesh_index.end()) {
                geom::Mesh mesh = *obj.mesh;
                if (mesh.normals.size() != mesh.positions.size()) geom::compute_normals(mesh);
                std::array<float, 3> lo{INFINITY, INFINITY, INFINITY}, hi{-INFINITY, -INFINITY, -INFINITY};
                const std::size_t pos_off = bin.size();
                for (const geom::Vec3& p : mesh.positions) {
                    const auto f = y_up(p);
                    for (int k = 0; k < 3; ++k) {
                        lo[k] = std::min(lo[k], f[k]);
                        hi[k] = std::max(hi[k], f[k]);
                        put_f32(bin, f[k]);
                    }
                }
                const std::size_t nrm_off = bin.size();
                for (const geom::Vec3& n : mesh.normals) {
                    for (float f : y_up(n)) put_f32(bin, f);
                }
                const std::size_t idx_off = bin.size();
                for (const geom::TriIndex& tri : mesh.triangles) {
                    for (std::uint32_t v : tri) put_u32(bin, v);
                }
                const std::size_t count = mesh.positions.size();
                const std::size_t pv = add_view(pos_off, nrm_off - pos_off, 34962);
                const std::size_t nv = add_view(nrm_off, idx_off - nrm_off, 34962);
                const std::size_t iv = add_view(idx_off, bin.size() - idx_off, 34963);
                accessors.push_back({{"bufferView", pv},
                                     {"componentType", 5126},
                                     {"count", count},
                                     {"type", "VEC3"},
                                     {"min", {lo[0], lo[1], lo[2]}},
                                     {"max", {hi[0], hi[1], hi[2]}}});
                accessors.push_back({{"bufferView", nv}, {"componentType", 5126}, {"count", count}, {"type", "VEC3"}});
                accessors.push_back({{"bufferView", iv},
                                     {"componentType", 5125},
                                     {"count", 3 * mesh.triangles.size()},
                                     {"type", "SCALAR"}});
                const std::size_t a0 = accessors.size() - 3;
                meshes.push_back({{"name", name},
                                  {"primitives",
                                   {{{"attributes", {{"POSITION", a0}, {"NORMAL", a0 + 1}}},
                                     {"indices", a0 + 2},
                                     {"material", mat},
                                     {"mode", 4}}}}});
                it = mesh_index.emplace(key, meshes.size() - 1).first;
            }
            node["mesh"] = it->second;
            triangles += obj.mesh->triangles.size();
        }
        nodes.push_back(std::move(node));
    }

    if (!nodes.empty()) {
        json ids = json::array();
        for (std::size_t i = 0; i < nodes.size(); ++i) ids.push_back(i);
        scene_entry["nodes"] = std::move(ids);
        doc["nodes"] = std::move(nodes);
    }
    doc["scenes"] = json::array({std::move(scene_entry)});
    if (!meshes.empty()) {
        doc["meshes"] = std::move(meshes);
        doc["materials"] = std::move(materials);
        doc["accessors"] = std::move(accessors);
        doc["bufferViews"] = std::move(views);
        doc["buffers"] = json::array({{{"byteLength", bin.size()}}});
    }

    std::string text = doc.dump();
    while (text.size() % 4) text += ' ';
    while (bin.size() % 4) bin.push_back(0);

    ExportBundle out;
    const bool has_bin = !bin.empty();
    const std::size_t total = 12 + 8 + text.size() + (has_bin ? 8 + bin.size() : 0);
    out.bytes.reserve(total);
    put_u32(out.bytes, kGlbMagic);
    put_u32(out.bytes, 2);
    put_u32(out.bytes, static_cast<std::uint32_t>(total));
    put_u32(out.bytes, static_cast<std::uint32_t>(text.size()));
    put_u32(out.bytes, kChunkJson);
    out.bytes.insert(out.bytes.end(), text.begin(), text.end());
    if (has_bin) {
        put_u32(out.bytes, static_cast<std::uint32_t>(bin.size()));
        put_u32(out.bytes, kChunkBin);
        out.bytes.insert(out.bytes.end(), bin.begin(), bin.end());
    }
    out.object_count = state.objects.size();
    out.triangle_count = triangles;
    out.byte_length = out.bytes.size();
    return out;
}

std::string export_obj(const SceneState& state) {
    std::ostringstream os;
    os << "# cityforge scene\n# objects " << state.objects.size() << "\n";
    std::size_t base = 1;
    for (const auto& [name, obj] : state.objects) {
        const geom::Mesh m = world_mesh(obj);
        os << "o " << name << "\n";
        for (const geom::Vec3& p : m.positions) {
            os << "v " << format_number(p.x) << ' ' << format_number(p.z) << ' ' << format_number(-p.y) << "\n";
        }
        for (const geom::TriIndex& t : m.triangles) {
            os << "f " << base + t[0] << ' ' << base + t[1] << ' ' << base + t[2] << "\n";
        }
        base += m.positions.size();
    }
    return os.str();
}

GlbReport validate_glb(const std::vector<std::uint8_t>& b) {
    GlbReport r;
    auto err = [&](const std::string& e) { r.errors.push_back(e); };
    if (b.size() < 20) {
        err("container shorter than header");
        return r;
    }
    if (get_u32(b, 0) != kGlbMagic) err("bad magic");
    if (get_u32(b, 4) != 2) err("version is not 2");
    if (get_u32(b, 8) != b.size()) err("declared length differs from byte count");
    const std::size_t json_len = get_u32(b, 12);
    if (get_u32(b, 16) != kChunkJson) err("first chunk is not JSON");
    if (json_len % 4 != 0) err("JSON chunk not 4-byte aligned");
    if (20 + json_len > b.size()) {
        err("JSON chunk overruns container");
        return r;
    }
    r.json_length = json_len;
    std::size_t bin_at = 0, bin_len = 0;
    const std::size_t after = 20 + json_len;
    if (after < b.size()) {
        if (after + 8 > b.size()) {
            err("truncated BIN chunk header");
            return r;
        }
        bin_len = get_u32(b, after);
        if (get_u32(b, after + 4) != kChunkBin) err("second chunk is not BIN");
        if (bin_len % 4 != 0) err("BIN chunk not 4-byte aligned");
        bin_at = after + 8;
        if (bin_at + bin_len != b.size()) err("BIN chunk length does not reach the end of the container");
        r.bin_length = bin_len;
    }
    json doc;
    try {
        doc = json::parse(b.begin() + 20, b.begin() + 20 + static_cast<std::ptrdiff_t>(json_len));
    } catch (const json::exception& e) {
        err(std::string("JSON chunk does not parse: ") + e.what());
        return r;
    }
    if (doc.value("/asset/version"_json_pointer, std::string()) != "2.0") err("asset.version is not 2.0");

    std::size_t buffer_len = 0;
    if (doc.contains("buffers")) {
        if (doc["buffers"].size() != 1) err("expected exactly one buffer");
        buffer_len = doc["buffers"][0].value("byteLength", std::size_t{0});
        if ((buffer_len + 3) / 4 * 4 != bin_len) err("buffer byteLength does not match BIN chunk");
    } else if (bin_len != 0) {
        err("BIN chunk without buffer");
    }
    const json views = doc.value("bufferViews", json::array());
    for (std::size_t i = 0; i < views.size(); ++i) {
        const std::size_t off = views[i].value("byteOffset", std::size_t{0});
        const std::size_t len = views[i].value("byteLength", std::size_t{0});
        if (off % 4 != 0) err("bufferView " + std::to_string(i) + " not 4-byte aligned");
        if (off + len > buffer_len) err("bufferView " + std::to_string(i) + " exceeds buffer");
    }
    const json accessors = doc.value("accessors", json::array());
    auto comps = [](const std::string& type) -> std::size_t { return type == "VEC3" ? 3 : type == "SCALAR" ? 1 : 0; };
    auto accessor_ok = [&](std::size_t i) {
        if (i >= accessors.size()) return false;
        const json& a = accessors[i];
        const std::size_t view = a.value("bufferView", views.size());
        if (view >= views.size()) return false;
        const std::size_t elem = 4 * comps(a.value("type", std::string()));
        const std::size_t need = a.value("byteOffset", std::size_t{0}) + elem * a.value("count", std::size_t{0});
        return elem != 0 && need <= views[view].value("byteLength", std::size_t{0});
    };
    for (std::size_t i = 0; i < accessors.size(); ++i) {
        if (!accessor_ok(i)) err("accessor " + std::to_string(i) + " does not fit its bufferView");
    }
    if (!r.errors.empty()) return r;

    auto data_at = [&](const json& a) {
        const json& v = views[a["bufferView"].get<std::size_t>()];
        return bin_at + v.value("byteOffset", std::size_t{0}) + a.value("byteOffset", std::size_t{0});
    };
    const json meshes = doc.value("meshes", json::array());
    std::vector<std::size_t> mesh_triangles(meshes.size(), 0);
    for (std::size_t m = 0; m < meshes.size(); ++m) {
        for (const json& prim : meshes[m].value("primitives", json::array())) {
            const std::size_t pa = prim["attributes"].value("POSITION", accessors.size());
            const std::size_t ia = prim.value("indices", accessors.size());
            if (pa >= accessors.size() || ia >= accessors.size()) {
                err("mesh " + std::to_string(m) + " references a missing accessor");
                continue;
            }
            const std::size_t mat = prim.value("material", std::size_t{0});
            if (prim.contains("material") && mat >= doc.value("materials", json::array()).size()) {
                err("mesh " + std::to_string(m) + " references a missing material");
            }
            const json& pos = accessors[pa];
            const std::size_t count = pos["count"].get<std::size_t>();
            std::array<float, 3> lo{INFINITY, INFINITY, INFINITY}, hi{-INFINITY, -INFINITY, -INFINITY};
            const std::size_t at = data_at(pos);
            for (std::size_t v = 0; v < count; ++v) {
                for (int k = 0; k < 3; ++k) {
                    const float f = get_f32(b, at + 12 * v + 4 * static_cast<std::size_t>(k));
                    lo[k] = std::min(lo[k], f);
                    hi[k] = std::max(hi[k], f);
                }
            }
            for (int k = 0; k < 3; ++k) {
                if (!pos.contains("min") || static_cast<float>(pos["min"][k].get<double>()) != lo[k] ||
                    static_cast<float>(pos["max"][k].get<double>()) != hi[k]) {
                    err("mesh " + std::to_string(m) + " POSITION min/max differ from the data");
                    break;
                }
            }
            const json& idx = accessors[ia];
            const std::size_t n = idx["count"].get<std::size_t>();
            if (n % 3 != 0) err("mesh " + std::to_string(m) + " index count not a multiple of 3");
            const std::size_t iat = data_at(idx);
            for (std::size_t i = 0; i < n; ++i) {
                if (get_u32(b, iat + 4 * i) >= count) {
                    err("mesh " + std::to_string(m) + " index out of range");
                    break;
                }
            }
            mesh_triangles[m] += n / 3;
        }
    }
    const json nodes = doc.value("nodes", json::array());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        r.node_names.push_back(nodes[i].value("name", std::string()));
        if (nodes[i].contains("mesh")) {
            const std::size_t m = nodes[i]["mesh"].get<std::size_t>();
            if (m >= meshes.size()) {
                err("node " + std::to_string(i) + " references a missing mesh");
            } else {
                r.triangles += mesh_triangles[m];
            }
        }
    }
    if (!std::is_sorted(r.node_names.begin(), r.node_names.end())) err("nodes are not sorted by name");
    const json scenes = doc.value("scenes", json::array());
    if (scenes.empty()) err("no scene");
    for (const json& s : scenes) {
        for (const json& n : s.value("nodes", json::array())) {
            if (n.get<std::size_t>() >= nodes.size()) err("scene references a missing node");
        }
    }
    r.nodes = nodes.size();
    r.meshes = meshes.size();
    r.ok = r.errors.empty();
    return r;
}

}  // namespace cityforge::scene
