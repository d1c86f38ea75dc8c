#include "cityforge/protocol/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <json.hpp>

namespace cityforge::protocol {

namespace {

using ojson = nlohmann::ordered_json;

struct FormatNames {
    DataFormat format;
    std::string_view label;
    std::string_view type;
};

constexpr std::array<FormatNames, kFormatCount> kFormats{{
    {DataFormat::SceneLayout, "SceneLayout", "scene"},
    {DataFormat::NoiseFunction, "NoiseFunction", "noise"},
    {DataFormat::Image, "Image", "image"},
    {DataFormat::TextureMaterial, "TextureMaterial", "material"},
    {DataFormat::GeographicInformationData, "GeographicInformationData", "geodata"},
    {DataFormat::Point, "Point", "tuple"},
    {DataFormat::BooleanValue, "BooleanValue", "bool"},
    {DataFormat::ComplexGeometry, "ComplexGeometry", "mesh"},
    {DataFormat::Color, "Color", "color"},
    {DataFormat::BasicGeometry, "BasicGeometry", "primitive"},
    {DataFormat::StringInformation, "StringInformation", "str"},
    {DataFormat::Surface, "Surface", "face"},
    {DataFormat::Line, "Line", "line"},
    {DataFormat::RandomNumber, "RandomNumber", "float"},
}};

[[noreturn]] void fail(ProtocolErrc kind, const std::string& detail, const std::string& what) {
    throw ProtocolError(kind, detail, what);
}

const ojson& required(const ojson& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(ProtocolErrc::MissingField, key, std::string("missing field: ") + key);
    return *it;
}

std::string required_string(const ojson& obj, const char* key) {
    const ojson& v = required(obj, key);
    if (!v.is_string()) fail(ProtocolErrc::BadDocument, key, std::string(key) + " must be a string");
    return v.get<std::string>();
}

void reject_unknown(const ojson& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
            fail(ProtocolErrc::UnknownField, it.key(), "unknown field in " + where + ": " + it.key());
        }
    }
}

bool has_sentence(const std::string& s) {
    return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c); });
}

void check_common(const ActionManifest& m) {
    if (!valid_classname(m.classname)) fail(ProtocolErrc::BadClassname, m.classname, "bad classname: " + m.classname);
    if (!has_sentence(m.description)) fail(ProtocolErrc::MissingField, "description", "empty description");
    for (std::size_t i = 0; i < m.inputs.size(); ++i) {
        if (m.inputs[i].name.empty()) fail(ProtocolErrc::MissingField, "name", "input without a name");
        for (std::size_t j = 0; j < i; ++j) {
            if (m.inputs[j].name == m.inputs[i].name) {
                fail(ProtocolErrc::BadDocument, m.inputs[i].name, "duplicate input: " + m.inputs[i].name);
            }
        }
    }
}

ActionManifest from_manifest_file(const ojson& doc) {
    reject_unknown(doc, {"classname", "description", "inputs", "limitation", "run", "output"}, "manifest");
    ActionManifest m;
    m.classname = required_string(doc, "classname");
    m.description = required_string(doc, "description");
    const ojson& inputs = required(doc, "inputs");
    if (!inputs.is_array()) fail(ProtocolErrc::BadDocument, "inputs", "inputs must be an array");
    for (const ojson& in : inputs) {
        if (!in.is_object()) fail(ProtocolErrc::BadDocument, "inputs", "input must be an object");
        reject_unknown(in, {"name", "format", "description", "default"}, "input");
        ActionInput a;
        a.name = required_string(in, "name");
        a.format = parse_format(required_string(in, "format"));
        a.description = required_string(in, "description");
        if (in.contains("default")) {
            const ojson& d = in["default"];
            a.default_value = d.is_string() ? d.get<std::string>() : d.dump();
        }
        m.inputs.push_back(std::move(a));
    }
    m.limitation = required_string(doc, "limitation");
    m.run = required_string(doc, "run");
    if (doc.contains("output")) m.output = parse_format(required_string(doc, "output"));
    check_common(m);
    return m;
}

ActionManifest from_action_doc(const ojson& doc) {
    reject_unknown(doc, {"name", "description", "parameters"}, "action doc");
    ActionManifest m;
    m.classname = required_string(doc, "name");
    m.description = required_string(doc, "description");
    const ojson& params = required(doc, "parameters");
    if (!params.is_object()) fail(ProtocolErrc::BadDocument, "parameters", "parameters must be an object");
    for (auto it = params.begin(); it != params.end(); ++it) {
        if (!it.value().is_object()) fail(ProtocolErrc::BadDocument, it.key(), "parameter must be an object");
        reject_unknown(it.value(), {"type", "description"}, "parameter");
        ActionInput a;
        a.name = it.key();
        a.format = format_for_type(required_string(it.value(), "type"));
        a.description = required_string(it.value(), "description");
        m.inputs.push_back(std::move(a));
    }
    m.run = m.classname;
    check_common(m);
    return m;
}

ActionManifest conversion(std::string classname, std::string description, std::vector<ActionInput> inputs,
                          DataFormat output, std::string limitation) {
    ActionManifest m;
    m.run = "cityforge::actions::" + classname;
    m.classname = std::move(classname);
    m.description = std::move(description);
    m.inputs = std::move(inputs);
    m.limitation = std::move(limitation);
    m.output = output;
    return m;
}

}  // namespace

const std::array<DataFormat, kFormatCount>& all_formats() {
    static const std::array<DataFormat, kFormatCount> all = [] {
        std::array<DataFormat, kFormatCount> a{};
        for (std::size_t i = 0; i < kFormatCount; ++i) a[i] = kFormats[i].format;
        return a;
    }();
    return all;
}

std::string_view format_label(DataFormat f) { return kFormats[static_cast<std::size_t>(f)].label; }
std::string_view type_label(DataFormat f) { return kFormats[static_cast<std::size_t>(f)].type; }

DataFormat parse_format(std::string_view label) {
    for (const auto& f : kFormats) {
        if (f.label == label) return f.format;
    }
    fail(ProtocolErrc::UnknownFormat, std::string(label), "unknown format: " + std::string(label));
}

DataFormat format_for_type(std::string_view type) {
    for (const auto& f : kFormats) {
        if (f.type == type) return f.format;
    }
    fail(ProtocolErrc::UnknownFormat, std::string(type), "unknown parameter type: " + std::string(type));
}

FormatSet format_set(std::initializer_list<DataFormat> formats) {
    FormatSet s = 0;
    for (DataFormat f : formats) s |= bit(f);
    return s;
}

std::vector<DataFormat> formats_in(FormatSet s) {
    std::vector<DataFormat> out;
    for (DataFormat f : all_formats()) {
        if (has(s, f)) out.push_back(f);
    }
    return out;
}

FormatSet ActionManifest::input_formats() const {
    FormatSet s = 0;
    for (const ActionInput& in : inputs) s |= bit(in.format);
    return s;
}

bool valid_classname(std::string_view name) {
    if (name.empty() || name[0] < 'a' || name[0] > 'z') return false;
    return std::all_of(name.begin(), name.end(),
                       [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'; });
}

ActionManifest validate_manifest(std::string_view json_document) {
    ojson doc;
    try {
        doc = ojson::parse(json_document);
    } catch (const ojson::parse_error& e) {
        fail(ProtocolErrc::BadDocument, "", std::string("manifest is not JSON: ") + e.what());
    }
    if (!doc.is_object()) fail(ProtocolErrc::BadDocument, "", "manifest must be a JSON object");
    if (doc.contains("classname")) return from_manifest_file(doc);
    if (doc.contains("name")) return from_action_doc(doc);
    fail(ProtocolErrc::MissingField, "classname", "missing field: classname");
}

std::string manifest_json(const ActionManifest& m) {
    ojson doc;
    doc["classname"] = m.classname;
    doc["description"] = m.description;
    ojson inputs = ojson::array();
    for (const ActionInput& in : m.inputs) {
        ojson j;
        j["name"] = in.name;
        j["format"] = format_label(in.format);
        j["description"] = in.description;
        if (in.default_value) j["default"] = *in.default_value;
        inputs.push_back(std::move(j));
    }
    doc["inputs"] = std::move(inputs);
    doc["limitation"] = m.limitation;
    doc["run"] = m.run;
    if (m.output) doc["output"] = format_label(*m.output);
    return doc.dump(2);
}

std::string action_doc(const ActionManifest& m) {
    ojson doc;
    doc["name"] = m.classname;
    doc["description"] = m.description;
    ojson params = ojson::object();
    for (const ActionInput& in : m.inputs) {
        params[in.name] = {{"type", type_label(in.format)}, {"description", in.description}};
    }
    doc["parameters"] = std::move(params);
    return doc.dump();
}

std::vector<ActionManifest> builtin_conversions() {
    using F = DataFormat;
    auto in = [](std::string name, F f, std::string d, std::optional<std::string> def = std::nullopt) {
        return ActionInput{std::move(name), f, std::move(d), std::move(def)};
    };
    std::vector<ActionManifest> out;
    out.push_back(conversion("point_to_face_conversion", "Converting points to faces.",
                             {in("points", F::Point, "point layer with class labels")}, F::Surface,
                             "Faces follow 4-connected regions of equal class."));
    out.push_back(conversion("cube_generation", "Generating cubes.",
                             {in("edge", F::RandomNumber, "edge length in meters", "1")}, F::BasicGeometry,
                             "Axis-aligned cube resting on the ground at the origin."));
    out.push_back(conversion("point_generation", "Generating points.",
                             {in("count", F::RandomNumber, "number of points", "16")}, F::Point,
                             "Uniform inside the scene bounds."));
    out.push_back(conversion("line_generation", "Generating lines.",
                             {in("count", F::RandomNumber, "number of lines", "4")}, F::Line,
                             "Straight two-point lines inside the scene bounds."));
    out.push_back(conversion("face_generation", "Generating faces.",
                             {in("count", F::RandomNumber, "number of faces", "4")}, F::Surface,
                             "Axis-aligned rectangles inside the scene bounds."));
    out.push_back(conversion("line_to_face_conversion", "Converting lines to faces.",
                             {in("lines", F::Line, "line layer")}, F::Surface,
                             "Only areas enclosed by lines become faces."));
    out.push_back(conversion("asset_placement", "Placing assets within a scene or environment.",
                             {in("asset", F::ComplexGeometry, "asset to place"),
                              in("layout", F::SceneLayout, "layout receiving the asset")},
                             F::SceneLayout, "Positions avoid building footprints and stay inside the scene."));
    out.push_back(conversion("point_to_line_conversion", "Converting points to lines.",
                             {in("points", F::Point, "point layer with class labels")}, F::Line,
                             "Lines follow the centre of road-class points."));
    out.push_back(conversion("osm_file_retrieval", "Retrieving OpenStreetMap (OSM) files.",
                             {in("path", F::StringInformation, "OSM XML file path")}, F::GeographicInformationData,
                             "Local files only."));
    out.push_back(conversion("object_meshing", "Meshing objects.",
                             {in("shape", F::BasicGeometry, "primitive shape")}, F::ComplexGeometry,
                             "Primitives become indexed triangle meshes with normals."));
    out.push_back(conversion("texture_information_extraction", "Extracting texture information.",
                             {in("material", F::TextureMaterial, "material to describe")}, F::StringInformation,
                             "Base color and roughness only."));
    out.push_back(conversion("asset_material_retrieval", "Retrieving material data for assets.",
                             {in("query", F::StringInformation, "asset description")}, F::TextureMaterial,
                             "Returns the material of the best matching library asset."));
    out.push_back(conversion("asset_mesh_retrieval", "Retrieving mesh data for assets.",
                             {in("query", F::StringInformation, "asset description")}, F::ComplexGeometry,
                             "Returns the mesh of one of the ten best matching library assets."));
    out.push_back(conversion("scene_object_information_extraction", "Extracting scene object information.",
                             {in("layout", F::SceneLayout, "scene to describe")}, F::StringInformation,
                             "Names, classes and bounds of the scene objects."));
    return out;
}

std::string conversion_table_json() {
    ojson table = ojson::array();
    for (const ActionManifest& m : builtin_conversions()) {
        ojson ins = ojson::array();
        for (const ActionInput& in : m.inputs) ins.push_back(format_label(in.format));
        table.push_back({{"classname", m.classname},
                         {"description", m.description},
                         {"inputs", std::move(ins)},
                         {"output", format_label(*m.output)}});
    }
    return table.dump(2);
}

void ActionRegistry::add(ActionManifest manifest, Implementation impl) {
    if (!valid_classname(manifest.classname)) {
        fail(ProtocolErrc::BadClassname, manifest.classname, "bad classname: " + manifest.classname);
    }
    if (!impl) fail(ProtocolErrc::BadDocument, manifest.classname, "action without implementation");
    if (entries_.count(manifest.classname)) {
        fail(ProtocolErrc::DuplicateClassname, manifest.classname, "duplicate classname: " + manifest.classname);
    }
    std::string key = manifest.classname;
    entries_.emplace(std::move(key), Entry{std::move(manifest), std::move(impl)});
}

bool ActionRegistry::contains(std::string_view classname) const { return entries_.find(classname) != entries_.end(); }

const ActionRegistry::Entry& ActionRegistry::entry(std::string_view classname) const {
    auto it = entries_.find(classname);
    if (it == entries_.end()) {
        fail(ProtocolErrc::UnknownAction, std::string(classname), "unknown action: " + std::string(classname));
    }
    return it->second;
}

const ActionManifest& ActionRegistry::manifest(std::string_view classname) const { return entry(classname).manifest; }

const ActionRegistry::Implementation& ActionRegistry::implementation(std::string_view classname) const {
    return entry(classname).impl;
}

void ActionRegistry::set_tags(std::string_view classname, std::vector<std::string> tags) {
    auto it = entries_.find(classname);
    if (it == entries_.end()) {
        fail(ProtocolErrc::UnknownAction, std::string(classname), "unknown action: " + std::string(classname));
    }
    it->second.manifest.tags = std::move(tags);
}

std::vector<const ActionManifest*> ActionRegistry::manifests() const {
    std::vector<const ActionManifest*> out;
    for (const auto& [name, e] : entries_) out.push_back(&e.manifest);
    return out;
}

}  // namespace cityforge::protocol
