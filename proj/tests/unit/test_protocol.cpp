#include <doctest.h>

#include <json.hpp>

#include <set>

#include "cityforge/agents/agents.hpp"
#include "cityforge/protocol/protocol.hpp"

using namespace cityforge;
using namespace cityforge::protocol;

namespace {

ProtocolErrc error_of(std::string_view doc, std::string* detail = nullptr) {
    try {
        validate_manifest(doc);
    } catch (const ProtocolError& e) {
        if (detail) *detail = e.detail();
        return e.kind();
    }
    FAIL("manifest accepted");
    return ProtocolErrc::BadDocument;
}

}  // namespace

TEST_CASE("format labels are the closed set of 14") {
    const char* labels[] = {"SceneLayout", "NoiseFunction", "Image", "TextureMaterial", "GeographicInformationData",
                            "Point", "BooleanValue", "ComplexGeometry", "Color", "BasicGeometry",
                            "StringInformation", "Surface", "Line", "RandomNumber"};
    REQUIRE(all_formats().size() == 14);
    std::set<std::string_view> types;
    for (std::size_t i = 0; i < 14; ++i) {
        CHECK(format_label(all_formats()[i]) == labels[i]);
        CHECK(parse_format(labels[i]) == all_formats()[i]);
        // type labels are a bijection too
        types.insert(type_label(all_formats()[i]));
        CHECK(format_for_type(type_label(all_formats()[i])) == all_formats()[i]);
    }
    CHECK(types.size() == 14);
    CHECK(type_label(DataFormat::Point) == "tuple");
    CHECK(type_label(DataFormat::StringInformation) == "str");
    CHECK_THROWS_AS(parse_format("Blob"), ProtocolError);
}

TEST_CASE("format sets") {
    const FormatSet s = format_set({DataFormat::Line, DataFormat::Point});
    CHECK(has(s, DataFormat::Line));
    CHECK_FALSE(has(s, DataFormat::Surface));
    CHECK(formats_in(s) == std::vector<DataFormat>{DataFormat::Point, DataFormat::Line});
}

TEST_CASE("classname pattern") {
    CHECK(valid_classname("scale_object"));
    CHECK(valid_classname("a1_b2"));
    CHECK_FALSE(valid_classname(""));
    CHECK_FALSE(valid_classname("1abc"));
    CHECK_FALSE(valid_classname("Scale"));
    CHECK_FALSE(valid_classname("scale-object"));
}

TEST_CASE("action doc from the scale_object listing") {
    const char* doc = R"({"name": "scale_object", "description": "Scale an object",
        "parameters": {"scale_factor": {"type": "tuple", "description": "scale factor"},
                       "scaled_obj_name": {"type": "str", "description": "scaled object name"}}})";
    const ActionManifest m = validate_manifest(doc);
    CHECK(m.classname == "scale_object");
    CHECK(m.description == "Scale an object");
    REQUIRE(m.inputs.size() == 2);
    CHECK(m.inputs[0].name == "scale_factor");
    CHECK(m.inputs[0].format == DataFormat::Point);
    CHECK(m.inputs[1].name == "scaled_obj_name");
    CHECK(m.inputs[1].format == DataFormat::StringInformation);

    const auto out = nlohmann::json::parse(action_doc(m));
    CHECK(out["name"] == "scale_object");
    CHECK(out["parameters"]["scale_factor"]["type"] == "tuple");
    CHECK(out["parameters"]["scaled_obj_name"]["type"] == "str");
    CHECK(out["parameters"]["scaled_obj_name"]["description"] == "scaled object name");
}

TEST_CASE("manifest validation errors") {
    std::string detail;
    CHECK(error_of(R"({"classname": "a", "inputs": [], "limitation": "", "run": "a"})", &detail) ==
          ProtocolErrc::MissingField);
    CHECK(detail == "description");
    CHECK(error_of(R"({"classname": "a", "description": "Does a.", "inputs": [{"name": "x", "format": "Blob",
        "description": "x"}], "limitation": "", "run": "a"})",
                   &detail) == ProtocolErrc::UnknownFormat);
    CHECK(detail == "Blob");
    CHECK(error_of(R"({"classname": "a", "description": "Does a.", "inputs": [], "limitation": "", "run": "a",
        "colour": 1})") == ProtocolErrc::UnknownField);
    CHECK(error_of(R"({"classname": "Bad Name", "description": "Does a.", "inputs": [], "limitation": "",
        "run": "a"})") == ProtocolErrc::BadClassname);
    CHECK(error_of(R"({"classname": "a", "description": "  ", "inputs": [], "limitation": "", "run": "a"})") ==
          ProtocolErrc::MissingField);
    CHECK(error_of("not json") == ProtocolErrc::BadDocument);
    CHECK(error_of("[1, 2]") == ProtocolErrc::BadDocument);
}

TEST_CASE("zero-input manifest gives an empty parameters object") {
    ActionManifest m;
    m.classname = "noop";
    m.description = "Does nothing.";
    const auto out = nlohmann::json::parse(action_doc(m));
    CHECK(out["parameters"].is_object());
    CHECK(out["parameters"].empty());
}

TEST_CASE("manifest and action doc round trips") {
    for (const ActionManifest& m : builtin_conversions()) {
        CAPTURE(m.classname);
        const ActionManifest a = validate_manifest(manifest_json(m));
        CHECK(a.classname == m.classname);
        CHECK(a.description == m.description);
        CHECK(a.limitation == m.limitation);
        CHECK(a.run == m.run);
        CHECK(a.output == m.output);
        REQUIRE(a.inputs.size() == m.inputs.size());
        for (std::size_t i = 0; i < m.inputs.size(); ++i) {
            CHECK(a.inputs[i].name == m.inputs[i].name);
            CHECK(a.inputs[i].format == m.inputs[i].format);
            CHECK(a.inputs[i].description == m.inputs[i].description);
            CHECK(a.inputs[i].default_value == m.inputs[i].default_value);
        }
        const ActionManifest b = validate_manifest(action_doc(m));
        CHECK(b.classname == m.classname);
        CHECK(b.description == m.description);
        REQUIRE(b.inputs.size() == m.inputs.size());
        for (std::size_t i = 0; i < m.inputs.size(); ++i) {
            CHECK(b.inputs[i].name == m.inputs[i].name);
            CHECK(b.inputs[i].format == m.inputs[i].format);
        }
    }
}

TEST_CASE("builtin conversions") {
    const std::vector<std::string> expected = {"point_to_face_conversion",
                                               "cube_generation",
                                               "point_generation",
                                               "line_generation",
                                               "face_generation",
                                               "line_to_face_conversion",
                                               "asset_placement",
                                               "point_to_line_conversion",
                                               "osm_file_retrieval",
                                               "object_meshing",
                                               "texture_information_extraction",
                                               "asset_material_retrieval",
                                               "asset_mesh_retrieval",
                                               "scene_object_information_extraction"};
    const auto b = builtin_conversions();
    std::vector<std::string> names;
    for (const auto& m : b) names.push_back(m.classname);
    CHECK(names == expected);

    auto find = [&](std::string_view n) {
        for (const auto& m : b) {
            if (m.classname == n) return m;
        }
        FAIL("missing " << n);
        return ActionManifest{};
    };
    const ActionManifest p2f = find("point_to_face_conversion");
    CHECK(p2f.input_formats() == bit(DataFormat::Point));
    CHECK(p2f.output == DataFormat::Surface);
    const ActionManifest place = find("asset_placement");
    CHECK(has(place.input_formats(), DataFormat::ComplexGeometry));
    CHECK(has(place.input_formats(), DataFormat::SceneLayout));
    CHECK(place.output == DataFormat::SceneLayout);
    for (const char* gen : {"point_generation", "line_generation", "face_generation", "cube_generation"})
        CHECK(has(find(gen).input_formats(), DataFormat::RandomNumber));
    CHECK(find("osm_file_retrieval").output == DataFormat::GeographicInformationData);
    CHECK(find("asset_material_retrieval").output == DataFormat::TextureMaterial);
    CHECK(find("asset_mesh_retrieval").output == DataFormat::ComplexGeometry);
    CHECK(find("texture_information_extraction").output == DataFormat::StringInformation);
    CHECK(find("scene_object_information_extraction").output == DataFormat::StringInformation);

    // shipped fixture matches
    const auto table = nlohmann::json::parse(conversion_table_json());
    REQUIRE(table.size() == 14);
    for (std::size_t i = 0; i < 14; ++i) {
        CHECK(table[i]["classname"] == expected[i]);
        CHECK(table[i]["output"] == std::string(format_label(*b[i].output)));
    }
}

TEST_CASE("registry lookups") {
    ActionRegistry reg;
    ActionManifest m;
    m.classname = "alpha";
    m.description = "Alpha.";
    reg.add(m, [](ActionCall&) {});
    CHECK(reg.contains("alpha"));
    CHECK_FALSE(reg.contains("beta"));
    CHECK(reg.manifest("alpha").description == "Alpha.");
    CHECK_THROWS_AS(reg.manifest("beta"), ProtocolError);
    CHECK_THROWS_AS(reg.add(m, [](ActionCall&) {}), ProtocolError);
    m.classname = "Beta";
    CHECK_THROWS_AS(reg.add(m, [](ActionCall&) {}), ProtocolError);
    m.classname = "beta";
    CHECK_THROWS_AS(reg.add(m, nullptr), ProtocolError);
    CHECK(reg.size() == 1);

    // the engine registry: every manifest has an implementation
    const ActionRegistry full = agents::make_registry();
    for (const ActionManifest* x : full.manifests()) CHECK(static_cast<bool>(full.implementation(x->classname)));
    for (const ActionManifest& x : builtin_conversions()) CHECK(full.contains(x.classname));
}
