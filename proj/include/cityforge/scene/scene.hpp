#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cityforge/assets/assets.hpp"
#include "cityforge/core/rng.hpp"
#include "cityforge/geometry/types.hpp"
#include "cityforge/layout/layout.hpp"
#include "cityforge/protocol/protocol.hpp"
#include "cityforge/raster/raster.hpp"

namespace cityforge::scene {

using Color3 = std::array<double, 3>;

struct Material {
    std::string name = "default";
    Color3 base_color{0.8, 0.8, 0.8};
    double roughness = 0.5;
    Color3 emissive{0.0, 0.0, 0.0};

    friend bool operator==(const Material&, const Material&) = default;
};

/// Scale, then rotation about +z by yaw, then translation.
struct Transform {
    geom::Vec3 translation{};
    double yaw = 0.0;
    geom::Vec3 scale{1.0, 1.0, 1.0};

    friend bool operator==(const Transform&, const Transform&) = default;
};

geom::Vec3 apply(const Transform& t, geom::Vec3 p);

struct SceneObject {
    std::string name;
    Transform transform;
    std::shared_ptr<const geom::Mesh> mesh;  // local coordinates
    Material material;
    std::string semantic_class;
    std::optional<geom::Polygon> footprint;  // local, buildings only
};

geom::Mesh world_mesh(const SceneObject& obj);
geom::BBox3 world_bounds(const SceneObject& obj);
std::optional<geom::Polygon> world_footprint(const SceneObject& obj);

/// Data that actions pass to each other, one slot per format family.
struct Workspace {
    std::shared_ptr<const raster::ClassGrid> semantic;  // Point / Image
    std::shared_ptr<const raster::HeightGrid> terrain;
    std::shared_ptr<const osm::LayerSet> geodata;       // GeographicInformationData
    std::vector<geom::Point2> points;                   // Point
    std::vector<layout::RoadInput> lines;               // Line
    std::vector<layout::SemanticArea> faces;            // Surface
    std::shared_ptr<const layout::CityLayout> layout;   // SceneLayout
    std::vector<std::string> primitives;                // BasicGeometry (object names)
    std::string text;                                   // StringInformation
    std::optional<Material> material;                   // TextureMaterial
    std::shared_ptr<const geom::Mesh> asset;            // ComplexGeometry
    std::string asset_id;
};

struct SceneState {
    std::uint64_t revision = 0;
    std::map<std::string, SceneObject> objects;
    std::map<std::string, std::string> environment;
    protocol::FormatSet available = 0;
    geom::BBox bounds;
    std::uint64_t seed = 0;
    Workspace data;

    /// "<prefix>_<n>" with the smallest n >= 1 not in use.
    std::string unique_name(const std::string& prefix) const;
    std::size_t count_class(const std::string& semantic_class) const;
    std::size_t triangle_count() const;
};

struct StylePreset {
    std::string name;
    std::vector<std::string> keywords;
    Color3 building{0.6, 0.6, 0.6};
    double building_roughness = 0.5;
    Color3 emissive{0.0, 0.0, 0.0};
    Color3 road{0.25, 0.25, 0.25};
    Color3 green{0.3, 0.55, 0.25};
    Color3 water{0.2, 0.35, 0.6};
    double sun_elevation = 45.0;  // degrees
    double sun_azimuth = 135.0;
};

struct WeatherPreset {
    std::string name;
    std::vector<std::string> keywords;
    double fog_density = 0.0;
    double cloud_cover = 0.0;
    std::string precipitation = "none";
};

struct PresetTable {
    std::vector<StylePreset> styles;
    std::vector<WeatherPreset> weathers;

    /// First preset with a keyword among the words of `text`; the first
    /// preset when nothing matches.
    const StylePreset& style_for(const std::string& text) const;
    const WeatherPreset& weather_for(const std::string& text) const;
    const StylePreset* find_style(const std::string& text) const;
    const WeatherPreset* find_weather(const std::string& text) const;
};

/// modern, traditional, night; clear, overcast, fog, rain, snow.
const PresetTable& default_presets();
PresetTable parse_presets(const std::string& json);
std::string presets_json(const PresetTable& table);

/// Recolors buildings, roads, green and water and sets the style keys.
void apply_style(SceneState& state, const StylePreset& style, std::uint64_t seed);
void apply_weather(SceneState& state, const WeatherPreset& weather);

struct InstantiateOptions {
    double tree_spacing = 6.0;  // Poisson-disk radius on green areas
    bool trees = true;
};

/// Building per footprint, road ribbon per road edge, a flat object per
/// water/green area, trees on green areas; styled and weathered by preset.
SceneState instantiate(const layout::CityLayout& layout, const assets::AssetLibrary* library, const std::string& style,
                       const std::string& weather, std::uint64_t seed, const PresetTable& presets = default_presets(),
                       const InstantiateOptions& options = {});

/// Object builders used by instantiate and by actions.
SceneObject building_object(const std::string& name, const layout::Footprint& fp);
SceneObject road_object(const std::string& name, geom::Point2 a, geom::Point2 b, double width, double z);
SceneObject area_object(const std::string& name, const layout::SemanticArea& area);

/// Seeded Poisson-disk samples inside `poly`, at least `clearance` from its
/// boundary, each at least `radius` from the others and from `taken`.
std::vector<geom::Point2> poisson_disk(const geom::Polygon& poly, double radius, double clearance, Rng& rng,
                                       std::vector<geom::Point2>& taken);

struct ExportBundle {
    std::vector<std::uint8_t> bytes;
    std::size_t object_count = 0;
    std::size_t triangle_count = 0;
    std::size_t byte_length = 0;
};

/// glTF 2.0 binary container, Y up (x -> x, y -> -z), nodes sorted by name.
ExportBundle export_glb(const SceneState& state);

/// ASCII OBJ, one `o` group per object, Y up, 1-based global indices.
std::string export_obj(const SceneState& state);

struct GlbReport {
    bool ok = false;
    std::vector<std::string> errors;
    std::size_t nodes = 0;
    std::size_t meshes = 0;
    std::size_t triangles = 0;  // summed over nodes
    std::size_t json_length = 0;
    std::size_t bin_length = 0;
    std::vector<std::string> node_names;
};

/// Structural checks: header, chunk lengths and types, buffer/bufferView/
/// accessor bounds, index ranges, POSITION min/max against the data.
GlbReport validate_glb(const std::vector<std::uint8_t>& bytes);

}  // namespace cityforge::scene
