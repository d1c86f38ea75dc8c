#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cityforge/core/error.hpp"
#include "cityforge/core/rng.hpp"
#include "cityforge/geometry/types.hpp"
#include "cityforge/osm/osm.hpp"
#include "cityforge/raster/raster.hpp"

namespace cityforge::layout {

enum class LayoutErrc { EmptyInput };

using LayoutError = CodedError<LayoutErrc>;

/// Endpoints closer than this collapse into one graph vertex.
inline constexpr double kSnap = 0.01;

struct RoadInput {
    geom::Polyline line;
    std::string highway = "residential";
    double width = 8.0;
};

struct RoadEdge {
    std::size_t a = 0;
    std::size_t b = 0;
    std::string highway;
    double width = 8.0;
};

struct RoadGraph {
    std::vector<geom::Point2> vertices;
    std::vector<RoadEdge> edges;
};

/// Snaps endpoints, splits crossings and T-junctions, drops duplicate edges
/// (the wider road wins).
RoadGraph build_road_graph(const std::vector<RoadInput>& roads);

/// Pairs of edges that meet anywhere other than a shared end vertex.
std::vector<std::pair<std::size_t, std::size_t>> road_crossings(const RoadGraph& graph, double tol = geom::kCoincident);

/// Interior faces of the planar graph (bridges and dead ends dropped,
/// nested components become holes), before any inset.
std::vector<geom::Polygon> graph_faces(const RoadGraph& graph);

/// Faces inset by half the width of each bordering road. Faces that vanish
/// under the inset are dropped.
std::vector<geom::Polygon> extract_blocks(const RoadGraph& graph);

/// Recursive oriented-box halving until every parcel is <= target_area
/// (depth <= 12). Splits are deterministic; `seed` is accepted for interface
/// stability and does not change the result.
std::vector<geom::Polygon> subdivide_block(const geom::Polygon& block, double target_area, std::uint64_t seed = 0);

struct Footprint {
    geom::Polygon polygon;
    std::size_t parcel = 0;
    double height = 3.0;
    std::string semantic_class = "building";
    std::string zone = "residential";
    bool declared = false;       // taken from the input rather than generated
    std::int64_t source_id = 0;  // OSM id for declared footprints
    double base = 0.0;           // terrain elevation under the footprint
};

struct LayoutParams {
    double parcel_target_area = 600.0;
    double footprint_inset = 3.0;
    double floor_height = 3.0;
    double min_height = 3.0;
    double max_height = 150.0;
    double min_footprint_area = 4.0;
    /// Optional terrain; `terrain_origin` is the world position of the
    /// grid's lower-left corner.
    std::optional<raster::HeightGrid> terrain;
    geom::Point2 terrain_origin{};
};

/// Median height of the zone's lognormal (9 m residential, 21 m commercial).
double zone_median_height(const std::string& zone);

/// Height draw: lognormal(median, sigma_log 0.5), whole floors, clamped.
double draw_height(Rng& rng, const std::string& zone, const LayoutParams& params = {});

/// Footprint per parcel (inset by params.footprint_inset); parcels that
/// collapse produce nothing. zones.size() must equal parcels.size() or be empty.
std::vector<Footprint> generate_footprints(const std::vector<geom::Polygon>& parcels,
                                           const std::vector<std::string>& zones, std::uint64_t seed,
                                           const LayoutParams& params = {});

struct Parcel {
    geom::Polygon polygon;
    std::size_t block = 0;
};

struct SemanticArea {
    geom::Polygon polygon;
    std::string semantic_class;  // "water" or "green"
};

struct CityLayout {
    RoadGraph roads;
    std::vector<geom::Polygon> blocks;
    std::vector<Parcel> parcels;
    std::vector<Footprint> footprints;
    std::vector<SemanticArea> areas;
    geom::BBox bounds;
    std::vector<double> road_elevation;  // per road vertex, empty without terrain
    std::vector<std::string> notes;      // inputs that were dropped and why
};

/// OSM path: road faces become blocks; declared buildings are kept (with
/// their declared heights) and generated parcels avoid them and water.
CityLayout assemble_from_osm(const osm::LayerSet& layers, std::uint64_t seed, const LayoutParams& params = {});

/// Region path: building regions are the blocks, water/green regions become
/// areas, roads are given as centerlines.
CityLayout assemble_from_regions(const std::vector<raster::Region>& regions, const std::vector<RoadInput>& roads,
                                 const geom::BBox& extent, std::uint64_t seed, const LayoutParams& params = {});

/// Road centerlines of the "road" class (thinning + tracing).
std::vector<RoadInput> road_centerlines(const raster::ClassGrid& grid);

/// Highway class for a measured road width.
std::string highway_for_width(double width);

/// Vectorizes the grid and skeletonizes its road class, then assembles.
CityLayout assemble_from_semantic(const raster::ClassGrid& grid, std::uint64_t seed, const LayoutParams& params = {});

/// Containment (64 boundary samples plus vertices, 1e-6 m) and pairwise
/// footprint overlap (<= 1e-6 m^2). Empty when the layout is sound.
std::vector<std::string> check_layout(const CityLayout& layout);

/// Boundary sample points of a polygon's outer ring: `n` points evenly
/// spaced by arc length, followed by the ring vertices.
std::vector<geom::Point2> boundary_samples(const geom::Polygon& poly, std::size_t n = 64);

}  // namespace cityforge::layout
