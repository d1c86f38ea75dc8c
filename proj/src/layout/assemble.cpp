#include <algorithm>
#include <cmath>
#include <set>

#include "cityforge/geometry/clip.hpp"
#include "cityforge/geometry/polygon.hpp"
#include "cityforge/layout/layout.hpp"
#include "cityforge/raster/skeleton.hpp"

namespace cityforge::layout {

using geom::Point2;

namespace {

const std::set<std::string> kGreenLanduse{"grass", "meadow", "park", "forest", "recreation_ground",
                                          "village_green", "orchard", "allotments", "cemetery"};
const std::set<std::string> kCommercialLanduse{"commercial", "retail", "office"};

double terrain_at(const LayoutParams& params, Point2 p) {
    if (!params.terrain) return 0.0;
    const raster::HeightGrid& g = *params.terrain;
    const double x = std::clamp(p.x - params.terrain_origin.x, 0.0, g.width * g.cell_size);
    const double y = std::clamp(p.y - params.terrain_origin.y, 0.0, g.height * g.cell_size);
    return raster::sample_height(g, x, y);
}

bool overlaps(const geom::Polygon& a, const geom::BBox& ba, const geom::Polygon& b, const geom::BBox& bb) {
    if (!ba.overlaps(bb)) return false;
    return geom::intersection_area(a, b) > 1e-6;
}

struct Indexed {
    const geom::Polygon* poly;
    geom::BBox box;
};

void finish(CityLayout& out, const LayoutParams& params) {
    for (Footprint& f : out.footprints) f.base = terrain_at(params, geom::interior_point(f.polygon));
    if (params.terrain) {
        for (const Point2& v : out.roads.vertices) out.road_elevation.push_back(terrain_at(params, v));
    }
    double margin = 0.0;
    for (const RoadEdge& e : out.roads.edges) margin = std::max(margin, 0.5 * e.width);
    geom::BBox b;
    for (const Point2& v : out.roads.vertices) b.expand(v);
    if (!b.empty()) {
        b.min_x -= margin;
        b.min_y -= margin;
        b.max_x += margin;
        b.max_y += margin;
    }
    for (const auto& p : out.blocks) b.expand(geom::bbox(p));
    for (const auto& f : out.footprints) b.expand(geom::bbox(f.polygon));
    for (const auto& a : out.areas) b.expand(geom::bbox(a.polygon));
    out.bounds.expand(b);
}

}  // namespace

CityLayout assemble_from_osm(const osm::LayerSet& layers, std::uint64_t seed, const LayoutParams& params) {
    if (layers.roads.empty() && layers.buildings.empty() && layers.water.empty() && layers.landuse.empty()) {
        throw LayoutError(LayoutErrc::EmptyInput, "no roads, buildings, water or landuse in the input");
    }
    CityLayout out;
    std::vector<RoadInput> roads;
    for (const osm::Road& r : layers.roads) roads.push_back({r.line, r.highway, r.width});
    out.roads = build_road_graph(roads);
    out.blocks = extract_blocks(out.roads);

    std::vector<Indexed> commercial, green, water;
    for (const geom::Polygon& w : layers.water) out.areas.push_back({w, "water"});
    for (const osm::Landuse& l : layers.landuse) {
        if (kGreenLanduse.count(l.label)) out.areas.push_back({l.area, "green"});
    }
    for (const SemanticArea& a : out.areas) {
        (a.semantic_class == "water" ? water : green).push_back({&a.polygon, geom::bbox(a.polygon)});
    }
    for (const osm::Landuse& l : layers.landuse) {
        if (kCommercialLanduse.count(l.label)) commercial.push_back({&l.area, geom::bbox(l.area)});
    }
    auto zone_at = [&](Point2 p) {
        for (const Indexed& c : commercial) {
            if (c.box.contains(p) && geom::contains(*c.poly, p)) return std::string("commercial");
        }
        return std::string("residential");
    };

    std::vector<geom::BBox> block_box;
    for (const auto& b : out.blocks) block_box.push_back(geom::bbox(b));

    // Declared buildings first: each is its own parcel inside the block that
    // holds it (or a block of its own when no road block does).
    Rng declared_rng(derive_seed(seed, "layout.declared_heights"));
    std::vector<Indexed> declared;
    for (const osm::Building& b : layers.buildings) {
        const geom::BBox box = geom::bbox(b.footprint);
        const std::string zone = zone_at(geom::interior_point(b.footprint));
        const double drawn = draw_height(declared_rng, zone, params);
        bool clash = false;
        for (const Indexed& d : declared) clash = clash || overlaps(b.footprint, box, *d.poly, d.box);
        if (clash) {
            out.notes.push_back("building " + std::to_string(b.source_id) + " overlaps an earlier building");
            continue;
        }
        const double fa = geom::area(b.footprint);
        std::size_t block = out.blocks.size();
        for (std::size_t k = 0; k < out.blocks.size(); ++k) {
            if (!block_box[k].overlaps(box)) continue;
            if (geom::intersection_area(b.footprint, out.blocks[k]) >= fa - 1e-6) {
                block = k;
                break;
            }
        }
        if (block == out.blocks.size()) {
            out.blocks.push_back(b.footprint);
            block_box.push_back(box);
        }
        out.parcels.push_back({b.footprint, block});
        declared.push_back({&b.footprint, box});
        Footprint f;
        f.polygon = b.footprint;
        f.parcel = out.parcels.size() - 1;
        f.height = b.declared_height ? *b.declared_height : drawn;
        f.zone = zone;
        f.declared = true;
        f.source_id = b.source_id;
        out.footprints.push_back(std::move(f));
    }

    const std::size_t road_blocks = out.blocks.size();
    std::vector<geom::Polygon> free_parcels;
    std::vector<std::size_t> free_block;
    std::vector<std::string> zones;
    for (std::size_t k = 0; k < road_blocks; ++k) {
        for (geom::Polygon& p : subdivide_block(out.blocks[k], params.parcel_target_area, seed)) {
            const geom::BBox box = geom::bbox(p);
            bool blocked = false;
            for (const Indexed& d : declared) blocked = blocked || overlaps(p, box, *d.poly, d.box);
            for (const Indexed& w : water) blocked = blocked || overlaps(p, box, *w.poly, w.box);
            const Point2 probe = geom::interior_point(p);
            for (const Indexed& g : green) blocked = blocked || (g.box.contains(probe) && geom::contains(*g.poly, probe));
            if (blocked) continue;
            zones.push_back(zone_at(probe));
            free_parcels.push_back(std::move(p));
            free_block.push_back(k);
        }
    }
    const std::size_t base = out.parcels.size();
    for (std::size_t i = 0; i < free_parcels.size(); ++i) out.parcels.push_back({free_parcels[i], free_block[i]});
    for (Footprint& f : generate_footprints(free_parcels, zones, derive_seed(seed, "layout.heights"), params)) {
        f.parcel += base;
        out.footprints.push_back(std::move(f));
    }
    finish(out, params);
    return out;
}

CityLayout assemble_from_regions(const std::vector<raster::Region>& regions, const std::vector<RoadInput>& roads,
                                 const geom::BBox& extent, std::uint64_t seed, const LayoutParams& params) {
    CityLayout out;
    for (const raster::Region& r : regions) {
        if (r.label == "building") {
            out.blocks.push_back(geom::oriented(r.polygon));
        } else if (r.label == "water" || r.label == "green") {
            out.areas.push_back({geom::oriented(r.polygon), r.label});
        }
    }
    if (out.blocks.empty() && out.areas.empty() && roads.empty()) {
        throw LayoutError(LayoutErrc::EmptyInput, "no building, water, green or road regions");
    }
    out.roads = build_road_graph(roads);
    std::vector<geom::Polygon> parcels;
    for (std::size_t k = 0; k < out.blocks.size(); ++k) {
        for (geom::Polygon& p : subdivide_block(out.blocks[k], params.parcel_target_area, seed)) {
            out.parcels.push_back({p, k});
            parcels.push_back(std::move(p));
        }
    }
    out.footprints = generate_footprints(parcels, {}, derive_seed(seed, "layout.heights"), params);
    out.bounds = extent;
    finish(out, params);
    return out;
}

std::string highway_for_width(double width) {
    if (width >= 20.0) return "motorway";
    if (width >= 14.0) return "primary";
    if (width >= 10.0) return "secondary";
    if (width >= 5.0) return "residential";
    return "footway";
}

std::vector<RoadInput> road_centerlines(const raster::ClassGrid& grid) {
    const auto cls = grid.class_of("road");
    if (!cls) return {};
    const raster::Mask mask = raster::class_mask(grid, *cls);
    if (mask.count() == 0) return {};
    std::vector<RoadInput> out;
    for (raster::Centerline& c : raster::trace_centerlines(raster::thin(mask), mask, grid)) {
        out.push_back({std::move(c.line), highway_for_width(c.width), c.width});
    }
    return out;
}

CityLayout assemble_from_semantic(const raster::ClassGrid& grid, std::uint64_t seed, const LayoutParams& params) {
    return assemble_from_regions(raster::vectorize_regions(grid), road_centerlines(grid), grid.extent(), seed, params);
}

std::vector<Point2> boundary_samples(const geom::Polygon& poly, std::size_t n) {
    const geom::Ring& r = poly.outer;
    std::vector<Point2> out;
    const double total = geom::perimeter(r);
    if (r.empty() || total <= 0.0) return r;
    std::size_t edge = 0;
    double edge_start = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double s = total * static_cast<double>(k) / static_cast<double>(n);
        while (edge + 1 < r.size() && edge_start + geom::distance(r[edge], r[(edge + 1) % r.size()]) < s) {
            edge_start += geom::distance(r[edge], r[(edge + 1) % r.size()]);
            ++edge;
        }
        const Point2 a = r[edge], b = r[(edge + 1) % r.size()];
        const double len = geom::distance(a, b);
        const double t = len > 0.0 ? std::clamp((s - edge_start) / len, 0.0, 1.0) : 0.0;
        out.push_back(a + (b - a) * t);
    }
    out.insert(out.end(), r.begin(), r.end());
    return out;
}

std::vector<std::string> check_layout(const CityLayout& layout) {
    std::vector<std::string> v;
    auto inside = [](const geom::Polygon& inner, const geom::Polygon& outer) {
        for (const Point2& p : boundary_samples(inner)) {
            if (!geom::contains(outer, p, 1e-6)) return false;
        }
        return true;
    };
    for (std::size_t i = 0; i < layout.parcels.size(); ++i) {
        const Parcel& p = layout.parcels[i];
        if (p.block >= layout.blocks.size()) {
            v.push_back("parcel " + std::to_string(i) + " refers to a missing block");
        } else if (!inside(p.polygon, layout.blocks[p.block])) {
            v.push_back("parcel " + std::to_string(i) + " leaves block " + std::to_string(p.block));
        }
    }
    std::vector<geom::BBox> boxes;
    for (std::size_t i = 0; i < layout.footprints.size(); ++i) {
        const Footprint& f = layout.footprints[i];
        boxes.push_back(geom::bbox(f.polygon));
        if (f.parcel >= layout.parcels.size()) {
            v.push_back("footprint " + std::to_string(i) + " refers to a missing parcel");
        } else if (!inside(f.polygon, layout.parcels[f.parcel].polygon)) {
            v.push_back("footprint " + std::to_string(i) + " leaves parcel " + std::to_string(f.parcel));
        }
        if (!(f.height > 0.0) || !std::isfinite(f.height)) v.push_back("footprint " + std::to_string(i) + " has no height");
    }
    std::vector<std::size_t> order(layout.footprints.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return boxes[a].min_x < boxes[b].min_x || (boxes[a].min_x == boxes[b].min_x && a < b);
    });
    for (std::size_t x = 0; x < order.size(); ++x) {
        for (std::size_t y = x + 1; y < order.size(); ++y) {
            const std::size_t i = order[x], j = order[y];
            if (boxes[j].min_x > boxes[i].max_x) break;
            if (!boxes[i].overlaps(boxes[j])) continue;
            const double a = geom::intersection_area(layout.footprints[i].polygon, layout.footprints[j].polygon);
            if (a > 1e-6) {
                v.push_back("footprints " + std::to_string(std::min(i, j)) + " and " + std::to_string(std::max(i, j)) +
                            " overlap");
            }
        }
    }
    if (!road_crossings(layout.roads).empty()) v.push_back("road graph has crossing edges");
    return v;
}

}  // namespace cityforge::layout
