#include <algorithm>
#include <cmath>
#include <functional>

#include "cityforge/geometry/offset.hpp"
#include "cityforge/geometry/polygon.hpp"
#include "cityforge/geometry/split.hpp"
#include "cityforge/layout/layout.hpp"

namespace cityforge::layout {

using geom::Point2;

namespace {

struct Face {
    geom::Ring ring;
    std::vector<double> half_width;  // per ring edge
    double signed_area = 0.0;
};

class HalfEdges {
public:
    HalfEdges(const RoadGraph& g, const std::vector<bool>& alive) : g_(g), out_(g.vertices.size()) {
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            if (!alive[e]) continue;
            out_[g.edges[e].a].push_back(2 * e);
            out_[g.edges[e].b].push_back(2 * e + 1);
        }
        for (std::size_t v = 0; v < out_.size(); ++v) {
            auto& o = out_[v];
            std::sort(o.begin(), o.end(), [&](std::size_t p, std::size_t q) {
                const double ap = angle(p), aq = angle(q);
                return ap < aq || (ap == aq && p < q);
            });
        }
    }

    std::size_t from(std::size_t h) const { return h % 2 == 0 ? g_.edges[h / 2].a : g_.edges[h / 2].b; }
    std::size_t to(std::size_t h) const { return h % 2 == 0 ? g_.edges[h / 2].b : g_.edges[h / 2].a; }

    // The face stays on the left: at the head vertex turn to the next
    // outgoing edge clockwise from the reverse edge.
    std::size_t next(std::size_t h) const {
        const auto& o = out_[to(h)];
        const std::size_t twin = h ^ 1u;
        const std::size_t pos = static_cast<std::size_t>(std::find(o.begin(), o.end(), twin) - o.begin());
        return o[(pos + o.size() - 1) % o.size()];
    }

    // Face id per half-edge (size 2E, unused half-edges stay -1).
    std::vector<long> label(const std::vector<bool>& alive, std::vector<std::vector<std::size_t>>& cycles) const {
        std::vector<long> face(2 * g_.edges.size(), -1);
        for (std::size_t h = 0; h < face.size(); ++h) {
            if (!alive[h / 2] || face[h] >= 0) continue;
            std::vector<std::size_t> cyc;
            std::size_t cur = h;
            do {
                face[cur] = static_cast<long>(cycles.size());
                cyc.push_back(cur);
                cur = next(cur);
            } while (cur != h);
            cycles.push_back(std::move(cyc));
        }
        return face;
    }

private:
    double angle(std::size_t h) const {
        const Point2 d = g_.vertices[to(h)] - g_.vertices[from(h)];
        return std::atan2(d.y, d.x);
    }

    const RoadGraph& g_;
    std::vector<std::vector<std::size_t>> out_;
};

std::vector<Face> faces_of(const RoadGraph& g) {
    std::vector<bool> alive(g.edges.size(), true);
    std::vector<std::vector<std::size_t>> cycles;
    for (int round = 0; round < 64; ++round) {
        cycles.clear();
        const HalfEdges he(g, alive);
        const auto face = he.label(alive, cycles);
        bool removed = false;
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            // Both sides on the same face: a bridge or a dead end.
            if (alive[e] && face[2 * e] == face[2 * e + 1]) {
                alive[e] = false;
                removed = true;
            }
        }
        if (!removed) {
            std::vector<Face> out;
            for (const auto& cyc : cycles) {
                Face f;
                for (std::size_t h : cyc) {
                    f.ring.push_back(g.vertices[he.from(h)]);
                    f.half_width.push_back(0.5 * g.edges[h / 2].width);
                }
                f.signed_area = geom::ring_signed_area(f.ring);
                out.push_back(std::move(f));
            }
            return out;
        }
    }
    return {};
}

struct FacePolygon {
    geom::Polygon poly;
    std::vector<double> outer_w;
    std::vector<std::vector<double>> hole_w;
};

std::vector<FacePolygon> face_polygons(const RoadGraph& g) {
    const std::vector<Face> faces = faces_of(g);
    std::vector<FacePolygon> out;
    std::vector<std::size_t> face_of_out;
    for (std::size_t i = 0; i < faces.size(); ++i) {
        const Face& f = faces[i];
        if (f.signed_area <= geom::kEps || !geom::ring_is_simple(f.ring)) continue;
        out.push_back({geom::Polygon{f.ring, {}}, f.half_width, {}});
    }
    // Component boundaries (negative faces) nested in a bounded face become holes.
    for (const Face& f : faces) {
        if (f.signed_area >= 0.0 || !geom::ring_is_simple(f.ring)) continue;
        std::size_t best = out.size();
        double best_area = INFINITY;
        for (std::size_t k = 0; k < out.size(); ++k) {
            const double a = geom::ring_signed_area(out[k].poly.outer);
            if (a < best_area && geom::locate(f.ring[0], out[k].poly.outer, 0.0) == geom::Location::Inside) {
                best = k;
                best_area = a;
            }
        }
        if (best == out.size()) continue;
        out[best].poly.holes.push_back(f.ring);
        out[best].hole_w.push_back(f.half_width);
    }
    return out;
}

}  // namespace

std::vector<geom::Polygon> graph_faces(const RoadGraph& graph) {
    std::vector<geom::Polygon> out;
    for (FacePolygon& f : face_polygons(graph)) out.push_back(std::move(f.poly));
    return out;
}

std::vector<geom::Polygon> extract_blocks(const RoadGraph& graph) {
    std::vector<geom::Polygon> out;
    for (const FacePolygon& f : face_polygons(graph)) {
        try {
            geom::Polygon b = geom::inset_edges(f.poly, f.outer_w, f.hole_w);
            if (geom::area(b) > geom::kEps) out.push_back(geom::oriented(std::move(b)));
        } catch (const geom::GeometryError&) {
            // consumed entirely by the roads
        }
    }
    return out;
}

std::vector<geom::Polygon> subdivide_block(const geom::Polygon& block, double target_area, std::uint64_t) {
    if (!(target_area > 0.0)) throw geom::GeometryError(geom::GeometryErrc::InvalidInput, "target area must be > 0");
    std::vector<geom::Polygon> out;
    std::function<void(const geom::Polygon&, int)> rec = [&](const geom::Polygon& p, int depth) {
        if (geom::area(p) <= target_area || depth >= 12) {
            out.push_back(p);
            return;
        }
        std::vector<geom::Polygon> pieces;
        try {
            auto [a, b] = geom::obb_split(p);
            pieces = {std::move(a), std::move(b)};
        } catch (const geom::GeometryError&) {
            try {
                pieces = geom::obb_partition(p);
            } catch (const geom::GeometryError&) {
                out.push_back(p);
                return;
            }
        }
        for (const geom::Polygon& q : pieces) rec(q, depth + 1);
    };
    rec(block, 0);
    return out;
}

double zone_median_height(const std::string& zone) { return zone == "commercial" ? 21.0 : 9.0; }

double draw_height(Rng& rng, const std::string& zone, const LayoutParams& params) {
    const double h = zone_median_height(zone) * std::exp(0.5 * rng.normal());
    const double floors = std::max(1.0, std::round(h / params.floor_height));
    return std::clamp(floors * params.floor_height, params.min_height, params.max_height);
}

std::vector<Footprint> generate_footprints(const std::vector<geom::Polygon>& parcels,
                                           const std::vector<std::string>& zones, std::uint64_t seed,
                                           const LayoutParams& params) {
    if (!zones.empty() && zones.size() != parcels.size()) {
        throw geom::GeometryError(geom::GeometryErrc::InvalidInput, "one zone per parcel required");
    }
    Rng rng(seed);
    std::vector<Footprint> out;
    for (std::size_t i = 0; i < parcels.size(); ++i) {
        const std::string zone = zones.empty() ? "residential" : zones[i];
        // Draw even for collapsed parcels so heights do not shift with geometry.
        const double h = draw_height(rng, zone, params);
        geom::Polygon fp;
        try {
            fp = geom::inset(parcels[i], params.footprint_inset);
        } catch (const geom::GeometryError&) {
            continue;
        }
        if (geom::area(fp) < params.min_footprint_area) continue;
        Footprint f;
        f.polygon = geom::oriented(std::move(fp));
        f.parcel = i;
        f.height = h;
        f.zone = zone;
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace cityforge::layout
