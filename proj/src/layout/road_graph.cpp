#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "cityforge/geometry/polygon.hpp"
#include "cityforge/layout/layout.hpp"

namespace cityforge::layout {

using geom::Point2;

namespace {

// Vertex pool with snapping on a hash grid of kSnap cells.
class VertexPool {
public:
    std::size_t snap(Point2 p) {
        const auto cx = static_cast<std::int64_t>(std::floor(p.x / kSnap));
        const auto cy = static_cast<std::int64_t>(std::floor(p.y / kSnap));
        std::size_t best = pts.size();
        double best_d = INFINITY;
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
                auto it = grid_.find(key(cx + dx, cy + dy));
                if (it == grid_.end()) continue;
                for (std::size_t i : it->second) {
                    const double d = geom::distance(pts[i], p);
                    if (d <= kSnap && (d < best_d || (d == best_d && i < best))) {
                        best = i;
                        best_d = d;
                    }
                }
            }
        }
        if (best < pts.size()) return best;
        pts.push_back(p);
        grid_[key(cx, cy)].push_back(pts.size() - 1);
        return pts.size() - 1;
    }

    std::vector<Point2> pts;

private:
    static std::uint64_t key(std::int64_t x, std::int64_t y) {
        return (static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull) ^ static_cast<std::uint64_t>(y);
    }
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid_;
};

struct Seg {
    std::size_t a = 0;
    std::size_t b = 0;
    std::size_t road = 0;
};

geom::BBox seg_box(const std::vector<Point2>& v, const Seg& s) {
    geom::BBox b;
    b.expand(v[s.a]);
    b.expand(v[s.b]);
    return b;
}

// One round of splitting; returns true when anything was split.
bool split_round(VertexPool& pool, std::vector<Seg>& segs) {
    std::vector<std::vector<std::size_t>> cuts(segs.size());
    const std::size_t n = segs.size();
    std::vector<geom::BBox> boxes;
    boxes.reserve(n);
    for (const Seg& s : segs) boxes.push_back(seg_box(pool.pts, s));

    auto near_interior = [&](std::size_t vi, const Seg& s) {
        if (vi == s.a || vi == s.b) return false;
        return geom::distance_to_segment(pool.pts[vi], pool.pts[s.a], pool.pts[s.b]) <= kSnap;
    };

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!boxes[i].overlaps(boxes[j], kSnap)) continue;
            const Seg si = segs[i], sj = segs[j];
            for (std::size_t v : {sj.a, sj.b}) {
                if (near_interior(v, si)) cuts[i].push_back(v);
            }
            for (std::size_t v : {si.a, si.b}) {
                if (near_interior(v, sj)) cuts[j].push_back(v);
            }
            if (si.a == sj.a || si.a == sj.b || si.b == sj.a || si.b == sj.b) continue;
            const auto x = geom::segment_crossing(pool.pts[si.a], pool.pts[si.b], pool.pts[sj.a], pool.pts[sj.b]);
            if (!x) continue;
            const std::size_t v = pool.snap(*x);
            if (v != si.a && v != si.b) cuts[i].push_back(v);
            if (v != sj.a && v != sj.b) cuts[j].push_back(v);
        }
    }

    bool any = false;
    std::vector<Seg> out;
    for (std::size_t i = 0; i < n; ++i) {
        const Seg s = segs[i];
        if (cuts[i].empty()) {
            out.push_back(s);
            continue;
        }
        any = true;
        const Point2 a = pool.pts[s.a];
        const Point2 d = pool.pts[s.b] - a;
        const double len2 = geom::dot(d, d);
        auto& c = cuts[i];
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        std::sort(c.begin(), c.end(), [&](std::size_t p, std::size_t q) {
            const double tp = geom::dot(pool.pts[p] - a, d) / len2;
            const double tq = geom::dot(pool.pts[q] - a, d) / len2;
            return tp < tq || (tp == tq && p < q);
        });
        std::size_t prev = s.a;
        for (std::size_t v : c) {
            if (v != prev) out.push_back({prev, v, s.road});
            prev = v;
        }
        if (prev != s.b) out.push_back({prev, s.b, s.road});
    }
    segs = std::move(out);
    return any;
}

}  // namespace

RoadGraph build_road_graph(const std::vector<RoadInput>& roads) {
    VertexPool pool;
    std::vector<Seg> segs;
    for (std::size_t r = 0; r < roads.size(); ++r) {
        const auto& pts = roads[r].line.points;
        constexpr std::size_t none = static_cast<std::size_t>(-1);
        std::size_t prev = none;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const std::size_t v = pool.snap(pts[k]);
            if (prev != none && v != prev) segs.push_back({prev, v, r});
            prev = v;
        }
    }
    for (int round = 0; round < 16; ++round) {
        if (!split_round(pool, segs)) break;
    }

    // Deduplicate (unordered pairs), wider road wins, then compact vertices.
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
    std::vector<Seg> uniq;
    for (const Seg& s : segs) {
        if (s.a == s.b) continue;
        const auto k = std::minmax(s.a, s.b);
        auto it = seen.find(k);
        if (it == seen.end()) {
            seen[k] = uniq.size();
            uniq.push_back(s);
        } else if (roads[s.road].width > roads[uniq[it->second].road].width) {
            uniq[it->second].road = s.road;
        }
    }
    RoadGraph g;
    std::vector<std::size_t> remap(pool.pts.size(), static_cast<std::size_t>(-1));
    auto use = [&](std::size_t v) {
        if (remap[v] == static_cast<std::size_t>(-1)) {
            remap[v] = g.vertices.size();
            g.vertices.push_back(pool.pts[v]);
        }
        return remap[v];
    };
    for (const Seg& s : uniq) {
        const std::size_t a = use(s.a);
        const std::size_t b = use(s.b);
        g.edges.push_back({a, b, roads[s.road].highway, roads[s.road].width});
    }
    return g;
}

std::vector<std::pair<std::size_t, std::size_t>> road_crossings(const RoadGraph& g, double tol) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const auto& v = g.vertices;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const RoadEdge& e = g.edges[i];
        geom::BBox bi;
        bi.expand(v[e.a]);
        bi.expand(v[e.b]);
        for (std::size_t j = i + 1; j < g.edges.size(); ++j) {
            const RoadEdge& f = g.edges[j];
            geom::BBox bj;
            bj.expand(v[f.a]);
            bj.expand(v[f.b]);
            if (!bi.overlaps(bj, tol)) continue;
            const bool shared = e.a == f.a || e.a == f.b || e.b == f.a || e.b == f.b;
            if (!shared) {
                if (geom::segments_touch(v[e.a], v[e.b], v[f.a], v[f.b], tol)) out.emplace_back(i, j);
                continue;
            }
            // Sharing a vertex: only a collinear overlap counts.
            const std::size_t common = (e.a == f.a || e.a == f.b) ? e.a : e.b;
            const std::size_t oe = e.a == common ? e.b : e.a;
            const std::size_t of = f.a == common ? f.b : f.a;
            if (oe == of) {
                out.emplace_back(i, j);
                continue;
            }
            if (geom::distance_to_segment(v[of], v[common], v[oe]) <= tol ||
                geom::distance_to_segment(v[oe], v[common], v[of]) <= tol) {
                out.emplace_back(i, j);
            }
        }
    }
    return out;
}

}  // namespace cityforge::layout
