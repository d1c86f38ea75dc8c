#include <algorithm>
#include <cmath>

#include "cityforge/geometry/polygon.hpp"
#include "cityforge/raster/raster.hpp"

namespace cityforge::raster {

using geom::Point2;
using geom::Ring;

namespace {

void dp_range(const std::vector<Point2>& pts, std::size_t first, std::size_t last, double eps,
              std::vector<bool>& keep) {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{first, last}};
    while (!stack.empty()) {
        auto [i, j] = stack.back();
        stack.pop_back();
        double best = -1.0;
        std::size_t best_k = i;
        for (std::size_t k = i + 1; k < j; ++k) {
            const double d = geom::distance_to_segment(pts[k], pts[i], pts[j % pts.size()]);
            if (d > best) {
                best = d;
                best_k = k;
            }
        }
        if (best > eps) {
            keep[best_k] = true;
            stack.push_back({i, best_k});
            stack.push_back({best_k, j});
        }
    }
}

}  // namespace

std::vector<Point2> simplify_polyline(const std::vector<Point2>& pts, double eps) {
    if (pts.size() <= 2) return pts;
    std::vector<bool> keep(pts.size(), false);
    keep.front() = keep.back() = true;
    dp_range(pts, 0, pts.size() - 1, eps, keep);
    std::vector<Point2> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (keep[i]) out.push_back(pts[i]);
    }
    return out;
}

Ring simplify_ring(const Ring& ring, double eps) {
    const std::size_t n = ring.size();
    if (n <= 3) return ring;
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double d = geom::distance(ring[0], ring[i]);
        if (d > far_d) {
            far_d = d;
            far = i;
        }
    }
    std::vector<bool> keep(n, false);
    keep[0] = keep[far] = true;
    dp_range(ring, 0, far, eps, keep);
    dp_range(ring, far, n, eps, keep);  // index n wraps to vertex 0
    Ring out;
    for (std::size_t i = 0; i < n; ++i) {
        if (keep[i]) out.push_back(ring[i]);
    }
    return out;
}

namespace {

struct Edge {
    std::uint32_t from;
    std::uint32_t to;
    friend bool operator<(const Edge& a, const Edge& b) { return a.from < b.from || (a.from == b.from && a.to < b.to); }
};

struct Component {
    std::uint16_t cls = 0;
    int col = 0;
    int row = 0;
    std::vector<std::size_t> pixels;
};

class Tracer {
public:
    Tracer(const ClassGrid& g, const std::vector<int>& comp) : g_(g), comp_(comp), stride_(g.width + 1) {}

    // Boundary loops of one component, interior on the left in world coordinates.
    std::vector<Ring> loops(int id, const Component& c) const {
        std::vector<Edge> edges;
        const int w = g_.width, h = g_.height;
        auto same = [&](int col, int row) {
            return col >= 0 && row >= 0 && col < w && row < h &&
                   comp_[static_cast<std::size_t>(row) * static_cast<std::size_t>(w) + static_cast<std::size_t>(col)] == id;
        };
        for (std::size_t p : c.pixels) {
            const int col = static_cast<int>(p % static_cast<std::size_t>(w));
            const int row = static_cast<int>(p / static_cast<std::size_t>(w));
            if (!same(col, row + 1)) edges.push_back({corner(col, row + 1), corner(col + 1, row + 1)});
            if (!same(col + 1, row)) edges.push_back({corner(col + 1, row + 1), corner(col + 1, row)});
            if (!same(col, row - 1)) edges.push_back({corner(col + 1, row), corner(col, row)});
            if (!same(col - 1, row)) edges.push_back({corner(col, row), corner(col, row + 1)});
        }
        std::sort(edges.begin(), edges.end());
        std::vector<bool> used(edges.size(), false);
        std::vector<Ring> out;
        for (std::size_t s = 0; s < edges.size(); ++s) {
            if (used[s]) continue;
            std::vector<std::uint32_t> corners;
            std::size_t cur = s;
            do {
                used[cur] = true;
                corners.push_back(edges[cur].from);
                cur = next_edge(edges, cur);
            } while (cur != s);
            out.push_back(to_ring(corners));
        }
        return out;
    }

private:
    std::uint32_t corner(int cx, int ry) const {
        return static_cast<std::uint32_t>(ry) * static_cast<std::uint32_t>(stride_) + static_cast<std::uint32_t>(cx);
    }
    int cx(std::uint32_t c) const { return static_cast<int>(c % static_cast<std::uint32_t>(stride_)); }
    int ry(std::uint32_t c) const { return static_cast<int>(c / static_cast<std::uint32_t>(stride_)); }

    // Where two outgoing edges meet (diagonal pixels) take the right turn, so
    // each loop separates one background region from the component.
    std::size_t next_edge(const std::vector<Edge>& edges, std::size_t cur) const {
        const Edge e = edges[cur];
        const int dx = cx(e.to) - cx(e.from);
        const int dy = -(ry(e.to) - ry(e.from));
        auto lo = std::lower_bound(edges.begin(), edges.end(), Edge{e.to, 0});
        std::size_t best = edges.size();
        int best_turn = 2;
        for (auto it = lo; it != edges.end() && it->from == e.to; ++it) {
            const int ox = cx(it->to) - cx(it->from);
            const int oy = -(ry(it->to) - ry(it->from));
            const int turn = dx * oy - dy * ox;
            if (turn < best_turn) {
                best_turn = turn;
                best = static_cast<std::size_t>(it - edges.begin());
            }
        }
        return best;
    }

    Ring to_ring(const std::vector<std::uint32_t>& corners) const {
        const std::size_t n = corners.size();
        Ring r;
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t p = corners[(i + n - 1) % n], c = corners[i], q = corners[(i + 1) % n];
            const int ax = cx(c) - cx(p), ay = ry(c) - ry(p);
            const int bx = cx(q) - cx(c), by = ry(q) - ry(c);
            if (ax == bx && ay == by) continue;  // straight run
            r.push_back({cx(c) * g_.cell_size, (g_.height - ry(c)) * g_.cell_size});
        }
        return r;
    }

    const ClassGrid& g_;
    const std::vector<int>& comp_;
    int stride_;
};

// Holes that touch the outer ring (or each other) at a lattice corner get
// that vertex pulled a hair into the hole so every ring stays disjoint.
void separate_touching(geom::Polygon& poly, double cell) {
    const double delta = 1e-3 * cell;
    std::vector<Point2> seen(poly.outer.begin(), poly.outer.end());
    for (geom::Ring& h : poly.holes) {
        const std::size_t n = h.size();
        Ring moved = h;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::find(seen.begin(), seen.end(), h[i]) == seen.end()) continue;
            const Point2 din = h[i] - h[(i + n - 1) % n];
            const Point2 dout = h[(i + 1) % n] - h[i];
            // Holes run clockwise: their inside is to the right.
            Point2 into = Point2{din.y, -din.x} * (1.0 / geom::norm(din)) + Point2{dout.y, -dout.x} * (1.0 / geom::norm(dout));
            moved[i] = h[i] + into * (delta / geom::norm(into));
        }
        seen.insert(seen.end(), h.begin(), h.end());
        h = std::move(moved);
    }
}

}  // namespace

std::vector<Region> vectorize_regions(const ClassGrid& g) {
    const int w = g.width, h = g.height;
    const std::size_t total = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (g.classes.size() != total) throw RasterError(RasterErrc::InvalidGrid, "class grid size mismatch");

    std::vector<int> comp(total, -1);
    std::vector<Component> comps;
    std::vector<std::size_t> queue;
    for (std::size_t start = 0; start < total; ++start) {
        if (comp[start] >= 0) continue;
        const int id = static_cast<int>(comps.size());
        Component c;
        c.cls = g.classes[start];
        c.col = static_cast<int>(start % static_cast<std::size_t>(w));
        c.row = static_cast<int>(start / static_cast<std::size_t>(w));
        queue.assign(1, start);
        comp[start] = id;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const std::size_t p = queue[qi];
            c.pixels.push_back(p);
            const int col = static_cast<int>(p % static_cast<std::size_t>(w));
            const int row = static_cast<int>(p / static_cast<std::size_t>(w));
            const int nb[4][2] = {{col + 1, row}, {col - 1, row}, {col, row + 1}, {col, row - 1}};
            for (const auto& q : nb) {
                if (q[0] < 0 || q[1] < 0 || q[0] >= w || q[1] >= h) continue;
                const std::size_t qi2 = static_cast<std::size_t>(q[1]) * static_cast<std::size_t>(w) + static_cast<std::size_t>(q[0]);
                if (comp[qi2] >= 0 || g.classes[qi2] != c.cls) continue;
                comp[qi2] = id;
                queue.push_back(qi2);
            }
        }
        comps.push_back(std::move(c));
    }

    const Tracer tracer(g, comp);
    std::vector<Region> out;
    out.reserve(comps.size());
    for (std::size_t id = 0; id < comps.size(); ++id) {
        const Component& c = comps[id];
        Region r;
        r.class_index = c.cls;
        r.label = g.labels[c.cls];
        r.top_left_col = c.col;
        r.top_left_row = c.row;
        r.pixel_count = c.pixels.size();
        for (Ring& loop : tracer.loops(static_cast<int>(id), c)) {
            if (geom::ring_signed_area(loop) > 0.0) {
                r.unsimplified.outer = std::move(loop);
            } else {
                r.unsimplified.holes.push_back(std::move(loop));
            }
        }
        if (!geom::polygon_is_simple(r.unsimplified)) separate_touching(r.unsimplified, g.cell_size);

        geom::Polygon simple{simplify_ring(r.unsimplified.outer, 0.5 * g.cell_size), {}};
        bool ok = simple.outer.size() >= 3 && geom::ring_signed_area(simple.outer) > geom::kEps;
        for (const Ring& hole : r.unsimplified.holes) {
            Ring s = simplify_ring(hole, 0.5 * g.cell_size);
            ok = ok && s.size() >= 3 && geom::ring_signed_area(s) < -geom::kEps;
            simple.holes.push_back(std::move(s));
        }
        ok = ok && geom::polygon_is_simple(simple);
        r.polygon = ok ? std::move(simple) : r.unsimplified;
        out.push_back(std::move(r));
    }
    std::sort(out.begin(), out.end(), [](const Region& a, const Region& b) {
        if (a.label != b.label) return a.label < b.label;
        if (a.top_left_row != b.top_left_row) return a.top_left_row < b.top_left_row;
        return a.top_left_col < b.top_left_col;
    });
    return out;
}

}  // namespace cityforge::raster
