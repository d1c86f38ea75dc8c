#include "cityforge/geometry/split.hpp"

#include <algorithm>
#include <cmath>

#include "cityforge/geometry/polygon.hpp"

namespace cityforge::geom {

Ring convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    Ring hull(2 * pts.size());
    std::size_t k = 0;
    for (const Point2& p : pts) {
        while (k >= 2 && orient(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        const Point2 p = pts[i];
        while (k >= lower && orient(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    hull.resize(k - 1);
    return hull;
}

Ring OrientedBox::corners() const {
    const Point2 u = axis_u * half_u;
    const Point2 v = axis_v * half_v;
    return {center - u - v, center + u - v, center + u + v, center - u + v};
}

OrientedBox min_area_obb(const Ring& ring) {
    const Ring h = convex_hull(ring);
    const std::size_t m = h.size();
    if (m < 3) throw GeometryError(GeometryErrc::DegeneratePolygon, "obb: fewer than 3 hull points");

    auto argmax = [&](Point2 dir) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < m; ++i) {
            if (dot(h[i], dir) > dot(h[best], dir)) best = i;
        }
        return best;
    };

    OrientedBox best;
    double best_area = INFINITY;
    // Calipers: r tracks max along the edge, t max across it, l min along it.
    std::size_t r = 0, t = 0, l = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const Point2 a = h[i];
        const Point2 b = h[(i + 1) % m];
        const Point2 u = (b - a) * (1.0 / distance(a, b));
        const Point2 v = perp(u);
        if (i == 0) {
            r = argmax(u);
            t = argmax(v);
            l = argmax(u * -1.0);
        } else {
            while (dot(h[(r + 1) % m] - h[r], u) > 0.0) r = (r + 1) % m;
            while (dot(h[(t + 1) % m] - h[t], v) > 0.0) t = (t + 1) % m;
            while (dot(h[(l + 1) % m] - h[l], u) < 0.0) l = (l + 1) % m;
        }
        const double min_u = dot(h[l], u);
        const double max_u = dot(h[r], u);
        const double min_v = dot(a, v);
        const double max_v = dot(h[t], v);
        const double area = (max_u - min_u) * (max_v - min_v);
        if (area < best_area * (1.0 - 1e-12)) {
            best_area = area;
            const double cu = 0.5 * (min_u + max_u);
            const double cv = 0.5 * (min_v + max_v);
            best.center = u * cu + v * cv;
            best.axis_u = u;
            best.axis_v = v;
            best.half_u = 0.5 * (max_u - min_u);
            best.half_v = 0.5 * (max_v - min_v);
        }
    }
    return best;
}

Point2 split_axis(const OrientedBox& box) {
    const double tol = 1e-9 * std::max(box.half_u, box.half_v);
    if (box.half_u > box.half_v + tol) return box.axis_u;
    if (box.half_v > box.half_u + tol) return box.axis_v;
    Point2 axis = std::abs(box.axis_u.x) >= std::abs(box.axis_v.x) ? box.axis_u : box.axis_v;
    if (axis.x < 0.0 || (axis.x == 0.0 && axis.y < 0.0)) axis = axis * -1.0;
    return axis;
}

std::vector<Ring> split_by_line(const Ring& ring, Point2 origin, Point2 normal, std::size_t* positive_count) {
    struct Node {
        Point2 p;
        int cross = -1;  // index into crossings, -1 for an original vertex
        bool positive = false;
    };
    const Point2 along = perp(normal);
    const std::size_t n = ring.size();
    std::vector<double> side(n);
    for (std::size_t i = 0; i < n; ++i) side[i] = dot(ring[i] - origin, normal);

    std::vector<Node> nodes;
    std::vector<double> cross_param;
    std::vector<std::size_t> cross_node;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        nodes.push_back({ring[i], -1, side[i] > 0.0});
        if ((side[i] > 0.0) != (side[j] > 0.0)) {
            const double u = side[i] / (side[i] - side[j]);
            Point2 x = ring[i] + (ring[j] - ring[i]) * u;
            cross_param.push_back(dot(x - origin, along));
            cross_node.push_back(nodes.size());
            nodes.push_back({x, static_cast<int>(cross_param.size() - 1), false});
        }
    }

    const std::size_t nc = cross_param.size();
    if (positive_count) *positive_count = 0;
    if (nc == 0) {
        if (positive_count && side[0] > 0.0) *positive_count = 1;
        return {ring};
    }

    std::vector<std::size_t> order(nc);
    for (std::size_t i = 0; i < nc; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return cross_param[a] < cross_param[b] || (cross_param[a] == cross_param[b] && a < b);
    });
    std::vector<std::size_t> partner(nc);
    for (std::size_t k = 0; k + 1 < nc; k += 2) {
        partner[order[k]] = order[k + 1];
        partner[order[k + 1]] = order[k];
    }

    std::vector<Ring> neg, pos;
    std::vector<bool> used(nodes.size(), false);
    const std::size_t total = nodes.size();
    for (std::size_t start = 0; start < total; ++start) {
        if (used[start] || nodes[start].cross >= 0) continue;
        Ring piece;
        std::size_t i = start;
        for (std::size_t guard = 0; guard < 2 * total + 2; ++guard) {
            piece.push_back(nodes[i].p);
            used[i] = true;
            if (nodes[i].cross >= 0) {
                const std::size_t j = cross_node[partner[static_cast<std::size_t>(nodes[i].cross)]];
                piece.push_back(nodes[j].p);
                i = (j + 1) % total;
            } else {
                i = (i + 1) % total;
            }
            if (i == start) break;
        }
        (nodes[start].positive ? pos : neg).push_back(std::move(piece));
    }
    if (positive_count) *positive_count = pos.size();
    neg.insert(neg.end(), pos.begin(), pos.end());
    return neg;
}

namespace {

constexpr double kMinPiece = 1e-6;

std::vector<Ring> obb_pieces(const Polygon& poly, std::size_t& positive) {
    if (!poly.holes.empty()) throw GeometryError(GeometryErrc::SplitFailed, "obb split: polygon has holes");
    const OrientedBox box = min_area_obb(poly.outer);
    const Point2 axis = split_axis(box);
    return split_by_line(poly.outer, box.center, axis, &positive);
}

}  // namespace

std::pair<Polygon, Polygon> obb_split(const Polygon& poly) {
    std::size_t positive = 0;
    std::vector<Ring> pieces = obb_pieces(poly, positive);
    if (pieces.size() != 2 || positive != 1) {
        throw GeometryError(GeometryErrc::SplitFailed, "obb split: cut does not give two pieces");
    }
    Polygon a{clean_ring(pieces[0], 0.0), {}};
    Polygon b{clean_ring(pieces[1], 0.0), {}};
    if (a.outer.size() < 3 || b.outer.size() < 3 || area(a) < kMinPiece || area(b) < kMinPiece) {
        throw GeometryError(GeometryErrc::SplitFailed, "obb split: half below minimum area");
    }
    return {oriented(std::move(a)), oriented(std::move(b))};
}

std::vector<Polygon> obb_partition(const Polygon& poly) {
    std::size_t positive = 0;
    std::vector<Ring> pieces = obb_pieces(poly, positive);
    if (pieces.size() < 2 || positive == 0) {
        throw GeometryError(GeometryErrc::SplitFailed, "obb split: cut missed the polygon");
    }
    std::vector<Polygon> out;
    for (Ring& r : pieces) {
        Polygon p{clean_ring(r, 0.0), {}};
        if (p.outer.size() < 3 || area(p) < kMinPiece || !ring_is_simple(p.outer)) {
            throw GeometryError(GeometryErrc::SplitFailed, "obb split: degenerate piece");
        }
        out.push_back(oriented(std::move(p)));
    }
    return out;
}

}  // namespace cityforge::geom
