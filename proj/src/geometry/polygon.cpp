#include "cityforge/geometry/polygon.hpp"

#include <algorithm>
#include <cmath>

namespace cityforge::geom {

double ring_signed_area(std::span<const Point2> ring) {
    const std::size_t n = ring.size();
    if (n < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = ring[i];
        const Point2& b = ring[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    return 0.5 * twice;
}

double signed_area(const Polygon& poly) {
    double a = ring_signed_area(poly.outer);
    for (const Ring& h : poly.holes) a += ring_signed_area(h);
    return a;
}

double area(const Polygon& poly) {
    double a = std::abs(ring_signed_area(poly.outer));
    for (const Ring& h : poly.holes) a -= std::abs(ring_signed_area(h));
    return a;
}

Point2 ring_centroid(std::span<const Point2> ring) {
    const std::size_t n = ring.size();
    if (n == 0) return {};
    // Shift to the first vertex to keep the products small.
    const Point2 o = ring[0];
    double a2 = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 p = ring[i] - o;
        const Point2 q = ring[(i + 1) % n] - o;
        const double c = cross(p, q);
        a2 += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    if (std::abs(a2) < 1e-300) {
        Point2 m{};
        for (const Point2& p : ring) m = m + p;
        return m * (1.0 / static_cast<double>(n));
    }
    return {o.x + cx / (3.0 * a2), o.y + cy / (3.0 * a2)};
}

BBox bbox(std::span<const Point2> ring) {
    BBox b;
    for (const Point2& p : ring) b.expand(p);
    return b;
}

BBox bbox(const Polygon& poly) { return bbox(poly.outer); }

double perimeter(std::span<const Point2> ring) {
    double len = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) len += distance(ring[i], ring[(i + 1) % ring.size()]);
    return len;
}

Polygon oriented(Polygon poly) {
    if (ring_signed_area(poly.outer) < 0.0) std::reverse(poly.outer.begin(), poly.outer.end());
    for (Ring& h : poly.holes) {
        if (ring_signed_area(h) > 0.0) std::reverse(h.begin(), h.end());
    }
    return poly;
}

Ring clean_ring(std::span<const Point2> ring, double tol) {
    Ring out;
    out.reserve(ring.size());
    for (const Point2& p : ring) {
        if (out.empty() || distance(out.back(), p) > tol) out.push_back(p);
    }
    while (out.size() > 1 && distance(out.front(), out.back()) <= tol) out.pop_back();

    bool changed = true;
    while (changed && out.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < out.size() && out.size() >= 3; ++i) {
            const std::size_t n = out.size();
            const Point2 a = out[(i + n - 1) % n];
            const Point2 b = out[i];
            const Point2 c = out[(i + 1) % n];
            const double span = distance(a, c);
            const bool spike = span <= tol;
            const bool flat = !spike && std::abs(orient(a, b, c)) <= tol * span;
            if (spike || flat || distance(a, b) <= tol) {
                out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                --i;
            }
        }
    }
    if (out.size() < 3) out.clear();
    return out;
}

namespace {

int sign_of(double v, double tol) { return v > tol ? 1 : (v < -tol ? -1 : 0); }

bool on_segment(Point2 p, Point2 a, Point2 b, double tol) {
    return distance_to_segment(p, a, b) <= tol;
}

}  // namespace

bool segments_touch(Point2 a, Point2 b, Point2 c, Point2 d, double tol) {
    const int o1 = sign_of(orient(a, b, c), 0.0);
    const int o2 = sign_of(orient(a, b, d), 0.0);
    const int o3 = sign_of(orient(c, d, a), 0.0);
    const int o4 = sign_of(orient(c, d, b), 0.0);
    if (o1 * o2 < 0 && o3 * o4 < 0) return true;
    return on_segment(c, a, b, tol) || on_segment(d, a, b, tol) || on_segment(a, c, d, tol) ||
           on_segment(b, c, d, tol);
}

std::optional<Point2> segment_crossing(Point2 a, Point2 b, Point2 c, Point2 d) {
    const Point2 r = b - a;
    const Point2 s = d - c;
    const double denom = cross(r, s);
    if (denom == 0.0) return std::nullopt;
    const double t = cross(c - a, s) / denom;
    const double u = cross(c - a, r) / denom;
    if (t <= 0.0 || t >= 1.0 || u <= 0.0 || u >= 1.0) return std::nullopt;
    return a + r * t;
}

double distance_to_segment(Point2 p, Point2 a, Point2 b) {
    const Point2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

double distance_to_ring(Point2 p, std::span<const Point2> ring) {
    double best = INFINITY;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        best = std::min(best, distance_to_segment(p, ring[i], ring[(i + 1) % ring.size()]));
    }
    return best;
}

double distance_to_boundary(Point2 p, const Polygon& poly) {
    double best = distance_to_ring(p, poly.outer);
    for (const Ring& h : poly.holes) best = std::min(best, distance_to_ring(p, h));
    return best;
}

bool ring_is_simple(std::span<const Point2> ring) {
    const std::size_t n = ring.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        if (distance(ring[i], ring[(i + 1) % n]) <= kEps) return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = ring[i];
        const Point2 b = ring[(i + 1) % n];
        const BBox bi = bbox(std::span<const Point2>(std::array<Point2, 2>{a, b}));
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point2 c = ring[j];
            const Point2 d = ring[(j + 1) % n];
            const bool next_adjacent = (j == i + 1);
            const bool wrap_adjacent = (i == 0 && j == n - 1);
            if (next_adjacent) {
                // Shared vertex b == c: the edges must not fold back onto each other.
                if (on_segment(d, a, b, kEps * 0.5) || on_segment(a, c, d, kEps * 0.5)) return false;
                continue;
            }
            if (wrap_adjacent) {
                // Shared vertex a == d.
                if (on_segment(c, a, b, kEps * 0.5) || on_segment(b, c, d, kEps * 0.5)) return false;
                continue;
            }
            BBox bj;
            bj.expand(c);
            bj.expand(d);
            if (!bi.overlaps(bj)) continue;
            if (segments_touch(a, b, c, d, 0.0)) return false;
        }
    }
    return true;
}

namespace {

bool rings_touch(std::span<const Point2> r1, std::span<const Point2> r2) {
    const BBox b1 = bbox(r1);
    const BBox b2 = bbox(r2);
    if (!b1.overlaps(b2)) return false;
    for (std::size_t i = 0; i < r1.size(); ++i) {
        const Point2 a = r1[i];
        const Point2 b = r1[(i + 1) % r1.size()];
        for (std::size_t j = 0; j < r2.size(); ++j) {
            if (segments_touch(a, b, r2[j], r2[(j + 1) % r2.size()], 0.0)) return true;
        }
    }
    return false;
}

}  // namespace

bool polygon_is_simple(const Polygon& poly) {
    if (!ring_is_simple(poly.outer)) return false;
    for (std::size_t i = 0; i < poly.holes.size(); ++i) {
        const Ring& h = poly.holes[i];
        if (!ring_is_simple(h)) return false;
        if (rings_touch(poly.outer, h)) return false;
        if (locate(h[0], poly.outer, 0.0) != Location::Inside) return false;
        for (std::size_t j = i + 1; j < poly.holes.size(); ++j) {
            if (rings_touch(h, poly.holes[j])) return false;
        }
    }
    return true;
}

void validate(const Polygon& poly) {
    if (poly.outer.size() < 3 || std::abs(ring_signed_area(poly.outer)) <= kEps) {
        throw GeometryError(GeometryErrc::DegeneratePolygon, "polygon outer ring has no area");
    }
    for (const Point2& p : poly.outer) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw GeometryError(GeometryErrc::InvalidInput, "polygon has a non-finite coordinate");
        }
    }
    if (!polygon_is_simple(poly)) {
        throw GeometryError(GeometryErrc::NonSimple, "polygon rings self-intersect or touch");
    }
}

Location locate(Point2 p, std::span<const Point2> ring, double tol) {
    const std::size_t n = ring.size();
    if (n < 3) return Location::Outside;
    if (tol > 0.0 && distance_to_ring(p, ring) <= tol) return Location::Boundary;
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2 a = ring[i];
        const Point2 b = ring[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (x == p.x) return Location::Boundary;
            if (p.x < x) inside = !inside;
        }
    }
    return inside ? Location::Inside : Location::Outside;
}

Location locate(Point2 p, const Polygon& poly, double tol) {
    const Location outer = locate(p, poly.outer, tol);
    if (outer != Location::Inside) return outer;
    for (const Ring& h : poly.holes) {
        const Location lh = locate(p, h, tol);
        if (lh == Location::Boundary) return Location::Boundary;
        if (lh == Location::Inside) return Location::Outside;
    }
    return Location::Inside;
}

bool contains(const Polygon& poly, Point2 p, double tol) {
    return locate(p, poly, tol) != Location::Outside;
}

Point2 interior_point(const Polygon& poly) {
    const Point2 c = ring_centroid(poly.outer);
    if (locate(c, poly, 0.0) == Location::Inside) return c;

    // Widest interior interval along a horizontal scanline.
    const BBox b = bbox(poly.outer);
    Point2 best = c;
    double best_width = -1.0;
    for (double frac : {0.5, 0.37, 0.63, 0.21, 0.79, 0.11, 0.89}) {
        const double y = b.min_y + frac * (b.max_y - b.min_y);
        std::vector<double> xs;
        auto scan = [&](const Ring& r) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                const Point2 a = r[i];
                const Point2 q = r[(i + 1) % r.size()];
                if ((a.y > y) != (q.y > y)) xs.push_back(a.x + (y - a.y) * (q.x - a.x) / (q.y - a.y));
            }
        };
        scan(poly.outer);
        for (const Ring& h : poly.holes) scan(h);
        std::sort(xs.begin(), xs.end());
        for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
            const double w = xs[i + 1] - xs[i];
            if (w > best_width) {
                best_width = w;
                best = {0.5 * (xs[i] + xs[i + 1]), y};
            }
        }
        if (best_width > 0.0) break;
    }
    return best;
}

Polygon translated(const Polygon& poly, Point2 offset) {
    Polygon out = poly;
    for (Point2& p : out.outer) p = p + offset;
    for (Ring& h : out.holes) {
        for (Point2& p : h) p = p + offset;
    }
    return out;
}

}  // namespace cityforge::geom
