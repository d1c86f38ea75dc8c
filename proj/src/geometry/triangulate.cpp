#include "cityforge/geometry/triangulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cityforge/geometry/polygon.hpp"

namespace cityforge::geom {

namespace {

class EarClipper {
public:
    explicit EarClipper(const Polygon& poly) {
        for (const Point2& p : poly.outer) pts_.push_back(p);
        for (const Ring& h : poly.holes) {
            for (const Point2& p : h) pts_.push_back(p);
        }
        const BBox b = bbox(poly.outer);
        const double diag = std::hypot(b.width(), b.height());
        eps_area_ = 1e-14 * diag * diag;

        std::size_t base = 0;
        ring_ = ccw_indices(poly.outer, base, /*want_ccw=*/true);
        base += poly.outer.size();
        for (const Ring& h : poly.holes) {
            holes_.push_back(ccw_indices(h, base, /*want_ccw=*/false));
            base += h.size();
        }
    }

    std::vector<std::array<std::size_t, 3>> run() {
        // Holes right-most first so later bridges never cross earlier ones.
        std::vector<std::pair<double, std::size_t>> order;
        for (std::size_t i = 0; i < holes_.size(); ++i) {
            double mx = -INFINITY;
            for (std::size_t id : holes_[i]) mx = std::max(mx, pts_[id].x);
            order.emplace_back(-mx, i);
        }
        std::sort(order.begin(), order.end());
        for (const auto& [neg_x, i] : order) bridge(holes_[i]);
        return clip();
    }

private:
    std::vector<std::size_t> ccw_indices(const Ring& r, std::size_t base, bool want_ccw) const {
        std::vector<std::size_t> idx(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) idx[i] = base + i;
        const bool is_ccw = ring_signed_area(r) > 0.0;
        if (is_ccw != want_ccw) std::reverse(idx.begin(), idx.end());
        return idx;
    }

    Point2 at(std::size_t id) const { return pts_[id]; }

    bool same(Point2 a, Point2 b) const { return a.x == b.x && a.y == b.y; }

    // Direction a->b lies inside the polygon's angle at ring position k.
    bool locally_inside(std::size_t k, Point2 b) const {
        const std::size_t n = ring_.size();
        const Point2 p = at(ring_[(k + n - 1) % n]);
        const Point2 a = at(ring_[k]);
        const Point2 q = at(ring_[(k + 1) % n]);
        const bool convex = orient(p, a, q) >= 0.0;
        const bool left_of_next = orient(a, q, b) >= 0.0;
        const bool left_of_prev = orient(p, a, b) >= 0.0;
        return convex ? (left_of_next && left_of_prev) : (left_of_next || left_of_prev);
    }

    void bridge(const std::vector<std::size_t>& hole) {
        std::size_t m = 0;
        for (std::size_t i = 1; i < hole.size(); ++i) {
            const Point2 p = at(hole[i]);
            const Point2 q = at(hole[m]);
            if (p.x > q.x || (p.x == q.x && p.y < q.y)) m = i;
        }
        const Point2 hm = at(hole[m]);

        // Closest ring edge hit by the ray from hm towards +x.
        const std::size_t n = ring_.size();
        double best_x = INFINITY;
        std::size_t best_k = n;
        for (std::size_t k = 0; k < n; ++k) {
            const Point2 a = at(ring_[k]);
            const Point2 b = at(ring_[(k + 1) % n]);
            if ((a.y > hm.y) == (b.y > hm.y) && a.y != hm.y && b.y != hm.y) continue;
            double x;
            if (a.y == b.y) {
                if (a.y != hm.y) continue;
                x = std::min(a.x, b.x);
            } else {
                if (std::min(a.y, b.y) > hm.y || std::max(a.y, b.y) < hm.y) continue;
                x = a.x + (hm.y - a.y) * (b.x - a.x) / (b.y - a.y);
            }
            if (x < hm.x) continue;
            if (x < best_x) {
                best_x = x;
                best_k = k;
            }
        }
        if (best_k == n) throw GeometryError(GeometryErrc::NonSimple, "hole lies outside the outer ring");

        const Point2 ea = at(ring_[best_k]);
        const Point2 eb = at(ring_[(best_k + 1) % n]);
        const Point2 hit{best_x, hm.y};
        Point2 target;
        if (same(hit, ea)) {
            target = ea;
        } else if (same(hit, eb)) {
            target = eb;
        } else {
            target = ea.x > eb.x ? ea : eb;
        }

        // A vertex inside triangle (hm, hit, target) would block the bridge; take
        // the one with the smallest angle to the ray instead.
        if (!same(target, hit)) {
            const double o = orient(hm, hit, target);
            double best_tan = INFINITY;
            double best_d = INFINITY;
            Point2 chosen = target;
            for (std::size_t k = 0; k < n; ++k) {
                const Point2 r = at(ring_[k]);
                if (same(r, target) || r.x <= hm.x) continue;
                const double s1 = orient(hm, hit, r);
                const double s2 = orient(hit, target, r);
                const double s3 = orient(target, hm, r);
                const bool inside = o > 0 ? (s1 >= 0 && s2 >= 0 && s3 >= 0) : (s1 <= 0 && s2 <= 0 && s3 <= 0);
                if (!inside) continue;
                const double t = std::abs(r.y - hm.y) / (r.x - hm.x);
                const double d = distance(r, hm);
                if (t < best_tan || (t == best_tan && d < best_d)) {
                    best_tan = t;
                    best_d = d;
                    chosen = r;
                }
            }
            target = chosen;
        }

        // Among duplicate occurrences (earlier bridges) pick the one whose angle
        // contains the bridge direction.
        std::size_t pos = n;
        for (std::size_t k = 0; k < n; ++k) {
            if (!same(at(ring_[k]), target)) continue;
            if (pos == n) pos = k;
            if (locally_inside(k, hm)) {
                pos = k;
                break;
            }
        }

        std::vector<std::size_t> splice;
        splice.reserve(hole.size() + 2);
        for (std::size_t i = 0; i <= hole.size(); ++i) splice.push_back(hole[(m + i) % hole.size()]);
        splice.push_back(ring_[pos]);
        ring_.insert(ring_.begin() + static_cast<std::ptrdiff_t>(pos + 1), splice.begin(), splice.end());
    }

    bool blocks(Point2 q, Point2 a, Point2 b, Point2 c) const {
        if (same(q, a) || same(q, b) || same(q, c)) return false;
        return orient(a, b, q) >= -eps_area_ && orient(b, c, q) >= -eps_area_ && orient(c, a, q) >= -eps_area_;
    }

    bool is_ear(std::size_t i, bool relaxed) const {
        const std::size_t n = ring_.size();
        const Point2 a = at(ring_[(i + n - 1) % n]);
        const Point2 b = at(ring_[i]);
        const Point2 c = at(ring_[(i + 1) % n]);
        const double o = orient(a, b, c);
        if (relaxed ? (o < -eps_area_) : (o <= eps_area_)) return false;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || j == (i + n - 1) % n || j == (i + 1) % n) continue;
            const std::size_t pj = (j + n - 1) % n;
            const std::size_t nj = (j + 1) % n;
            // Only reflex (or flat) vertices can sit inside an ear.
            if (!relaxed && orient(at(ring_[pj]), at(ring_[j]), at(ring_[nj])) > eps_area_) continue;
            if (blocks(at(ring_[j]), a, b, c)) return false;
        }
        return true;
    }

    std::vector<std::array<std::size_t, 3>> clip() {
        std::vector<std::array<std::size_t, 3>> tris;
        tris.reserve(ring_.size());
        std::size_t start = 0;
        while (ring_.size() > 3) {
            const std::size_t n = ring_.size();
            bool clipped = false;
            for (int pass = 0; pass < 2 && !clipped; ++pass) {
                for (std::size_t k = 0; k < n; ++k) {
                    const std::size_t i = (start + k) % n;
                    if (!is_ear(i, pass == 1)) continue;
                    tris.push_back({ring_[(i + n - 1) % n], ring_[i], ring_[(i + 1) % n]});
                    ring_.erase(ring_.begin() + static_cast<std::ptrdiff_t>(i));
                    start = i == 0 ? 0 : i - 1;
                    clipped = true;
                    break;
                }
            }
            if (!clipped) throw GeometryError(GeometryErrc::NonSimple, "ear clipping found no ear");
        }
        if (ring_.size() == 3) tris.push_back({ring_[0], ring_[1], ring_[2]});
        return tris;
    }

    std::vector<Point2> pts_;
    std::vector<std::size_t> ring_;
    std::vector<std::vector<std::size_t>> holes_;
    double eps_area_ = 0.0;
};

}  // namespace

std::vector<std::array<std::size_t, 3>> triangulate_indices(const Polygon& poly) {
    validate(poly);
    if (area(oriented(poly)) <= kEps) {
        throw GeometryError(GeometryErrc::DegeneratePolygon, "polygon area below threshold");
    }
    return EarClipper(poly).run();
}

std::vector<Triangle> triangulate(const Polygon& poly) {
    std::vector<Point2> flat(poly.outer.begin(), poly.outer.end());
    for (const Ring& h : poly.holes) flat.insert(flat.end(), h.begin(), h.end());
    std::vector<Triangle> out;
    for (const auto& t : triangulate_indices(poly)) out.push_back({flat[t[0]], flat[t[1]], flat[t[2]]});
    return out;
}

double triangle_area(const Triangle& t) { return 0.5 * orient(t[0], t[1], t[2]); }

}  // namespace cityforge::geom
