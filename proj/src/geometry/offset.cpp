#include "cityforge/geometry/offset.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "cityforge/geometry/polygon.hpp"

namespace cityforge::geom {

namespace {

struct WeightedRing {
    Ring pts;
    std::vector<double> w;  // w[i] belongs to edge pts[i] -> pts[i+1]
};

WeightedRing reversed(const WeightedRing& r) {
    const std::size_t n = r.pts.size();
    WeightedRing out;
    out.pts.assign(r.pts.rbegin(), r.pts.rend());
    out.w.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.w[k] = r.w[(2 * n - 2 - k) % n];
    return out;
}

// Drops zero-length edges and merges collinear neighbours, keeping the larger
// distance of the merged pair.
WeightedRing clean_weighted(WeightedRing r) {
    bool changed = true;
    while (changed && r.pts.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < r.pts.size() && r.pts.size() >= 3; ++i) {
            const std::size_t n = r.pts.size();
            const std::size_t nx = (i + 1) % n;
            if (distance(r.pts[i], r.pts[nx]) <= kCoincident) {
                r.w[nx] = std::max(r.w[nx], r.w[i]);
                r.pts.erase(r.pts.begin() + static_cast<std::ptrdiff_t>(nx));
                r.w.erase(r.w.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
            const std::size_t pv = (i + n - 1) % n;
            const Point2 a = r.pts[pv];
            const Point2 b = r.pts[i];
            const Point2 c = r.pts[nx];
            const double span = distance(a, c);
            if (std::abs(orient(a, b, c)) <= kCoincident * std::max(span, 1.0)) {
                r.w[pv] = std::max(r.w[pv], r.w[i]);
                r.pts.erase(r.pts.begin() + static_cast<std::ptrdiff_t>(i));
                r.w.erase(r.w.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    if (r.pts.size() < 3) {
        r.pts.clear();
        r.w.clear();
    }
    return r;
}

// Points x on the moving line satisfy dot(n, x) = c + t * w.
struct Front {
    Point2 dir;
    Point2 n;
    double c = 0.0;
    double w = 0.0;
};

std::optional<Point2> meet(const Front& a, const Front& b, double t) {
    const double det = cross(a.n, b.n);
    if (std::abs(det) < 1e-12) return std::nullopt;
    const double ra = a.c + t * a.w;
    const double rb = b.c + t * b.w;
    return Point2{(ra * b.n.y - rb * a.n.y) / det, (a.n.x * rb - b.n.x * ra) / det};
}

template <typename T>
void erase_at(std::vector<T>& v, std::size_t i) {
    v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
}

// Removes adjacent parallel fronts left behind by collapses. Returns false
// when a configuration the wavefront cannot continue from shows up.
bool settle_parallel(std::vector<Front>& fronts, double t) {
    bool changed = true;
    while (changed && fronts.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < fronts.size(); ++i) {
            const std::size_t j = (i + 1) % fronts.size();
            const Front& a = fronts[i];
            const Front& b = fronts[j];
            if (std::abs(cross(a.n, b.n)) >= 1e-12) continue;
            if (dot(a.dir, b.dir) < 0.0) {
                // A sliver closed up: both sides vanish together.
                if (j > i) {
                    erase_at(fronts, j);
                    erase_at(fronts, i);
                } else {
                    erase_at(fronts, i);
                    erase_at(fronts, j);
                }
            } else {
                const double gap = (a.c + t * a.w) - (b.c + t * b.w);
                if (std::abs(gap) > 1e-9 || std::abs(a.w - b.w) > 1e-12) return false;
                erase_at(fronts, j);
            }
            changed = true;
            break;
        }
    }
    return true;
}

std::vector<Ring> split_self_crossings(const Ring& ring) {
    std::vector<Ring> out;
    std::vector<Ring> stack{ring};
    while (!stack.empty()) {
        Ring r = std::move(stack.back());
        stack.pop_back();
        const std::size_t n = r.size();
        bool split = false;
        for (std::size_t i = 0; i < n && !split; ++i) {
            for (std::size_t j = i + 2; j < n && !split; ++j) {
                if (i == 0 && j == n - 1) continue;
                const auto x = segment_crossing(r[i], r[i + 1], r[j], r[(j + 1) % n]);
                if (!x) continue;
                Ring a{*x};
                for (std::size_t k = i + 1; k <= j; ++k) a.push_back(r[k]);
                Ring b{*x};
                for (std::size_t k = j + 1; k < n; ++k) b.push_back(r[k]);
                for (std::size_t k = 0; k <= i; ++k) b.push_back(r[k]);
                stack.push_back(std::move(a));
                stack.push_back(std::move(b));
                split = true;
            }
        }
        if (!split) out.push_back(std::move(r));
    }
    return out;
}

// Offsets a ring to its left by w[i] per edge. For a counter-clockwise ring
// that shrinks it, for a clockwise hole it grows the hole. Returns the loop
// with the largest area of the requested orientation.
std::optional<Ring> wavefront(const WeightedRing& r, bool want_ccw) {
    std::vector<Front> fronts;
    const std::size_t n = r.pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = r.pts[i];
        const Point2 b = r.pts[(i + 1) % n];
        const Point2 d = (b - a) * (1.0 / distance(a, b));
        const Point2 nrm = perp(d);
        fronts.push_back({d, nrm, dot(nrm, a), r.w[i]});
    }

    double t = 0.0;
    for (std::size_t guard = 0; guard <= n + 1; ++guard) {
        if (!settle_parallel(fronts, t)) return std::nullopt;
        if (fronts.size() < 3) return Ring{};
        const std::size_t m = fronts.size();
        double best_t = 2.0;
        std::size_t best_i = m;
        for (std::size_t i = 0; i < m; ++i) {
            const Front& prev = fronts[(i + m - 1) % m];
            const Front& cur = fronts[i];
            const Front& next = fronts[(i + 1) % m];
            const auto s0 = meet(prev, cur, t);
            const auto e0 = meet(cur, next, t);
            const auto s1 = meet(prev, cur, 1.0);
            const auto e1 = meet(cur, next, 1.0);
            if (!s0 || !e0 || !s1 || !e1) return std::nullopt;
            const double len_t = dot(*e0 - *s0, cur.dir);
            const double len_1 = dot(*e1 - *s1, cur.dir);
            if (len_1 >= 0.0) continue;
            const double tc = len_t <= 0.0 ? t : t + (1.0 - t) * len_t / (len_t - len_1);
            if (tc < best_t) {
                best_t = tc;
                best_i = i;
            }
        }
        if (best_i == m || best_t >= 1.0 - 1e-12) break;
        erase_at(fronts, best_i);
        t = best_t;
    }

    const std::size_t m = fronts.size();
    Ring raw;
    for (std::size_t i = 0; i < m; ++i) {
        const auto p = meet(fronts[(i + m - 1) % m], fronts[i], 1.0);
        if (!p) return std::nullopt;
        raw.push_back(*p);
    }

    std::optional<Ring> best;
    double best_area = 0.0;
    for (const Ring& loop : split_self_crossings(raw)) {
        Ring c = clean_ring(loop);
        if (c.size() < 3 || !ring_is_simple(c)) continue;
        const double a = ring_signed_area(c) * (want_ccw ? 1.0 : -1.0);
        if (a > kEps && a > best_area) {
            best_area = a;
            best = std::move(c);
        }
    }
    if (!best) return Ring{};
    return best;
}

// Keeps the side of the line dot(n, x) = c that n points into.
Ring clip_half_plane(const Ring& ring, Point2 n, double c) {
    Ring out;
    const std::size_t k = ring.size();
    for (std::size_t i = 0; i < k; ++i) {
        const Point2 p = ring[i];
        const Point2 q = ring[(i + 1) % k];
        const double sp = dot(n, p) - c;
        const double sq = dot(n, q) - c;
        if (sp >= 0.0) out.push_back(p);
        if ((sp >= 0.0) != (sq >= 0.0)) {
            const double u = sp / (sp - sq);
            out.push_back(p + (q - p) * u);
        }
    }
    return out;
}

Ring convex_inset(const WeightedRing& r) {
    Ring cur = r.pts;
    const std::size_t n = r.pts.size();
    for (std::size_t i = 0; i < n && !cur.empty(); ++i) {
        const Point2 a = r.pts[i];
        const Point2 b = r.pts[(i + 1) % n];
        const Point2 nrm = perp((b - a) * (1.0 / distance(a, b)));
        cur = clip_half_plane(cur, nrm, dot(nrm, a) + r.w[i]);
    }
    return clean_ring(cur);
}

bool respects_distances(const Polygon& result, const Polygon& src, const std::vector<WeightedRing>& rings) {
    auto check = [&](Point2 p) {
        if (locate(p, src, kCoincident) == Location::Outside) return false;
        for (const WeightedRing& r : rings) {
            const std::size_t n = r.pts.size();
            for (std::size_t i = 0; i < n; ++i) {
                if (distance_to_segment(p, r.pts[i], r.pts[(i + 1) % n]) < r.w[i] - 1e-6) return false;
            }
        }
        return true;
    };
    for (const Point2& p : result.outer) {
        if (!check(p)) return false;
    }
    for (const Ring& h : result.holes) {
        for (const Point2& p : h) {
            if (!check(p)) return false;
        }
    }
    return true;
}

[[noreturn]] void empty_result(const char* why) { throw GeometryError(GeometryErrc::EmptyResult, why); }

}  // namespace

bool is_convex(const Ring& ring) {
    const std::size_t n = ring.size();
    if (n < 3) return false;
    const double s = ring_signed_area(ring) >= 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (s * orient(ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]) < 0.0) return false;
    }
    return true;
}

Polygon inset_edges(const Polygon& poly, const std::vector<double>& outer_d,
                    const std::vector<std::vector<double>>& hole_d) {
    if (outer_d.size() != poly.outer.size()) {
        throw GeometryError(GeometryErrc::InvalidInput, "inset: one distance per outer edge required");
    }
    if (!hole_d.empty() && hole_d.size() != poly.holes.size()) {
        throw GeometryError(GeometryErrc::InvalidInput, "inset: one distance list per hole required");
    }
    bool all_zero = true;
    auto check_d = [&](double d) {
        if (!(d >= 0.0) || !std::isfinite(d)) {
            throw GeometryError(GeometryErrc::InvalidInput, "inset distance must be >= 0");
        }
        if (d > 0.0) all_zero = false;
    };
    for (double d : outer_d) check_d(d);
    for (const auto& hd : hole_d) {
        for (double d : hd) check_d(d);
    }
    if (all_zero) return poly;

    WeightedRing outer{poly.outer, outer_d};
    if (ring_signed_area(outer.pts) < 0.0) outer = reversed(outer);
    outer = clean_weighted(outer);
    if (outer.pts.empty()) empty_result("inset: degenerate outer ring");

    std::vector<WeightedRing> holes;
    for (std::size_t h = 0; h < poly.holes.size(); ++h) {
        WeightedRing hr{poly.holes[h],
                        hole_d.empty() ? std::vector<double>(poly.holes[h].size(), 0.0) : hole_d[h]};
        if (hr.w.size() != hr.pts.size()) {
            throw GeometryError(GeometryErrc::InvalidInput, "inset: one distance per hole edge required");
        }
        if (ring_signed_area(hr.pts) > 0.0) hr = reversed(hr);
        hr = clean_weighted(hr);
        if (!hr.pts.empty()) holes.push_back(std::move(hr));
    }

    Polygon out;
    if (holes.empty() && is_convex(outer.pts)) {
        out.outer = convex_inset(outer);
    } else {
        const auto ring = wavefront(outer, true);
        if (!ring) empty_result("inset: offset wavefront could not be resolved");
        out.outer = *ring;
    }
    if (out.outer.size() < 3 || ring_signed_area(out.outer) <= kEps) empty_result("inset collapsed the polygon");

    for (const WeightedRing& h : holes) {
        bool zero = std::all_of(h.w.begin(), h.w.end(), [](double d) { return d == 0.0; });
        if (zero) {
            out.holes.push_back(h.pts);
            continue;
        }
        const auto grown = wavefront(h, false);
        if (!grown || grown->empty()) empty_result("inset: hole offset could not be resolved");
        out.holes.push_back(*grown);
    }
    if (!polygon_is_simple(out)) empty_result("inset: grown holes reach the outer boundary");

    std::vector<WeightedRing> all{outer};
    all.insert(all.end(), holes.begin(), holes.end());
    if (!respects_distances(out, poly, all)) empty_result("inset: offset left the allowed region");
    if (area(out) <= kEps) empty_result("inset collapsed the polygon");
    return out;
}

Polygon inset(const Polygon& poly, double d) {
    std::vector<std::vector<double>> hd;
    for (const Ring& h : poly.holes) hd.emplace_back(h.size(), d);
    return inset_edges(poly, std::vector<double>(poly.outer.size(), d), hd);
}

}  // namespace cityforge::geom
