#include "cityforge/geometry/clip.hpp"

#include <cmath>

#include "cityforge/geometry/polygon.hpp"
#include "cityforge/geometry/triangulate.hpp"

namespace cityforge::geom {

Ring clip_convex(const Ring& subject, const Ring& convex_ccw) {
    Ring cur = subject;
    const std::size_t k = convex_ccw.size();
    for (std::size_t e = 0; e < k && !cur.empty(); ++e) {
        const Point2 a = convex_ccw[e];
        const Point2 b = convex_ccw[(e + 1) % k];
        Ring next;
        const std::size_t n = cur.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 p = cur[i];
            const Point2 q = cur[(i + 1) % n];
            const double sp = orient(a, b, p);
            const double sq = orient(a, b, q);
            if (sp >= 0.0) next.push_back(p);
            if ((sp >= 0.0) != (sq >= 0.0)) next.push_back(p + (q - p) * (sp / (sp - sq)));
        }
        cur = std::move(next);
    }
    return cur;
}

double intersection_area(const Polygon& a, const Polygon& b) {
    const BBox ba = bbox(a);
    const BBox bb = bbox(b);
    if (!ba.overlaps(bb)) return 0.0;
    const auto ta = triangulate(a);
    const auto tb = triangulate(b);
    std::vector<BBox> boxes_b;
    for (const Triangle& t : tb) boxes_b.push_back(bbox(std::span<const Point2>(t)));
    double total = 0.0;
    for (const Triangle& t : ta) {
        const BBox bt = bbox(std::span<const Point2>(t));
        if (!bt.overlaps(bb)) continue;
        const Ring subject(t.begin(), t.end());
        for (std::size_t j = 0; j < tb.size(); ++j) {
            if (!bt.overlaps(boxes_b[j])) continue;
            const Ring clip(tb[j].begin(), tb[j].end());
            const Ring r = clip_convex(subject, clip);
            if (r.size() >= 3) total += std::abs(ring_signed_area(r));
        }
    }
    return total;
}

}  // namespace cityforge::geom
