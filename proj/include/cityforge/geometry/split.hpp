#pragma once

#include <utility>
#include <vector>

#include "cityforge/geometry/types.hpp"

namespace cityforge::geom {

/// Andrew's monotone chain; counter-clockwise, collinear points dropped.
Ring convex_hull(std::vector<Point2> points);

struct OrientedBox {
    Point2 center;
    Point2 axis_u{1.0, 0.0};  // unit
    Point2 axis_v{0.0, 1.0};  // unit, perp(axis_u)
    double half_u = 0.0;
    double half_v = 0.0;

    double area() const { return 4.0 * half_u * half_v; }
    Ring corners() const;
};

/// Minimum-area oriented bounding box by rotating calipers over the hull.
OrientedBox min_area_obb(const Ring& ring);

/// Normal of the cut line used by obb_split: the box's longer axis. On a tie
/// the axis closer to x wins (the cut is then perpendicular to x).
Point2 split_axis(const OrientedBox& box);

/// Cuts a hole-free polygon with the line through `origin` whose normal is
/// `normal`. Returns the pieces on the negative side, then the positive side;
/// `positive_count` receives the number of positive pieces. Vertices exactly
/// on the line count as negative.
std::vector<Ring> split_by_line(const Ring& ring, Point2 origin, Point2 normal,
                                std::size_t* positive_count = nullptr);

/// Halves a simple hole-free polygon across the centre of its minimum-area
/// OBB, perpendicular to the longer axis. Throws SplitFailed when the cut does
/// not yield exactly one piece per side or either half is below 1e-6 m².
std::pair<Polygon, Polygon> obb_split(const Polygon& poly);

/// Like obb_split but a non-convex polygon may fall into more than two pieces.
/// Throws SplitFailed when any piece is below 1e-6 m² or a piece is not simple.
std::vector<Polygon> obb_partition(const Polygon& poly);

}  // namespace cityforge::geom
