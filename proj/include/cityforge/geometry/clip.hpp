#pragma once

#include "cityforge/geometry/types.hpp"

namespace cityforge::geom {

/// Sutherland-Hodgman: subject clipped by a convex counter-clockwise ring.
Ring clip_convex(const Ring& subject, const Ring& convex_ccw);

/// Area of the intersection of two valid polygons (holes respected), computed
/// over pairs of triangles of both triangulations.
double intersection_area(const Polygon& a, const Polygon& b);

}  // namespace cityforge::geom
