#pragma once

#include <vector>

#include "cityforge/geometry/types.hpp"

namespace cityforge::geom {

/// Inward offset of a polygon by `d` meters (holes grow by the same amount).
/// Convex hole-free inputs are clipped by the offset half-planes; everything
/// else runs an edge-collapse wavefront and, when the offset ring
/// self-intersects, keeps the largest simple loop.
///
/// Every result vertex lies inside `poly` at distance >= d - 1e-6 from its
/// boundary. Throws EmptyResult when nothing is left, InvalidInput for d < 0.
Polygon inset(const Polygon& poly, double d);

/// Same with one distance per edge. Edge i of a ring runs from vertex i to
/// vertex i+1 in the ring's stored order. `hole_d` may be empty (holes then
/// use 0, i.e. stay as they are).
Polygon inset_edges(const Polygon& poly, const std::vector<double>& outer_d,
                    const std::vector<std::vector<double>>& hole_d = {});

bool is_convex(const Ring& ring);

}  // namespace cityforge::geom
