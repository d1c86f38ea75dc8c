#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "cityforge/geometry/types.hpp"

namespace cityforge::geom {

/// Ear-clipping triangulation. Holes are joined to the outer ring with
/// max-x bridges first. Indices refer to the flattened vertex list
/// (outer ring, then each hole in order); every triangle is counter-clockwise.
///
/// Throws DegeneratePolygon when the area is below kEps and NonSimple when
/// the rings self-intersect or no ear can be found.
std::vector<std::array<std::size_t, 3>> triangulate_indices(const Polygon& poly);

std::vector<Triangle> triangulate(const Polygon& poly);

double triangle_area(const Triangle& t);

}  // namespace cityforge::geom
