#pragma once

#include <optional>
#include <span>

#include "cityforge/geometry/types.hpp"

namespace cityforge::geom {

/// Shoelace area of one ring; positive when counter-clockwise.
double ring_signed_area(std::span<const Point2> ring);

/// Signed area of a polygon: sum over its rings, so clockwise holes subtract.
double signed_area(const Polygon& poly);

/// Unsigned enclosed area (outer minus holes).
double area(const Polygon& poly);

Point2 ring_centroid(std::span<const Point2> ring);
BBox bbox(std::span<const Point2> ring);
BBox bbox(const Polygon& poly);
double perimeter(std::span<const Point2> ring);

/// Copy with the outer ring counter-clockwise and every hole clockwise.
Polygon oriented(Polygon poly);

/// Drops a repeated closing point, consecutive duplicates (closer than `tol`)
/// and vertices collinear with their neighbours.
Ring clean_ring(std::span<const Point2> ring, double tol = kCoincident);

/// True when segments [a,b] and [c,d] share at least one point (within `tol`).
bool segments_touch(Point2 a, Point2 b, Point2 c, Point2 d, double tol = 0.0);

/// Proper crossing point of two segments (interiors cross), if any.
std::optional<Point2> segment_crossing(Point2 a, Point2 b, Point2 c, Point2 d);

double distance_to_segment(Point2 p, Point2 a, Point2 b);
double distance_to_ring(Point2 p, std::span<const Point2> ring);
double distance_to_boundary(Point2 p, const Polygon& poly);

/// No two non-adjacent edges touch and adjacent edges meet only at their shared vertex.
bool ring_is_simple(std::span<const Point2> ring);

/// Rings pairwise disjoint and each simple.
bool polygon_is_simple(const Polygon& poly);

/// Throws NonSimple / DegeneratePolygon when the polygon violates the Polygon invariants
/// (orientation is not checked; see `oriented`).
void validate(const Polygon& poly);

enum class Location { Outside, Boundary, Inside };

Location locate(Point2 p, std::span<const Point2> ring, double tol = kCoincident);
Location locate(Point2 p, const Polygon& poly, double tol = kCoincident);

/// Inside or on the boundary (within `tol`).
bool contains(const Polygon& poly, Point2 p, double tol = kCoincident);

/// A point strictly inside the polygon (used for labels and containment probes).
Point2 interior_point(const Polygon& poly);

Polygon translated(const Polygon& poly, Point2 offset);

}  // namespace cityforge::geom
