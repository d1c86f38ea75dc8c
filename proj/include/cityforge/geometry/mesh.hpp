#pragma once

#include "cityforge/geometry/types.hpp"

namespace cityforge::geom {

/// Closed prism between z = base and z = base + height. Caps share vertices
/// with the walls, so a unit square gives 8 vertices and 12 triangles.
Mesh extrude(const Polygon& poly, double height, double base = 0.0);

/// Flat ribbon of the given width centred on the polyline, mitered at joints,
/// lying at height z facing +z.
Mesh sweep_profile(const Polyline& line, double width, double z = 0.0);

/// Single-sided flat mesh of a polygon at height z facing +z.
Mesh flat_mesh(const Polygon& poly, double z = 0.0);

/// Enclosed volume by the signed tetrahedron sum (closed, outward meshes).
double mesh_volume(const Mesh& mesh);

/// Sum of triangle areas.
double mesh_area(const Mesh& mesh);

/// Every undirected edge is used by exactly two triangles, once in each direction.
bool is_closed(const Mesh& mesh);

/// Area-weighted vertex normals; isolated vertices get +z.
void compute_normals(Mesh& mesh);

/// Appends src to dst (indices shifted). Normals are carried over.
void append(Mesh& dst, const Mesh& src);

BBox3 bounds(const Mesh& mesh);

}  // namespace cityforge::geom
