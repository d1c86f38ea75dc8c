#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cityforge/core/error.hpp"

namespace cityforge::geom {

/// Exact-comparison epsilon (areas, relative checks).
inline constexpr double kEps = 1e-9;
/// Two points closer than this are the same point (meters).
inline constexpr double kCoincident = 1e-6;

enum class GeometryErrc {
    DegeneratePolygon,
    NonSimple,
    EmptyResult,
    SplitFailed,
    NonPositiveHeight,
    NonPositiveWidth,
    InvalidInput,
};

using GeometryError = CodedError<GeometryErrc>;

/// Planar point in local meters.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
inline Point2 operator*(double s, Point2 a) { return {a.x * s, a.y * s}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
/// Left-hand normal (rotated +90 degrees).
inline Point2 perp(Point2 a) { return {-a.y, a.x}; }
/// Orientation of (a, b, c): > 0 counter-clockwise.
inline double orient(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

/// A closed ring stored without repeating the first point.
using Ring = std::vector<Point2>;

struct Polyline {
    std::vector<Point2> points;
};

/// Outer ring counter-clockwise, holes clockwise (see `oriented`).
struct Polygon {
    Ring outer;
    std::vector<Ring> holes;
};

struct BBox {
    double min_x = INFINITY;
    double min_y = INFINITY;
    double max_x = -INFINITY;
    double max_y = -INFINITY;

    void expand(Point2 p) {
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
    void expand(const BBox& b) {
        min_x = std::min(min_x, b.min_x);
        min_y = std::min(min_y, b.min_y);
        max_x = std::max(max_x, b.max_x);
        max_y = std::max(max_y, b.max_y);
    }
    bool empty() const { return min_x > max_x; }
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
    bool overlaps(const BBox& b, double tol = 0.0) const {
        return min_x <= b.max_x + tol && b.min_x <= max_x + tol && min_y <= b.max_y + tol &&
               b.min_y <= max_y + tol;
    }
    bool contains(Point2 p, double tol = 0.0) const {
        return p.x >= min_x - tol && p.x <= max_x + tol && p.y >= min_y - tol && p.y <= max_y + tol;
    }
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

using Triangle = std::array<Point2, 3>;
using TriIndex = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh, z up, meters.
struct Mesh {
    std::vector<Vec3> positions;
    std::vector<TriIndex> triangles;
    std::vector<Vec3> normals;
    std::string semantic_class;
};

struct BBox3 {
    Vec3 min{INFINITY, INFINITY, INFINITY};
    Vec3 max{-INFINITY, -INFINITY, -INFINITY};

    void expand(Vec3 p) {
        min = {std::min(min.x, p.x), std::min(min.y, p.y), std::min(min.z, p.z)};
        max = {std::max(max.x, p.x), std::max(max.y, p.y), std::max(max.z, p.z)};
    }
    bool empty() const { return min.x > max.x; }
};

}  // namespace cityforge::geom
