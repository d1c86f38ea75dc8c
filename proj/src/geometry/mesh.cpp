#include "cityforge/geometry/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "cityforge/geometry/polygon.hpp"
#include "cityforge/geometry/triangulate.hpp"

namespace cityforge::geom {

namespace {

std::uint32_t u32(std::size_t i) { return static_cast<std::uint32_t>(i); }

Vec3 lift(Point2 p, double z) { return {p.x, p.y, z}; }

}  // namespace

Mesh extrude(const Polygon& poly, double height, double base) {
    if (!(height > 0.0)) throw GeometryError(GeometryErrc::NonPositiveHeight, "extrude: height must be > 0");
    const Polygon op = oriented(poly);
    const auto caps = triangulate_indices(op);

    std::vector<Point2> flat(op.outer.begin(), op.outer.end());
    for (const Ring& h : op.holes) flat.insert(flat.end(), h.begin(), h.end());
    const std::size_t n = flat.size();

    Mesh m;
    m.positions.reserve(2 * n);
    for (const Point2& p : flat) m.positions.push_back(lift(p, base));
    for (const Point2& p : flat) m.positions.push_back(lift(p, base + height));

    for (const auto& t : caps) m.triangles.push_back({u32(t[0]), u32(t[2]), u32(t[1])});
    for (const auto& t : caps) m.triangles.push_back({u32(t[0] + n), u32(t[1] + n), u32(t[2] + n)});

    auto walls = [&](std::size_t offset, std::size_t k) {
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t a = offset + i;
            const std::size_t b = offset + (i + 1) % k;
            m.triangles.push_back({u32(a), u32(b), u32(b + n)});
            m.triangles.push_back({u32(a), u32(b + n), u32(a + n)});
        }
    };
    std::size_t offset = 0;
    walls(offset, op.outer.size());
    offset += op.outer.size();
    for (const Ring& h : op.holes) {
        walls(offset, h.size());
        offset += h.size();
    }
    compute_normals(m);
    return m;
}

Mesh sweep_profile(const Polyline& line, double width, double z) {
    if (!(width > 0.0)) throw GeometryError(GeometryErrc::NonPositiveWidth, "sweep: width must be > 0");
    std::vector<Point2> pts;
    for (const Point2& p : line.points) {
        if (pts.empty() || distance(pts.back(), p) > kEps) pts.push_back(p);
    }
    if (pts.size() < 2) throw GeometryError(GeometryErrc::InvalidInput, "sweep: polyline needs two distinct points");

    const double half = 0.5 * width;
    const std::size_t n = pts.size();
    auto seg_normal = [&](std::size_t i) {
        const Point2 d = pts[i + 1] - pts[i];
        return perp(d * (1.0 / norm(d)));
    };

    Mesh m;
    for (std::size_t i = 0; i < n; ++i) {
        Point2 off;
        if (i == 0) {
            off = seg_normal(0) * half;
        } else if (i + 1 == n) {
            off = seg_normal(n - 2) * half;
        } else {
            const Point2 n1 = seg_normal(i - 1);
            const Point2 n2 = seg_normal(i);
            const Point2 s = n1 + n2;
            const double len = norm(s);
            if (len < 1e-9) {
                off = n1 * half;
            } else {
                const Point2 miter = s * (1.0 / len);
                // Miter length limited to 4x the half width on very sharp turns.
                const double scale = std::min(half / std::max(dot(miter, n1), 1e-12), 4.0 * half);
                off = miter * scale;
            }
        }
        m.positions.push_back(lift(pts[i] + off, z));
        m.positions.push_back(lift(pts[i] - off, z));
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::uint32_t l0 = u32(2 * i), r0 = u32(2 * i + 1), l1 = u32(2 * i + 2), r1 = u32(2 * i + 3);
        m.triangles.push_back({r0, r1, l1});
        m.triangles.push_back({r0, l1, l0});
    }
    m.normals.assign(m.positions.size(), Vec3{0.0, 0.0, 1.0});
    return m;
}

Mesh flat_mesh(const Polygon& poly, double z) {
    const auto tris = triangulate_indices(poly);
    Mesh m;
    for (const Point2& p : poly.outer) m.positions.push_back(lift(p, z));
    for (const Ring& h : poly.holes) {
        for (const Point2& p : h) m.positions.push_back(lift(p, z));
    }
    for (const auto& t : tris) m.triangles.push_back({u32(t[0]), u32(t[1]), u32(t[2])});
    m.normals.assign(m.positions.size(), Vec3{0.0, 0.0, 1.0});
    return m;
}

double mesh_volume(const Mesh& mesh) {
    double six = 0.0;
    for (const TriIndex& t : mesh.triangles) {
        const Vec3 a = mesh.positions[t[0]];
        const Vec3 b = mesh.positions[t[1]];
        const Vec3 c = mesh.positions[t[2]];
        six += dot(a, cross(b, c));
    }
    return six / 6.0;
}

double mesh_area(const Mesh& mesh) {
    double total = 0.0;
    for (const TriIndex& t : mesh.triangles) {
        const Vec3 a = mesh.positions[t[0]];
        total += 0.5 * norm(cross(mesh.positions[t[1]] - a, mesh.positions[t[2]] - a));
    }
    return total;
}

bool is_closed(const Mesh& mesh) {
    std::vector<std::uint64_t> directed;
    directed.reserve(mesh.triangles.size() * 3);
    auto key = [](std::uint32_t a, std::uint32_t b) { return (std::uint64_t{a} << 32) | b; };
    for (const TriIndex& t : mesh.triangles) {
        for (int k = 0; k < 3; ++k) directed.push_back(key(t[k], t[(k + 1) % 3]));
    }
    std::sort(directed.begin(), directed.end());
    if (std::adjacent_find(directed.begin(), directed.end()) != directed.end()) return false;
    for (std::uint64_t e : directed) {
        const std::uint64_t rev = key(static_cast<std::uint32_t>(e & 0xffffffffu), static_cast<std::uint32_t>(e >> 32));
        if (!std::binary_search(directed.begin(), directed.end(), rev)) return false;
    }
    return !directed.empty();
}

void compute_normals(Mesh& mesh) {
    std::vector<Vec3> acc(mesh.positions.size());
    for (const TriIndex& t : mesh.triangles) {
        const Vec3 a = mesh.positions[t[0]];
        const Vec3 n = cross(mesh.positions[t[1]] - a, mesh.positions[t[2]] - a);
        for (std::uint32_t i : t) acc[i] = acc[i] + n;
    }
    mesh.normals.resize(mesh.positions.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
        const double len = norm(acc[i]);
        mesh.normals[i] = len > 1e-300 ? acc[i] * (1.0 / len) : Vec3{0.0, 0.0, 1.0};
    }
}

void append(Mesh& dst, const Mesh& src) {
    const std::uint32_t base = u32(dst.positions.size());
    dst.positions.insert(dst.positions.end(), src.positions.begin(), src.positions.end());
    dst.normals.insert(dst.normals.end(), src.normals.begin(), src.normals.end());
    for (const TriIndex& t : src.triangles) dst.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
}

BBox3 bounds(const Mesh& mesh) {
    BBox3 b;
    for (const Vec3& p : mesh.positions) b.expand(p);
    return b;
}

}  // namespace cityforge::geom
