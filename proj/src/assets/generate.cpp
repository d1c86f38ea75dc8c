#include <cmath>
#include <numbers>

#include "cityforge/assets/assets.hpp"
#include "cityforge/core/rng.hpp"
#include "cityforge/core/text.hpp"
#include "cityforge/geometry/mesh.hpp"

namespace cityforge::assets {

using geom::Mesh;
using geom::Vec3;

namespace {

std::uint32_t push(Mesh& m, Vec3 p) {
    m.positions.push_back(p);
    return static_cast<std::uint32_t>(m.positions.size() - 1);
}

std::vector<std::uint32_t> ring(Mesh& m, double r, int n, double z) {
    std::vector<std::uint32_t> idx;
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * i / n;
        idx.push_back(push(m, {r * std::cos(a), r * std::sin(a), z}));
    }
    return idx;
}

// Gable roof on a w x d rectangle at z, ridge along x.
Mesh gable(double w, double d, double z, double rh) {
    Mesh m;
    const double x = w / 2, y = d / 2;
    const auto a = push(m, {-x, -y, z}), b = push(m, {x, -y, z}), c = push(m, {x, y, z}), e = push(m, {-x, y, z});
    const auto r0 = push(m, {-x, 0, z + rh}), r1 = push(m, {x, 0, z + rh});
    m.triangles = {{a, c, b}, {a, e, c},      // bottom, facing down
                   {a, b, r1}, {a, r1, r0},  // south slope
                   {c, e, r0}, {c, r0, r1},  // north slope
                   {b, c, r1}, {e, a, r0}};  // gables
    geom::compute_normals(m);
    return m;
}

void check(bool ok, const std::string& what) {
    if (!ok) throw AssetError(AssetErrc::BadParams, what);
}

std::array<double, 3> jitter(std::array<double, 3> c, std::uint64_t seed) {
    Rng rng(seed);
    const double f = rng.uniform(0.9, 1.1);
    for (double& v : c) v = std::min(1.0, v * f);
    return c;
}

}  // namespace

Mesh cone_mesh(double radius, double height, int segments, double z0) {
    Mesh m;
    const auto base = ring(m, radius, segments, z0);
    const auto apex = push(m, {0, 0, z0 + height});
    const auto centre = push(m, {0, 0, z0});
    for (int i = 0; i < segments; ++i) {
        const auto p = base[i], q = base[(i + 1) % segments];
        m.triangles.push_back({p, q, apex});
        m.triangles.push_back({centre, q, p});
    }
    geom::compute_normals(m);
    return m;
}

Mesh cylinder_mesh(double radius, double height, int segments, double z0) {
    Mesh m;
    const auto lo = ring(m, radius, segments, z0);
    const auto hi = ring(m, radius, segments, z0 + height);
    const auto cl = push(m, {0, 0, z0});
    const auto ch = push(m, {0, 0, z0 + height});
    for (int i = 0; i < segments; ++i) {
        const int j = (i + 1) % segments;
        m.triangles.push_back({lo[i], lo[j], hi[j]});
        m.triangles.push_back({lo[i], hi[j], hi[i]});
        m.triangles.push_back({cl, lo[j], lo[i]});
        m.triangles.push_back({ch, hi[i], hi[j]});
    }
    geom::compute_normals(m);
    return m;
}

Mesh box_mesh(double cx, double cy, double w, double d, double z0, double h) {
    geom::Polygon p{{{cx - w / 2, cy - d / 2}, {cx + w / 2, cy - d / 2}, {cx + w / 2, cy + d / 2}, {cx - w / 2, cy + d / 2}},
                    {}};
    return geom::extrude(p, h, z0);
}

AssetRecord generate_asset(AssetLibrary& library, std::string_view kind, const AssetParams& p, std::uint64_t seed) {
    AssetRecord r;
    r.kind = std::string(kind);
    Mesh mesh;
    if (kind == "building") {
        check(p.width > 0 && p.depth > 0 && p.height > 0, "building dimensions must be positive");
        check(p.roof == "flat" || p.roof == "gabled", "roof must be flat or gabled");
        mesh = box_mesh(0, 0, p.width, p.depth, 0, p.height);
        if (p.roof == "gabled") {
            check(p.roof_height > 0, "roof height must be positive");
            geom::append(mesh, gable(p.width, p.depth, p.height, p.roof_height));
        }
        r.description = p.roof + " roof building " + format_number(p.width) + " m wide " + format_number(p.depth) +
                        " m deep " + format_number(p.height) + " m tall";
        r.material = {jitter({0.62, 0.62, 0.64}, seed), 0.6};
    } else if (kind == "tree") {
        check(p.canopy_radius > 0 && p.canopy_height > 0 && p.trunk_radius > 0 && p.trunk_height > 0,
              "tree dimensions must be positive");
        check(p.segments >= 3, "segments must be >= 3");
        mesh = cylinder_mesh(p.trunk_radius, p.trunk_height, p.segments);
        geom::append(mesh, cone_mesh(p.canopy_radius, p.canopy_height, p.segments, p.trunk_height));
        r.description = "tree with cone canopy radius " + format_number(p.canopy_radius) + " m height " +
                        format_number(p.canopy_height) + " m on a " + format_number(p.trunk_height) + " m trunk";
        r.material = {jitter({0.18, 0.45, 0.16}, seed), 0.9};
    } else if (kind == "streetlamp") {
        check(p.pole_height > 0 && p.arm_length > 0, "streetlamp dimensions must be positive");
        check(p.segments >= 3, "segments must be >= 3");
        mesh = cylinder_mesh(0.1, p.pole_height, p.segments);
        geom::append(mesh, box_mesh(p.arm_length / 2, 0, p.arm_length, 0.1, p.pole_height - 0.1, 0.1));
        geom::append(mesh, box_mesh(p.arm_length, 0, 0.5, 0.3, p.pole_height - 0.35, 0.25));
        r.description = "streetlamp " + format_number(p.pole_height) + " m pole with " + format_number(p.arm_length) +
                        " m arm";
        r.material = {{0.2, 0.2, 0.22}, 0.4};
    } else {
        throw AssetError(AssetErrc::BadParams, "unknown asset kind: " + std::string(kind));
    }
    mesh.semantic_class = r.kind == "building" ? "building" : r.kind;
    r.mesh = std::make_shared<const Mesh>(std::move(mesh));
    r.id = r.kind + "_" + std::to_string(library.size());
    library.add(r);
    return library.at(library.size() - 1);
}

}  // namespace cityforge::assets
