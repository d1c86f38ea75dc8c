#include <algorithm>
#include <cmath>

#include "cityforge/agents/agents.hpp"
#include "cityforge/core/text.hpp"
#include "cityforge/geometry/clip.hpp"
#include "cityforge/geometry/polygon.hpp"

namespace cityforge::agents {

using geom::Point2;

namespace {

std::uint16_t label_index(raster::ClassGrid& g, const std::string& label) {
    if (auto c = g.class_of(label)) return *c;
    g.labels.push_back(label);
    return static_cast<std::uint16_t>(g.labels.size() - 1);
}

void fill_triangle(raster::ClassGrid& g, Point2 a, Point2 b, Point2 c, std::uint16_t cls) {
    const double area = geom::orient(a, b, c);
    if (std::abs(area) < 1e-12) return;
    if (area < 0) std::swap(b, c);
    const double cs = g.cell_size;
    const double min_x = std::min({a.x, b.x, c.x}), max_x = std::max({a.x, b.x, c.x});
    const double min_y = std::min({a.y, b.y, c.y}), max_y = std::max({a.y, b.y, c.y});
    // Columns whose centre (col + 0.5) * cs lies in [min_x, max_x].
    const int c0 = std::max(0, static_cast<int>(std::ceil(min_x / cs - 0.5)));
    const int c1 = std::min(g.width - 1, static_cast<int>(std::floor(max_x / cs - 0.5)));
    // Centre y = (height - row - 0.5) * cs.
    const int r0 = std::max(0, static_cast<int>(std::ceil(g.height - 0.5 - max_y / cs)));
    const int r1 = std::min(g.height - 1, static_cast<int>(std::floor(g.height - 0.5 - min_y / cs)));
    for (int row = r0; row <= r1; ++row) {
        for (int col = c0; col <= c1; ++col) {
            const Point2 p = g.pixel_center(col, row);
            if (geom::orient(a, b, p) >= 0 && geom::orient(b, c, p) >= 0 && geom::orient(c, a, p) >= 0) {
                g.classes[static_cast<std::size_t>(row) * static_cast<std::size_t>(g.width) + static_cast<std::size_t>(col)] =
                    cls;
            }
        }
    }
}

}  // namespace

const std::vector<std::string>& class_priority() {
    static const std::vector<std::string> order = {"road", "green", "water", "building"};
    return order;
}

double EvalReport::min_iou() const {
    double m = 1.0;
    for (const auto& [cls, v] : per_class_iou) m = std::min(m, v);
    return m;
}

raster::ClassGrid render_semantic(const scene::SceneState& state, const raster::ClassGrid& like) {
    raster::ClassGrid g;
    g.width = like.width;
    g.height = like.height;
    g.cell_size = like.cell_size;
    g.labels = like.labels;
    const std::uint16_t ground = label_index(g, "ground");
    g.classes.assign(static_cast<std::size_t>(g.width) * static_cast<std::size_t>(g.height), ground);
    const auto& order = class_priority();
    std::vector<std::pair<std::size_t, const scene::SceneObject*>> drawn;
    for (const auto& [name, o] : state.objects) {
        auto it = std::find(order.begin(), order.end(), o.semantic_class);
        if (it != order.end() && o.mesh) drawn.emplace_back(static_cast<std::size_t>(it - order.begin()), &o);
    }
    // Stable on the name order of the object map.
    std::stable_sort(drawn.begin(), drawn.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [prio, o] : drawn) {
        const std::uint16_t cls = label_index(g, o->semantic_class);
        const geom::Mesh m = scene::world_mesh(*o);
        for (const geom::TriIndex& t : m.triangles) {
            const geom::Vec3 &a = m.positions[t[0]], &b = m.positions[t[1]], &c = m.positions[t[2]];
            fill_triangle(g, {a.x, a.y}, {b.x, b.y}, {c.x, c.y}, cls);
        }
    }
    return g;
}

std::map<std::string, double> class_iou(const raster::ClassGrid& rendered, const raster::ClassGrid& reference) {
    if (rendered.width != reference.width || rendered.height != reference.height) {
        throw Error("rendered and reference grids differ in size");
    }
    std::map<std::string, double> out;
    for (const std::string& cls : class_priority()) {
        const auto a = rendered.class_of(cls);
        const auto b = reference.class_of(cls);
        std::size_t inter = 0, uni = 0;
        for (std::size_t i = 0; i < rendered.classes.size(); ++i) {
            const bool in_a = a && rendered.classes[i] == *a;
            const bool in_b = b && reference.classes[i] == *b;
            inter += in_a && in_b;
            uni += in_a || in_b;
        }
        if (uni > 0) out[cls] = static_cast<double>(inter) / static_cast<double>(uni);
    }
    return out;
}

std::vector<std::string> structural_violations(const scene::SceneState& state) {
    std::vector<std::string> out;
    struct Fp {
        const std::string* name;
        geom::Polygon poly;
        geom::BBox box;
    };
    std::vector<Fp> fps;
    for (const auto& [name, o] : state.objects) {
        if (o.semantic_class != "building") continue;
        if (auto fp = scene::world_footprint(o)) {
            const geom::BBox box = geom::bbox(*fp);
            fps.push_back({&name, std::move(*fp), box});
        }
    }
    std::sort(fps.begin(), fps.end(), [](const Fp& a, const Fp& b) {
        return a.box.min_x != b.box.min_x ? a.box.min_x < b.box.min_x : *a.name < *b.name;
    });
    std::vector<std::pair<std::string, std::string>> overlaps;
    for (std::size_t i = 0; i < fps.size(); ++i) {
        for (std::size_t j = i + 1; j < fps.size() && fps[j].box.min_x <= fps[i].box.max_x; ++j) {
            if (!fps[i].box.overlaps(fps[j].box)) continue;
            if (geom::intersection_area(fps[i].poly, fps[j].poly) > 1e-6) {
                overlaps.emplace_back(std::min(*fps[i].name, *fps[j].name), std::max(*fps[i].name, *fps[j].name));
            }
        }
    }
    std::sort(overlaps.begin(), overlaps.end());
    for (const auto& [a, b] : overlaps) out.push_back("footprint overlap: " + a + " / " + b);
    if (!state.bounds.empty()) {
        constexpr double tol = 1e-6;
        for (const auto& [name, o] : state.objects) {
            const geom::BBox3 b = scene::world_bounds(o);
            if (b.empty()) continue;
            if (b.min.x < state.bounds.min_x - tol || b.max.x > state.bounds.max_x + tol ||
                b.min.y < state.bounds.min_y - tol || b.max.y > state.bounds.max_y + tol) {
                out.push_back("outside scene bounds: " + name);
            }
        }
    }
    return out;
}

EvalReport evaluate(const scene::SceneState& state, const raster::ClassGrid* reference, const EvalOptions& options) {
    EvalReport r;
    if (reference) {
        auto rendered = std::make_shared<raster::ClassGrid>(render_semantic(state, *reference));
        r.per_class_iou = class_iou(*rendered, *reference);
        r.rendered = std::move(rendered);
    }
    r.violations = structural_violations(state);
    r.passed = r.violations.empty() && r.min_iou() >= options.threshold;
    return r;
}

scene::SceneState scene_from_grid(const raster::ClassGrid& grid) {
    scene::SceneState s;
    std::map<std::string, std::size_t> n;
    const auto& order = class_priority();
    for (const raster::Region& r : raster::vectorize_regions(grid)) {
        if (std::find(order.begin(), order.end(), r.label) == order.end()) continue;
        const std::string name = r.label + "_" + std::to_string(++n[r.label]);
        scene::SceneObject o;
        if (r.label == "building") {
            layout::Footprint fp;
            fp.polygon = geom::oriented(r.unsimplified);
            o = scene::building_object(name, fp);
        } else {
            o = scene::area_object(name, {geom::oriented(r.unsimplified), r.label});
        }
        s.objects.emplace(name, std::move(o));
    }
    s.bounds = grid.extent();
    return s;
}

EvalReport RuleVisionClient::evaluate(const scene::SceneState& state, const Instruction&, const GuidanceDoc&,
                                      const raster::ClassGrid* reference) const {
    return agents::evaluate(state, reference, options_);
}

}  // namespace cityforge::agents
