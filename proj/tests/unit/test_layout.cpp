#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "cityforge/geometry/polygon.hpp"
#include "cityforge/layout/layout.hpp"
#include "../support/layout_oracles.hpp"

using namespace cityforge;
using namespace cityforge::layout;
using geom::Point2;
using namespace cityforge::test_oracles;

namespace {

double shoelace_oracle(const std::vector<Point2>& r) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const Point2 a = r[i], b = r[(i + 1) % r.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

double area_oracle(const geom::Polygon& p) {
    double a = std::abs(shoelace_oracle(p.outer));
    for (const auto& h : p.holes) a -= std::abs(shoelace_oracle(h));
    return a;
}

// Proper or touching intersection of two closed segments, brute force with
// parametric solve; shared endpoints are reported separately by the caller.
bool seg_intersect_oracle(Point2 a, Point2 b, Point2 c, Point2 d, double tol) {
    auto dist = [](Point2 p, Point2 s, Point2 e) {
        const double dx = e.x - s.x, dy = e.y - s.y;
        const double l2 = dx * dx + dy * dy;
        double t = l2 > 0 ? ((p.x - s.x) * dx + (p.y - s.y) * dy) / l2 : 0.0;
        t = std::max(0.0, std::min(1.0, t));
        return std::hypot(p.x - (s.x + t * dx), p.y - (s.y + t * dy));
    };
    // Proper crossing by orientation signs; near-collinear cases fall
    // through to the endpoint distances.
    auto orient = [](Point2 p, Point2 q, Point2 r) { return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x); };
    const double lab = std::hypot(b.x - a.x, b.y - a.y), lcd = std::hypot(d.x - c.x, d.y - c.y);
    const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    const double ga = 1e-9 * lab * lab + 1e-12, gc = 1e-9 * lcd * lcd + 1e-12;
    if (std::abs(o1) > ga && std::abs(o2) > ga && std::abs(o3) > gc && std::abs(o4) > gc && (o1 > 0) != (o2 > 0) &&
        (o3 > 0) != (o4 > 0)) {
        return true;
    }
    return dist(a, c, d) <= tol || dist(b, c, d) <= tol || dist(c, a, b) <= tol || dist(d, a, b) <= tol;
}

std::size_t crossings_oracle(const RoadGraph& g) {
    std::size_t n = 0;
    const auto& v = g.vertices;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        for (std::size_t j = i + 1; j < g.edges.size(); ++j) {
            const auto& e = g.edges[i];
            const auto& f = g.edges[j];
            const bool shared = e.a == f.a || e.a == f.b || e.b == f.a || e.b == f.b;
            if (shared) {
                // Only a collinear fold-back counts; check the far ends against the other edge.
                const std::size_t c = (e.a == f.a || e.a == f.b) ? e.a : e.b;
                const std::size_t oe = e.a == c ? e.b : e.a;
                const std::size_t of = f.a == c ? f.b : f.a;
                if (oe == of || seg_intersect_oracle(v[oe], v[oe], v[c], v[of], 1e-6) ||
                    seg_intersect_oracle(v[of], v[of], v[c], v[oe], 1e-6)) {
                    ++n;
                }
                continue;
            }
            if (seg_intersect_oracle(v[e.a], v[e.b], v[f.a], v[f.b], 1e-6)) ++n;
        }
    }
    return n;
}

void check_invariants_oracle(const CityLayout& l) {
    for (const Parcel& p : l.parcels) {
        REQUIRE(p.block < l.blocks.size());
        CHECK(contained_oracle(p.polygon, l.blocks[p.block]));
    }
    for (const Footprint& f : l.footprints) {
        REQUIRE(f.parcel < l.parcels.size());
        CHECK(contained_oracle(f.polygon, l.parcels[f.parcel].polygon));
    }
    std::size_t overlaps = 0;
    for (std::size_t i = 0; i < l.footprints.size(); ++i) {
        for (std::size_t j = i + 1; j < l.footprints.size(); ++j) {
            overlaps += overlap_oracle(l.footprints[i].polygon, l.footprints[j].polygon) ? 1 : 0;
        }
    }
    CHECK(overlaps == 0);
    CHECK(crossings_oracle(l.roads) == 0);
}

RoadInput seg(Point2 a, Point2 b, double width = 8.0) { return {geom::Polyline{{a, b}}, "residential", width}; }

geom::Polygon rect(double x0, double y0, double x1, double y1) { return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, {}}; }

geom::Polygon random_block(std::mt19937_64& rng) {
    // Star-shaped block around the origin.
    std::uniform_real_distribution<double> r(30.0, 80.0);
    const int n = 5 + static_cast<int>(rng() % 8);
    geom::Ring ring;
    for (int k = 0; k < n; ++k) {
        const double a = 2.0 * M_PI * k / n;
        const double rad = r(rng);
        ring.push_back({rad * std::cos(a), rad * std::sin(a)});
    }
    return {ring, {}};
}

std::string osm_grid(int n, double spacing_deg, bool with_declared) {
    std::ostringstream x;
    x.precision(12);
    x << "<osm version=\"0.6\">\n";
    int id = 1;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            x << "<node id=\"" << id++ << "\" lat=\"" << i * spacing_deg << "\" lon=\"" << j * spacing_deg << "\"/>\n";
        }
    }
    auto node = [&](int i, int j) { return 1 + i * (n + 1) + j; };
    int wid = 1000;
    for (int i = 0; i <= n; ++i) {
        x << "<way id=\"" << wid++ << "\">";
        for (int j = 0; j <= n; ++j) x << "<nd ref=\"" << node(i, j) << "\"/>";
        x << "<tag k=\"highway\" v=\"" << (i == n / 2 ? "primary" : "residential") << "\"/></way>\n";
        x << "<way id=\"" << wid++ << "\">";
        for (int j = 0; j <= n; ++j) x << "<nd ref=\"" << node(j, i) << "\"/>";
        x << "<tag k=\"highway\" v=\"residential\"/></way>\n";
    }
    if (with_declared) {
        // One building in the first block, with 4 levels.
        const double a = spacing_deg * 0.3, b = spacing_deg * 0.5;
        x << "<node id=\"90001\" lat=\"" << a << "\" lon=\"" << a << "\"/><node id=\"90002\" lat=\"" << a << "\" lon=\""
          << b << "\"/>" << "<node id=\"90003\" lat=\"" << b << "\" lon=\"" << b << "\"/><node id=\"90004\" lat=\"" << b
          << "\" lon=\"" << a << "\"/>\n";
        x << "<way id=\"5000\"><nd ref=\"90001\"/><nd ref=\"90002\"/><nd ref=\"90003\"/><nd ref=\"90004\"/>"
             "<nd ref=\"90001\"/><tag k=\"building\" v=\"yes\"/><tag k=\"building:levels\" v=\"4\"/></way>\n";
    }
    x << "</osm>\n";
    return x.str();
}

}  // namespace

TEST_CASE("build_road_graph: examples") {
    SUBCASE("two crossing segments") {
        const RoadGraph g = build_road_graph({seg({0, 0}, {10, 10}), seg({0, 10}, {10, 0})});
        CHECK(g.vertices.size() == 5);
        CHECK(g.edges.size() == 4);
        bool centre = false;
        for (const Point2& v : g.vertices) centre = centre || geom::distance(v, {5, 5}) < 1e-9;
        CHECK(centre);
    }
    SUBCASE("one segment") {
        const RoadGraph g = build_road_graph({seg({0, 0}, {3, 4})});
        CHECK(g.vertices.size() == 2);
        CHECK(g.edges.size() == 1);
    }
    SUBCASE("snapping and duplicates") {
        const RoadGraph g = build_road_graph({seg({0, 0}, {10, 0}, 8.0), seg({10.005, 0.0}, {20, 0}),
                                              seg({0, 0}, {10, 0}, 16.0)});
        CHECK(g.vertices.size() == 3);
        REQUIRE(g.edges.size() == 2);
        CHECK(g.edges[0].width == 16.0);
    }
    SUBCASE("T junction") {
        const RoadGraph g = build_road_graph({seg({0, 0}, {20, 0}), seg({10, 0}, {10, 10})});
        CHECK(g.vertices.size() == 4);
        CHECK(g.edges.size() == 3);
    }
}

TEST_CASE("build_road_graph: random segments come out planar") {
    std::mt19937_64 rng(50);
    std::uniform_real_distribution<double> c(0.0, 500.0);
    for (int round = 0; round < 5; ++round) {
        std::vector<RoadInput> roads;
        for (int i = 0; i < 50; ++i) roads.push_back(seg({c(rng), c(rng)}, {c(rng), c(rng)}));
        const RoadGraph g = build_road_graph(roads);
        CHECK(crossings_oracle(g) == 0);
        CHECK(road_crossings(g).empty());
        // Coverage: every input segment midpoint lies on some output edge.
        for (const RoadInput& r : roads) {
            const Point2 m = (r.line.points[0] + r.line.points[1]) * 0.5;
            double best = INFINITY;
            for (const RoadEdge& e : g.edges) {
                best = std::min(best, geom::distance_to_segment(m, g.vertices[e.a], g.vertices[e.b]));
            }
            CHECK(best <= 0.02);
        }
        // Total length is preserved up to snapping.
        double in = 0.0, out = 0.0;
        for (const RoadInput& r : roads) in += geom::distance(r.line.points[0], r.line.points[1]);
        for (const RoadEdge& e : g.edges) out += geom::distance(g.vertices[e.a], g.vertices[e.b]);
        CHECK(out <= in + 1e-6);
        CHECK(out >= in - 0.5);
    }
}

TEST_CASE("extract_blocks: examples") {
    SUBCASE("3x3 grid of road lines") {
        std::vector<RoadInput> roads;
        for (double t : {0.0, 100.0, 200.0}) {
            roads.push_back(seg({0, t}, {200, t}));
            roads.push_back(seg({t, 0}, {t, 200}));
        }
        const RoadGraph g = build_road_graph(roads);
        const auto blocks = extract_blocks(g);
        REQUIRE(blocks.size() == 4);
        for (const auto& b : blocks) CHECK(area_oracle(b) == doctest::Approx(92.0 * 92.0));
    }
    SUBCASE("single segment") { CHECK(extract_blocks(build_road_graph({seg({0, 0}, {5, 0})})).empty()); }
    SUBCASE("triangle") {
        const auto blocks = extract_blocks(
            build_road_graph({seg({0, 0}, {100, 0}), seg({100, 0}, {0, 100}), seg({0, 100}, {0, 0})}));
        REQUIRE(blocks.size() == 1);
        CHECK(area_oracle(blocks[0]) < 5000.0);
        CHECK(area_oracle(blocks[0]) > 3000.0);
    }
    SUBCASE("dead end and mixed widths") {
        const auto blocks = extract_blocks(build_road_graph({seg({0, 0}, {100, 0}, 16.0), seg({100, 0}, {100, 100}),
                                                             seg({100, 100}, {0, 100}), seg({0, 100}, {0, 0}),
                                                             seg({0, 50}, {40, 50})}));
        REQUIRE(blocks.size() == 1);
        CHECK(area_oracle(blocks[0]) == doctest::Approx(92.0 * 88.0));
    }
    SUBCASE("nested ring becomes a hole") {
        const auto faces = graph_faces(build_road_graph({seg({0, 0}, {100, 0}), seg({100, 0}, {100, 100}),
                                                         seg({100, 100}, {0, 100}), seg({0, 100}, {0, 0}),
                                                         seg({40, 40}, {60, 40}), seg({60, 40}, {60, 60}),
                                                         seg({60, 60}, {40, 60}), seg({40, 60}, {40, 40})}));
        REQUIRE(faces.size() == 2);
        std::size_t holes = 0;
        for (const auto& f : faces) holes += f.holes.size();
        CHECK(holes == 1);
        double total = 0.0;
        for (const auto& f : faces) total += area_oracle(f);
        CHECK(total == doctest::Approx(10000.0));
    }
}

TEST_CASE("subdivide_block: examples and area conservation") {
    SUBCASE("4x4 block, target 4") {
        const auto parcels = subdivide_block(rect(0, 0, 4, 4), 4.0, 1);
        REQUIRE(parcels.size() == 4);
        for (const auto& p : parcels) {
            CHECK(area_oracle(p) == doctest::Approx(4.0));
            const auto b = geom::bbox(p.outer);
            CHECK(b.width() == doctest::Approx(2.0));
            CHECK(b.height() == doctest::Approx(2.0));
        }
    }
    SUBCASE("already small") {
        const auto parcels = subdivide_block(rect(0, 0, 4, 4), 16.0, 1);
        REQUIRE(parcels.size() == 1);
        CHECK(area_oracle(parcels[0]) == doctest::Approx(16.0));
    }
    SUBCASE("random blocks") {
        std::mt19937_64 rng(77);
        for (int i = 0; i < 50; ++i) {
            const geom::Polygon b = random_block(rng);
            const auto parcels = subdivide_block(b, 600.0, static_cast<std::uint64_t>(i));
            double sum = 0.0;
            for (const auto& p : parcels) {
                sum += area_oracle(p);
                CHECK(area_oracle(p) <= 600.0 + 1e-9);
                CHECK(contained_oracle(p, b));
            }
            CHECK(std::abs(sum - area_oracle(b)) <= 1e-9 * area_oracle(b));
        }
    }
}

TEST_CASE("generate_footprints: inset, collapse and determinism") {
    const auto fps = generate_footprints({rect(0, 0, 20, 20), rect(30, 0, 35, 5)}, {}, 3);
    REQUIRE(fps.size() == 1);
    CHECK(fps[0].parcel == 0);
    const auto b = geom::bbox(fps[0].polygon.outer);
    CHECK(b.width() == doctest::Approx(14.0));
    CHECK(b.height() == doctest::Approx(14.0));
    CHECK(area_oracle(fps[0].polygon) == doctest::Approx(196.0));

    std::vector<geom::Polygon> parcels;
    for (int i = 0; i < 100; ++i) parcels.push_back(rect(30.0 * i, 0, 30.0 * i + 25, 25));
    const auto a1 = generate_footprints(parcels, {}, 42);
    const auto a2 = generate_footprints(parcels, {}, 42);
    REQUIRE(a1.size() == 100);
    REQUIRE(a2.size() == 100);
    for (std::size_t i = 0; i < 100; ++i) {
        CHECK(a1[i].height == a2[i].height);
        CHECK(std::fmod(a1[i].height, 3.0) == 0.0);
        CHECK(a1[i].height >= 3.0);
        CHECK(a1[i].height <= 150.0);
    }
}

TEST_CASE("height draws follow the zone medians") {
    Rng rng(derive_seed(5, "test"));
    for (const char* zone : {"residential", "commercial"}) {
        std::vector<double> h;
        for (int i = 0; i < 4001; ++i) h.push_back(draw_height(rng, zone));
        std::nth_element(h.begin(), h.begin() + 2000, h.end());
        const double median = h[2000];
        CHECK(std::abs(median - zone_median_height(zone)) <= 3.0);
    }
    CHECK(zone_median_height("residential") == 9.0);
    CHECK(zone_median_height("commercial") == 21.0);
}

TEST_CASE("assemble_from_osm: declared building passes through") {
    const std::string xml = R"(<osm>
<node id="1" lat="0" lon="0"/><node id="2" lat="0" lon="0.0002"/>
<node id="3" lat="0.0002" lon="0.0002"/><node id="4" lat="0.0002" lon="0"/>
<way id="10"><nd ref="1"/><nd ref="2"/><nd ref="3"/><nd ref="4"/><nd ref="1"/>
<tag k="building" v="yes"/><tag k="building:levels" v="4"/></way></osm>)";
    const auto doc = osm::parse_osm(xml);
    const auto layers = osm::classify_layers(doc, osm::bbox_origin(doc));
    const CityLayout l = assemble_from_osm(layers, 0);
    REQUIRE(l.footprints.size() == 1);
    CHECK(l.footprints[0].height == 12.0);
    CHECK(l.footprints[0].declared);
    CHECK(l.footprints[0].source_id == 10);
    CHECK(check_layout(l).empty());
    check_invariants_oracle(l);

    CHECK_THROWS_AS(assemble_from_osm(osm::LayerSet{}, 0), LayoutError);
}

TEST_CASE("assemble_from_osm: road grid with a declared building") {
    const auto doc = osm::parse_osm(osm_grid(4, 0.001, true));
    const auto layers = osm::classify_layers(doc, osm::bbox_origin(doc));
    const CityLayout l = assemble_from_osm(layers, 0);
    CHECK(l.blocks.size() == 16);
    CHECK(l.footprints.size() > 16);
    std::size_t declared = 0;
    for (const Footprint& f : l.footprints) {
        if (f.declared) {
            ++declared;
            CHECK(f.height == 12.0);
            CHECK(f.parcel < l.parcels.size());
            CHECK(l.parcels[f.parcel].block < 16);
        }
    }
    CHECK(declared == 1);
    CHECK(check_layout(l).empty());
    check_invariants_oracle(l);

    const CityLayout again = assemble_from_osm(layers, 0);
    REQUIRE(again.footprints.size() == l.footprints.size());
    for (std::size_t i = 0; i < l.footprints.size(); ++i) {
        CHECK(again.footprints[i].height == l.footprints[i].height);
        CHECK(again.footprints[i].polygon.outer == l.footprints[i].polygon.outer);
    }
}

TEST_CASE("assemble_from_semantic: no road pixels") {
    raster::ClassGrid g;
    g.width = 40;
    g.height = 40;
    g.cell_size = 2.0;
    for (const auto& e : raster::default_palette().entries) g.labels.push_back(e.label);
    g.classes.assign(1600, 4);
    for (int y = 5; y < 20; ++y) {
        for (int x = 5; x < 30; ++x) g.classes[static_cast<std::size_t>(y * 40 + x)] = 0;
    }
    for (int y = 25; y < 35; ++y) {
        for (int x = 25; x < 35; ++x) g.classes[static_cast<std::size_t>(y * 40 + x)] = 3;
    }
    const CityLayout l = assemble_from_semantic(g, 0);
    CHECK(l.roads.edges.empty());
    REQUIRE(l.blocks.size() == 1);
    CHECK(area_oracle(l.blocks[0]) == doctest::Approx(15 * 25 * 4.0));
    REQUIRE(l.areas.size() == 1);
    CHECK(l.areas[0].semantic_class == "green");
    CHECK(!l.footprints.empty());
    check_invariants_oracle(l);
}

TEST_CASE("assemble_from_semantic: road cross produces a connected graph") {
    raster::ClassGrid g;
    g.width = 64;
    g.height = 64;
    g.cell_size = 2.0;
    for (const auto& e : raster::default_palette().entries) g.labels.push_back(e.label);
    g.classes.assign(64 * 64, 0);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            if ((y >= 30 && y < 34) || (x >= 30 && x < 34)) g.classes[static_cast<std::size_t>(y * 64 + x)] = 1;
        }
    }
    const CityLayout l = assemble_from_semantic(g, 0);
    CHECK(l.roads.edges.size() >= 4);
    for (const RoadEdge& e : l.roads.edges) CHECK(e.width == doctest::Approx(8.0).epsilon(0.3));
    CHECK(l.blocks.size() == 4);
    check_invariants_oracle(l);
}

TEST_CASE("bundled OSM sample satisfies the layout invariants") {
    std::ifstream in(std::string(CITYFORGE_DATA_DIR) + "/sample.osm", std::ios::binary);
    if (!in) {
        MESSAGE("sample.osm not generated yet");
        return;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const auto doc = osm::parse_osm(ss.str());
    const CityLayout l = assemble_from_osm(osm::classify_layers(doc, osm::bbox_origin(doc)), 0);
    CHECK(!l.footprints.empty());
    CHECK(check_layout(l).empty());
    check_invariants_oracle(l);
}
