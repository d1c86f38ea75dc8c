#include <doctest.h>

#include <cmath>
#include <fstream>
#include <iterator>
#include <random>

#include "cityforge/geometry/polygon.hpp"
#include "cityforge/raster/raster.hpp"
#include "cityforge/raster/skeleton.hpp"

using namespace cityforge;
using namespace cityforge::raster;

namespace {

const Rgb kBuilding{200, 0, 0};
const Rgb kRoad{128, 128, 128};
const Rgb kWater{0, 0, 255};
const Rgb kGreen{0, 160, 0};
const Rgb kGround{240, 230, 200};

RgbImage filled(int w, int h, Rgb c) {
    RgbImage img{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(3 * w * h))};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) img.set(x, y, c);
    }
    return img;
}

ClassGrid grid_from(const std::vector<std::string>& rows, double cell = 1.0) {
    // '.' ground, 'B' building, 'R' road, 'W' water, 'G' green
    const Palette pal = default_palette();
    ClassGrid g;
    g.height = static_cast<int>(rows.size());
    g.width = static_cast<int>(rows[0].size());
    g.cell_size = cell;
    for (const auto& e : pal.entries) g.labels.push_back(e.label);
    for (const auto& r : rows) {
        for (char c : r) {
            const char* label = c == 'B' ? "building" : c == 'R' ? "road" : c == 'W' ? "water" : c == 'G' ? "green" : "ground";
            g.classes.push_back(static_cast<std::uint16_t>(*pal.index_of(label)));
        }
    }
    return g;
}

ClassGrid random_blobs(std::mt19937_64& rng, int w, int h, double cell) {
    ClassGrid g;
    g.width = w;
    g.height = h;
    g.cell_size = cell;
    for (const auto& e : default_palette().entries) g.labels.push_back(e.label);
    g.classes.assign(static_cast<std::size_t>(w * h), 4);
    std::uniform_int_distribution<int> cls(0, 3), px(0, w - 1), py(0, h - 1), rad(2, 8);
    for (int k = 0; k < 12; ++k) {
        const int cx = px(rng), cy = py(rng), r = rad(rng);
        const auto c = static_cast<std::uint16_t>(cls(rng));
        const bool disk = rng() % 2 == 0;
        for (int y = std::max(0, cy - r); y < std::min(h, cy + r + 1); ++y) {
            for (int x = std::max(0, cx - r); x < std::min(w, cx + r + 1); ++x) {
                if (disk && (x - cx) * (x - cx) + (y - cy) * (y - cy) > r * r) continue;
                g.classes[static_cast<std::size_t>(y * w + x)] = c;
            }
        }
    }
    return g;
}

// Flood-fill component count, written against the raw class array.
std::size_t component_oracle(const ClassGrid& g) {
    std::vector<int> seen(g.classes.size(), 0);
    std::size_t n = 0;
    for (int y0 = 0; y0 < g.height; ++y0) {
        for (int x0 = 0; x0 < g.width; ++x0) {
            if (seen[static_cast<std::size_t>(y0 * g.width + x0)]) continue;
            ++n;
            std::vector<std::pair<int, int>> st{{x0, y0}};
            seen[static_cast<std::size_t>(y0 * g.width + x0)] = 1;
            while (!st.empty()) {
                auto [x, y] = st.back();
                st.pop_back();
                for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= g.width || ny >= g.height) continue;
                    auto& s = seen[static_cast<std::size_t>(ny * g.width + nx)];
                    if (s || g.at(nx, ny) != g.at(x, y)) continue;
                    s = 1;
                    st.emplace_back(nx, ny);
                }
            }
        }
    }
    return n;
}

std::size_t nearest_oracle(Rgb c, const Palette& pal) {
    std::size_t best = 0;
    long best_d = -1;
    for (std::size_t i = 0; i < pal.entries.size(); ++i) {
        const Rgb p = pal.entries[i].color;
        const long d = (c.r - p.r) * (c.r - p.r) + (c.g - p.g) * (c.g - p.g) + (c.b - p.b) * (c.b - p.b);
        if (best_d < 0 || d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

// Bilinear between cell centres with edge clamping, in terms of world coordinates.
double bilinear_oracle(const HeightGrid& g, double x, double y) {
    const double cs = g.cell_size;
    auto value = [&](int col, int row) {
        col = std::clamp(col, 0, g.width - 1);
        row = std::clamp(row, 0, g.height - 1);
        return g.elevation[static_cast<std::size_t>(row * g.width + col)];
    };
    auto centre_x = [&](int col) { return (col + 0.5) * cs; };
    auto centre_y = [&](int row) { return (g.height - row - 0.5) * cs; };
    const double cx = std::clamp(x, centre_x(0), centre_x(g.width - 1));
    const double cy = std::clamp(y, centre_y(g.height - 1), centre_y(0));
    int col = static_cast<int>(std::floor(cx / cs - 0.5));
    int row = static_cast<int>(std::floor((g.height * cs - cy) / cs - 0.5));
    col = std::clamp(col, 0, std::max(0, g.width - 2));
    row = std::clamp(row, 0, std::max(0, g.height - 2));
    const double x0 = centre_x(col), x1 = centre_x(col + 1);
    const double y0 = centre_y(row), y1 = centre_y(row + 1);  // y1 below y0
    const double tx = g.width > 1 ? (cx - x0) / (x1 - x0) : 0.0;
    const double ty = g.height > 1 ? (y0 - cy) / (y0 - y1) : 0.0;
    return value(col, row) * (1 - tx) * (1 - ty) + value(col + 1, row) * tx * (1 - ty) +
           value(col, row + 1) * (1 - tx) * ty + value(col + 1, row + 1) * tx * ty;
}

double polygons_area(const std::vector<Region>& regions, const std::string& label, bool simplified) {
    double a = 0.0;
    for (const Region& r : regions) {
        if (r.label == label) a += geom::area(simplified ? r.polygon : r.unsimplified);
    }
    return a;
}

}  // namespace

TEST_CASE("default palette and palette JSON") {
    const Palette pal = default_palette();
    REQUIRE(pal.entries.size() == 5);
    CHECK(pal.entries[0].label == "building");
    CHECK(pal.entries[0].color == kBuilding);
    CHECK(*pal.find(kRoad) == 1);
    CHECK(*pal.find(kWater) == 2);
    CHECK(*pal.find(kGreen) == 3);
    CHECK(*pal.find(kGround) == 4);
    CHECK(!pal.find(Rgb{1, 2, 3}).has_value());

    const Palette back = parse_palette(palette_json(pal));
    REQUIRE(back.entries.size() == pal.entries.size());
    for (std::size_t i = 0; i < pal.entries.size(); ++i) {
        CHECK(back.entries[i].label == pal.entries[i].label);
        CHECK(back.entries[i].color == pal.entries[i].color);
    }
    CHECK_THROWS_AS(parse_palette(R"([{"color":[1,2,3],"label":"a"},{"color":[1,2,3],"label":"b"}])"), RasterError);
    CHECK_THROWS_AS(parse_palette(R"([{"color":[1,2,3],"label":"a"},{"color":[1,2,4],"label":"a"}])"), RasterError);
    CHECK_THROWS_AS(parse_palette(R"([{"color":[1,2,300],"label":"a"}])"), RasterError);
    CHECK_THROWS_AS(parse_palette("not json"), RasterError);
}

TEST_CASE("load_semantic_map: exact lookup") {
    const Palette pal = default_palette();
    SUBCASE("uniform building image") {
        const auto png = encode_png(filled(4, 4, kBuilding));
        const ClassGrid g = load_semantic_map(png, pal);
        CHECK(g.width == 4);
        CHECK(g.height == 4);
        CHECK(g.count(*g.class_of("building")) == 16);
    }
    SUBCASE("row-major order") {
        RgbImage img = filled(2, 2, kGround);
        img.set(1, 0, kWater);
        img.set(0, 1, kRoad);
        const ClassGrid g = load_semantic_map(encode_png(img), pal);
        CHECK(g.label_at(0, 0) == "ground");
        CHECK(g.label_at(1, 0) == "water");
        CHECK(g.label_at(0, 1) == "road");
        CHECK(g.label_at(1, 1) == "ground");
        CHECK(g.classes[1] == *pal.index_of("water"));
        CHECK(g.classes[2] == *pal.index_of("road"));
    }
    SUBCASE("off-palette pixel") {
        RgbImage img = filled(5, 3, kGreen);
        img.set(3, 2, Rgb{1, 2, 3});
        try {
            load_semantic_map(encode_png(img), pal);
            FAIL("expected UnknownColor");
        } catch (const RasterError& e) {
            CHECK(e.kind() == RasterErrc::UnknownColor);
            CHECK(e.x() == 3);
            CHECK(e.y() == 2);
            CHECK(e.rgb() == Rgb{1, 2, 3});
        }
    }
    SUBCASE("garbage bytes") {
        const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5};
        try {
            load_semantic_map(junk, pal);
            FAIL("expected BadImage");
        } catch (const RasterError& e) {
            CHECK(e.kind() == RasterErrc::BadImage);
        }
    }
}

TEST_CASE("quantize_satellite: nearest palette entry") {
    const Palette pal = default_palette();
    RgbImage img = filled(1, 1, kWater);
    CHECK(quantize_image(img, pal).label_at(0, 0) == "water");

    // Equidistant between two entries: earlier entry wins.
    const Palette two{{{Rgb{0, 0, 0}, "a"}, {Rgb{0, 0, 10}, "b"}}};
    img.set(0, 0, Rgb{0, 0, 5});
    CHECK(quantize_image(img, two).label_at(0, 0) == "a");

    std::mt19937_64 rng(5);
    for (int round = 0; round < 20; ++round) {
        RgbImage r = filled(8, 8, kGround);
        for (auto& b : r.data) b = static_cast<std::uint8_t>(rng() % 256);
        const ClassGrid g = quantize_satellite(encode_png(r), pal);
        for (int y = 0; y < 8; ++y) {
            for (int x = 0; x < 8; ++x) CHECK(g.at(x, y) == nearest_oracle(r.at(x, y), pal));
        }
    }
}

TEST_CASE("quantize is idempotent on rendered grids") {
    std::mt19937_64 rng(9);
    const Palette pal = default_palette();
    for (int round = 0; round < 10; ++round) {
        const ClassGrid g = random_blobs(rng, 24, 17, 1.0);
        const ClassGrid q = quantize_satellite(encode_png(render_grid(g, pal)), pal);
        CHECK(q.classes == g.classes);
    }
}

TEST_CASE("vectorize_regions: examples") {
    SUBCASE("uniform grid") {
        const auto regions = vectorize_regions(grid_from({"BBBB", "BBBB", "BBBB", "BBBB"}, 10.0));
        REQUIRE(regions.size() == 1);
        CHECK(regions[0].label == "building");
        CHECK(regions[0].polygon.outer.size() == 4);
        CHECK(regions[0].polygon.holes.empty());
        CHECK(geom::area(regions[0].polygon) == doctest::Approx(1600.0));
        const auto b = geom::bbox(regions[0].polygon.outer);
        CHECK(b.min_x == 0.0);
        CHECK(b.min_y == 0.0);
        CHECK(b.max_x == 40.0);
        CHECK(b.max_y == 40.0);
    }
    SUBCASE("single centre pixel") {
        const auto regions = vectorize_regions(grid_from({"...", ".B.", "..."}, 2.0));
        REQUIRE(regions.size() == 2);
        CHECK(regions[0].label == "building");
        CHECK(geom::area(regions[0].polygon) == doctest::Approx(4.0));
        CHECK(regions[1].label == "ground");
        REQUIRE(regions[1].polygon.holes.size() == 1);
        CHECK(geom::area(regions[1].polygon) == doctest::Approx(32.0));
    }
    SUBCASE("2x2 checkerboard") {
        const ClassGrid g = grid_from({"BR", "RB"});
        const auto regions = vectorize_regions(g);
        CHECK(regions.size() == component_oracle(g));
        CHECK(regions.size() == 4);
    }
}

TEST_CASE("vectorize_regions: component count, partition and area properties") {
    std::mt19937_64 rng(21);
    for (int round = 0; round < 25; ++round) {
        const double cell = round % 2 == 0 ? 1.0 : 2.5;
        const ClassGrid g = random_blobs(rng, 32, 28, cell);
        const auto regions = vectorize_regions(g);
        CHECK(regions.size() == component_oracle(g));

        for (const Region& r : regions) {
            CHECK(geom::polygon_is_simple(r.unsimplified));
            CHECK(geom::polygon_is_simple(r.polygon));
            // Pinch-corner nudges move a few vertices by 1e-3 cells.
            CHECK(geom::area(r.unsimplified) == doctest::Approx(r.pixel_count * cell * cell).epsilon(1e-3));
        }

        // Every pixel centre lies inside exactly one region of its class.
        for (int row = 0; row < g.height; ++row) {
            for (int col = 0; col < g.width; ++col) {
                const geom::Point2 c = g.pixel_center(col, row);
                int hits = 0;
                for (const Region& r : regions) {
                    if (r.label == g.label_at(col, row) &&
                        geom::locate(c, r.unsimplified, 0.0) == geom::Location::Inside) {
                        ++hits;
                    }
                }
                CHECK(hits == 1);
            }
        }

        for (std::uint16_t cls = 0; cls < g.labels.size(); ++cls) {
            const double want = static_cast<double>(g.count(cls)) * cell * cell;
            const double got = polygons_area(regions, g.labels[cls], true);
            if (want == 0.0) {
                CHECK(got == 0.0);
            } else {
                CHECK(std::abs(got - want) <= 0.02 * want);
            }
        }

        // Output order: label, then top-left pixel.
        for (std::size_t i = 1; i < regions.size(); ++i) {
            const Region& a = regions[i - 1];
            const Region& b = regions[i];
            const bool ordered = a.label < b.label || (a.label == b.label && (a.top_left_row < b.top_left_row ||
                                                                             (a.top_left_row == b.top_left_row &&
                                                                              a.top_left_col < b.top_left_col)));
            CHECK(ordered);
        }
    }
}

TEST_CASE("vectorize_regions: pinched components stay simple") {
    // Diagonal contacts make holes touch the outer boundary at one corner.
    const ClassGrid g = grid_from({"BBBBB", "B.BBB", "BB.BB", "BBBBB", "BBB.B", "BBBB."});
    const auto regions = vectorize_regions(g);
    CHECK(regions.size() == component_oracle(g));
    for (const Region& r : regions) {
        CHECK(geom::polygon_is_simple(r.polygon));
        CHECK(geom::area(r.unsimplified) == doctest::Approx(static_cast<double>(r.pixel_count)).epsilon(1e-3));
    }
}

TEST_CASE("simplify helpers") {
    const std::vector<geom::Point2> line{{0, 0}, {1, 0.1}, {2, -0.1}, {3, 0}, {3, 5}};
    const auto s = simplify_polyline(line, 0.5);
    REQUIRE(s.size() == 3);
    CHECK(s[1] == geom::Point2{3, 0});
    const geom::Ring sq{{0, 0}, {1, 0}, {2, 0}, {2, 2}, {1, 2.2}, {0, 2}};
    CHECK(simplify_ring(sq, 0.5).size() == 4);
    CHECK(simplify_ring(sq, 0.1).size() == 5);
}

TEST_CASE("sample_height: examples and bilinear oracle") {
    HeightGrid g;
    g.width = 2;
    g.height = 1;
    g.cell_size = 4.0;
    g.elevation = {0.0, 10.0};
    CHECK(sample_height(g, 2.0, 2.0) == 0.0);
    CHECK(sample_height(g, 6.0, 2.0) == 10.0);
    CHECK(sample_height(g, 4.0, 2.0) == doctest::Approx(5.0));
    CHECK(sample_height(g, 0.0, 0.0) == 0.0);  // clamped outer half cell
    CHECK_THROWS_AS(sample_height(g, -0.1, 1.0), RasterError);
    CHECK_THROWS_AS(sample_height(g, 1.0, 4.5), RasterError);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> val(-5.0, 300.0);
    for (int round = 0; round < 10; ++round) {
        HeightGrid h;
        h.width = 3 + round;
        h.height = 2 + 2 * round;
        h.cell_size = 0.5 + round;
        for (int i = 0; i < h.width * h.height; ++i) h.elevation.push_back(val(rng));
        for (int row = 0; row < h.height; ++row) {
            for (int col = 0; col < h.width; ++col) {
                const geom::Point2 c{(col + 0.5) * h.cell_size, (h.height - row - 0.5) * h.cell_size};
                CHECK(sample_height(h, c.x, c.y) == doctest::Approx(h.at(col, row)).epsilon(1e-12));
            }
        }
        std::uniform_real_distribution<double> ux(0.0, h.width * h.cell_size), uy(0.0, h.height * h.cell_size);
        for (int i = 0; i < 200; ++i) {
            const double x = ux(rng), y = uy(rng);
            CHECK(std::abs(sample_height(h, x, y) - bilinear_oracle(h, x, y)) <= 1e-9);
        }
    }
}

TEST_CASE("PNG round trips") {
    std::mt19937_64 rng(2);
    RgbImage rgb = filled(13, 7, kGround);
    for (auto& b : rgb.data) b = static_cast<std::uint8_t>(rng() % 256);
    const RgbImage back = decode_rgb_png(encode_png(rgb));
    CHECK(back.width == 13);
    CHECK(back.height == 7);
    CHECK(back.data == rgb.data);

    Gray16Image gray{9, 4, {}};
    for (int i = 0; i < 36; ++i) gray.data.push_back(static_cast<std::uint16_t>(rng() % 65536));
    const Gray16Image g2 = decode_gray16_png(encode_png(gray));
    CHECK(g2.width == 9);
    CHECK(g2.data == gray.data);

    const HeightGrid h = load_height_png(encode_png(gray), 2.0);
    CHECK(h.at(3, 1) == doctest::Approx(gray.data[12] * 0.1));
}

TEST_CASE("chessboard distance matches brute force") {
    std::mt19937_64 rng(4);
    for (int round = 0; round < 5; ++round) {
        const ClassGrid g = random_blobs(rng, 20, 15, 1.0);
        const Mask m = class_mask(g, 4);
        const auto d = chessboard_distance(m);
        for (int y = 0; y < m.height; ++y) {
            for (int x = 0; x < m.width; ++x) {
                int want = 0;
                if (m.get(x, y)) {
                    want = 1 << 20;
                    for (int yy = -1; yy <= m.height; ++yy) {
                        for (int xx = -1; xx <= m.width; ++xx) {
                            if (m.get(xx, yy)) continue;
                            want = std::min(want, std::max(std::abs(xx - x), std::abs(yy - y)));
                        }
                    }
                }
                CHECK(d[static_cast<std::size_t>(y * m.width + x)] == want);
            }
        }
    }
}

TEST_CASE("thinning and centerlines of a straight and a crossing road") {
    SUBCASE("horizontal bar") {
        std::vector<std::string> rows(9, std::string(40, '.'));
        for (int y = 2; y <= 6; ++y) rows[static_cast<std::size_t>(y)].replace(2, 36, std::string(36, 'R'));
        const ClassGrid g = grid_from(rows, 2.0);
        const Mask region = class_mask(g, 1);
        const Mask sk = thin(region);
        CHECK(sk.count() > 0);
        CHECK(sk.count() < region.count() / 3);
        for (int y = 0; y < sk.height; ++y) {
            for (int x = 0; x < sk.width; ++x) {
                if (sk.get(x, y)) CHECK(region.get(x, y));
            }
        }
        const auto lines = trace_centerlines(sk, region, g);
        REQUIRE(lines.size() == 1);
        for (const auto& p : lines[0].line.points) CHECK(p.y == doctest::Approx(g.pixel_center(0, 4).y).epsilon(0.05));
        CHECK(lines[0].width == doctest::Approx(10.0).epsilon(0.25));
    }
    SUBCASE("plus shape") {
        std::vector<std::string> rows(41, std::string(41, '.'));
        for (int y = 0; y < 41; ++y) {
            for (int x = 0; x < 41; ++x) {
                if ((y >= 18 && y <= 22) || (x >= 18 && x <= 22)) rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] = 'R';
            }
        }
        const ClassGrid g = grid_from(rows, 1.0);
        const Mask region = class_mask(g, 1);
        const auto lines = trace_centerlines(thin(region), region, g);
        CHECK(lines.size() == 4);
        for (const auto& l : lines) {
            const geom::Point2 centre{20.5, 20.5};
            const bool touches = geom::distance(l.line.points.front(), centre) < 3.0 ||
                                 geom::distance(l.line.points.back(), centre) < 3.0;
            CHECK(touches);
        }
    }
}

TEST_CASE("bundled semantic sample vectorizes within the area bound") {
    std::ifstream in(std::string(CITYFORGE_DATA_DIR) + "/semantic_sample.png", std::ios::binary);
    if (!in) {
        MESSAGE("semantic_sample.png not generated yet");
        return;
    }
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const ClassGrid g = load_semantic_map(bytes, default_palette(), 2.0);
    CHECK(g.width == 256);
    const auto regions = vectorize_regions(g);
    for (std::uint16_t cls = 0; cls < g.labels.size(); ++cls) {
        const double want = static_cast<double>(g.count(cls)) * 4.0;
        CHECK(std::abs(polygons_area(regions, g.labels[cls], true) - want) <= 0.02 * want + 1e-9);
    }
}
