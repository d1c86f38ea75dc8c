// Writes the bundled sample inputs into a data directory.
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "cityforge/agents/agents.hpp"
#include "cityforge/core/text.hpp"
#include "cityforge/protocol/protocol.hpp"
#include "cityforge/raster/image.hpp"
#include "cityforge/raster/raster.hpp"
#include "cityforge/scene/scene.hpp"

namespace fs = std::filesystem;
using namespace cityforge;

namespace {

constexpr double kLat0 = 48.85;
constexpr double kLon0 = 2.35;
constexpr double kMetersPerDegLat = 111320.0;

struct OsmWriter {
    std::ostringstream nodes, ways;
    std::int64_t next_node = 1;
    std::int64_t next_way = 1;

    std::int64_t node(double x, double y) {
        const double lat = kLat0 + y / kMetersPerDegLat;
        const double lon = kLon0 + x / (kMetersPerDegLat * std::cos(kLat0 * 3.14159265358979323846 / 180.0));
        nodes << "  <node id=\"" << next_node << "\" lat=\"" << format_fixed(lat, 8) << "\" lon=\""
              << format_fixed(lon, 8) << "\"/>\n";
        return next_node++;
    }

    void way(const std::vector<std::int64_t>& refs, const std::vector<std::pair<std::string, std::string>>& tags) {
        ways << "  <way id=\"" << next_way++ << "\">\n";
        for (std::int64_t r : refs) ways << "    <nd ref=\"" << r << "\"/>\n";
        for (const auto& [k, v] : tags) ways << "    <tag k=\"" << k << "\" v=\"" << v << "\"/>\n";
        ways << "  </way>\n";
    }

    void area(double x0, double y0, double x1, double y1, const std::vector<std::pair<std::string, std::string>>& tags) {
        const auto a = node(x0, y0), b = node(x1, y0), c = node(x1, y1), d = node(x0, y1);
        way({a, b, c, d, a}, tags);
    }

    std::string document() const {
        return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<osm version=\"0.6\" generator=\"make_samples\">\n" +
               nodes.str() + ways.str() + "</osm>\n";
    }
};

// 1 km x 1 km street grid with a park, a pond, a commercial core and a few
// mapped buildings.
std::string sample_osm() {
    OsmWriter w;
    const int n = 9;
    const double step = 125.0;
    std::vector<std::vector<std::int64_t>> grid(n, std::vector<std::int64_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) grid[i][j] = w.node(-500.0 + step * i, -500.0 + step * j);
    }
    auto highway = [&](int k) {
        if (k == n / 2) return "primary";
        if (k == 0 || k == n - 1) return "secondary";
        return "residential";
    };
    for (int i = 0; i < n; ++i) {
        std::vector<std::int64_t> vertical, horizontal;
        for (int j = 0; j < n; ++j) {
            vertical.push_back(grid[i][j]);
            horizontal.push_back(grid[j][i]);
        }
        w.way(vertical, {{"highway", highway(i)}, {"name", "Avenue " + std::to_string(i + 1)}});
        w.way(horizontal, {{"highway", highway(i)}, {"name", "Street " + std::to_string(i + 1)}});
    }
    w.area(-365.0, 135.0, -260.0, 240.0, {{"landuse", "park"}});
    w.area(262.0, -363.0, 363.0, -262.0, {{"natural", "water"}});
    w.area(-240.0, -240.0, 240.0, 240.0, {{"landuse", "commercial"}});
    w.area(140.0, 140.0, 170.0, 170.0, {{"building", "yes"}, {"height", "42"}});
    w.area(185.0, 140.0, 235.0, 165.0, {{"building", "office"}, {"building:levels", "8"}});
    w.area(140.0, 190.0, 175.0, 235.0, {{"building", "yes"}});
    w.area(-110.0, -235.0, -20.0, -140.0, {{"building", "retail"}, {"height", "15"}});
    return w.document();
}

// 256 x 256 semantic map (2 m cells): three roads each way, buildings in
// rows along the blocks, a park and a pond.
raster::RgbImage semantic_image() {
    const raster::Palette pal = raster::default_palette();
    auto color = [&](const char* label) { return pal.entries[*pal.index_of(label)].color; };
    raster::RgbImage img;
    img.width = 256;
    img.height = 256;
    img.data.assign(3 * 256 * 256, 0);
    auto fill = [&](int x0, int y0, int x1, int y1, raster::Rgb c) {
        for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) img.set(x, y, c);
        }
    };
    fill(0, 0, 256, 256, color("ground"));
    const int road[] = {40, 125, 210};
    const int width = 7;
    // Blocks between consecutive road bands (and the map edges).
    std::vector<std::pair<int, int>> spans;
    int prev = 0;
    for (int r : road) {
        spans.push_back({prev, r});
        prev = r + width;
    }
    spans.push_back({prev, 256});
    for (std::size_t bi = 0; bi < spans.size(); ++bi) {
        for (std::size_t bj = 0; bj < spans.size(); ++bj) {
            const auto [x0, x1] = spans[bi];
            const auto [y0, y1] = spans[bj];
            if (bi == 1 && bj == 1) {
                fill(x0 + 4, y0 + 4, x1 - 4, y1 - 4, color("green"));
                continue;
            }
            if (bi == 2 && bj == 2) {
                fill(x0 + 10, y0 + 10, x1 - 10, y1 - 10, color("water"));
                continue;
            }
            // Buildings 14..22 px wide with 4 px gaps and a 3 px setback.
            const int size = 14 + static_cast<int>((bi * 3 + bj * 5) % 9);
            for (int y = y0 + 3; y + size <= y1 - 3; y += size + 4) {
                for (int x = x0 + 3; x + size <= x1 - 3; x += size + 4) fill(x, y, x + size, y + size, color("building"));
            }
        }
    }
    for (int r : road) {
        fill(r, 0, r + width, 256, color("road"));
        fill(0, r, 256, r + width, color("road"));
    }
    return img;
}

raster::Gray16Image height_image() {
    raster::Gray16Image img;
    img.width = 256;
    img.height = 256;
    img.data.resize(256 * 256);
    for (int y = 0; y < 256; ++y) {
        for (int x = 0; x < 256; ++x) {
            // Gentle slope plus a low hill, 0.1 m per unit.
            const double dx = x - 180.0, dy = y - 80.0;
            const double h = 0.04 * x + 0.02 * (255 - y) + 12.0 * std::exp(-(dx * dx + dy * dy) / 3000.0);
            img.data[static_cast<std::size_t>(y) * 256 + static_cast<std::size_t>(x)] =
                static_cast<std::uint16_t>(std::lround(h * 10.0));
        }
    }
    return img;
}

const char* kCorpus[] = {
    "generate city",
    "set-style modern",
    "set-weather rain",
    "raise building bldg_3 by 10%",
    "recolor building bldg_5 to red",
    "place streetlamp by 5",
    "set-style to traditional",
    "set-weather to fog",
    "place tree by 8",
    "raise all buildings by 10%",
    "set-style night",
    "set-weather snow",
    "recolor all roads to gray",
    "scale building bldg_7 by 1.1",
    "set-weather clear",
    "set-style of the city to futuristic",
    "set-weather overcast",
    "remove building bldg_12",
    "place a streetlamp",
    "raise building bldg_20 by 6",
    "recolor bldg_9 to #c0a080",
    "set-style historic",
    "set-weather to stormy",
    "recolor all parks to green",
    "raise all buildings by 5%",
    "set-style glass",
    "set-weather misty",
    "place tree by 4",
    "recolor water_1 to teal",
    "scale it by 1.05",
    "set-style dark",
    "set-weather winter",
    "generate cube by 2",
    "raise cube_1 by 50%",
    "recolor cube_1 to gold",
    "remove cube_1",
    "set-style contemporary",
    "set-weather sunny",
    "raise building bldg_30 by 20%",
    "recolor building bldg_31 to beige",
    "place streetlamp by 3",
    "set-style brick",
    "set-weather cloudy",
    "scale building bldg_40 by 0.9",
    "raise all buildings by 3",
    "set-style evening",
    "set-weather hazy",
    "recolor all buildings to white",
    "set-style modern",
    "set-weather clear",
};

}  // namespace

int main(int argc, char** argv) {
    const fs::path dir = argc > 1 ? argv[1] : "data";
    fs::create_directories(dir / "guidance");
    write_file((dir / "sample.osm").string(), sample_osm());
    const auto sem = raster::encode_png(semantic_image());
    write_file((dir / "semantic_sample.png").string(), std::string(sem.begin(), sem.end()));
    const auto h = raster::encode_png(height_image());
    write_file((dir / "height_sample.png").string(), std::string(h.begin(), h.end()));
    std::string corpus;
    for (const char* line : kCorpus) corpus += std::string(line) + "\n";
    write_file((dir / "corpus.txt").string(), corpus);
    write_file((dir / "palette.json").string(), raster::palette_json(raster::default_palette()) + "\n");
    write_file((dir / "conversions.json").string(), protocol::conversion_table_json() + "\n");
    write_file((dir / "presets.json").string(), scene::presets_json(scene::default_presets()) + "\n");
    const agents::Guidance g = agents::default_guidance();
    write_file((dir / "guidance" / "annotator.txt").string(), g.annotator.text + "\n");
    write_file((dir / "guidance" / "planner.txt").string(), g.planner.text + "\n");
    write_file((dir / "guidance" / "executor.txt").string(), g.executor.text + "\n");
    write_file((dir / "guidance" / "evaluator.txt").string(), g.evaluator.text + "\n");
    std::cout << "wrote samples to " << dir.string() << "\n";
    return 0;
}
