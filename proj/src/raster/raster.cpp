#include "cityforge/raster/raster.hpp"

#include <algorithm>
#include <cmath>

namespace cityforge::raster {

std::optional<std::size_t> Palette::find(Rgb c) const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].color == c) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> Palette::index_of(std::string_view label) const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].label == label) return i;
    }
    return std::nullopt;
}

Palette default_palette() {
    return {{{{200, 0, 0}, "building"},
             {{128, 128, 128}, "road"},
             {{0, 0, 255}, "water"},
             {{0, 160, 0}, "green"},
             {{240, 230, 200}, "ground"}}};
}

std::optional<std::uint16_t> ClassGrid::class_of(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return static_cast<std::uint16_t>(i);
    }
    return std::nullopt;
}

std::size_t ClassGrid::count(std::uint16_t cls) const {
    return static_cast<std::size_t>(std::count(classes.begin(), classes.end(), cls));
}

namespace {

ClassGrid empty_grid(const RgbImage& img, const Palette& palette, double cell_size) {
    if (palette.entries.empty()) throw RasterError(RasterErrc::BadPalette, "palette is empty");
    if (!(cell_size > 0.0)) throw RasterError(RasterErrc::InvalidGrid, "cell size must be > 0");
    if (img.width <= 0 || img.height <= 0) throw RasterError(RasterErrc::BadImage, "bad image: zero size");
    ClassGrid g;
    g.width = img.width;
    g.height = img.height;
    g.cell_size = cell_size;
    for (const PaletteEntry& e : palette.entries) g.labels.push_back(e.label);
    g.classes.resize(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height));
    return g;
}

}  // namespace

ClassGrid classify_exact(const RgbImage& img, const Palette& palette, double cell_size) {
    ClassGrid g = empty_grid(img, palette, cell_size);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const Rgb c = img.at(x, y);
            const auto idx = palette.find(c);
            if (!idx) {
                throw RasterError(RasterErrc::UnknownColor,
                                  "unknown color (" + std::to_string(c.r) + "," + std::to_string(c.g) + "," +
                                      std::to_string(c.b) + ") at pixel " + std::to_string(x) + "," + std::to_string(y),
                                  x, y, c);
            }
            g.classes[static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width) + static_cast<std::size_t>(x)] =
                static_cast<std::uint16_t>(*idx);
        }
    }
    return g;
}

ClassGrid load_semantic_map(std::span<const std::uint8_t> png, const Palette& palette, double cell_size) {
    return classify_exact(decode_rgb_png(png), palette, cell_size);
}

ClassGrid quantize_image(const RgbImage& img, const Palette& palette, double cell_size) {
    ClassGrid g = empty_grid(img, palette, cell_size);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const Rgb c = img.at(x, y);
            std::size_t best = 0;
            long best_d = -1;
            for (std::size_t i = 0; i < palette.entries.size(); ++i) {
                const Rgb p = palette.entries[i].color;
                const long dr = long{c.r} - p.r, dg = long{c.g} - p.g, db = long{c.b} - p.b;
                const long d = dr * dr + dg * dg + db * db;
                if (best_d < 0 || d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            g.classes[static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width) + static_cast<std::size_t>(x)] =
                static_cast<std::uint16_t>(best);
        }
    }
    return g;
}

ClassGrid quantize_satellite(std::span<const std::uint8_t> png, const Palette& palette, double cell_size) {
    return quantize_image(decode_rgb_png(png), palette, cell_size);
}

RgbImage render_grid(const ClassGrid& grid, const Palette& palette) {
    std::vector<Rgb> colors;
    for (const std::string& l : grid.labels) {
        const auto idx = palette.index_of(l);
        if (!idx) throw RasterError(RasterErrc::BadPalette, "label '" + l + "' missing from palette");
        colors.push_back(palette.entries[*idx].color);
    }
    RgbImage img;
    img.width = grid.width;
    img.height = grid.height;
    img.data.resize(3 * grid.classes.size());
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) img.set(x, y, colors[grid.at(x, y)]);
    }
    return img;
}

HeightGrid load_height_png(std::span<const std::uint8_t> png, double cell_size, double scale) {
    if (!(cell_size > 0.0) || !(scale > 0.0)) throw RasterError(RasterErrc::InvalidGrid, "cell size and scale must be > 0");
    const Gray16Image img = decode_gray16_png(png);
    HeightGrid g;
    g.width = img.width;
    g.height = img.height;
    g.cell_size = cell_size;
    g.elevation.reserve(img.data.size());
    for (std::uint16_t v : img.data) g.elevation.push_back(v * scale);
    return g;
}

double sample_height(const HeightGrid& grid, double x, double y) {
    const double w = grid.width * grid.cell_size;
    const double h = grid.height * grid.cell_size;
    if (grid.width <= 0 || grid.height <= 0 || !(x >= 0.0 && x <= w && y >= 0.0 && y <= h)) {
        throw RasterError(RasterErrc::OutOfExtent, "height sample outside the grid extent");
    }
    // Continuous cell coordinates where integer values are cell centres.
    const double u = std::clamp(x / grid.cell_size - 0.5, 0.0, grid.width - 1.0);
    const double v = std::clamp((h - y) / grid.cell_size - 0.5, 0.0, grid.height - 1.0);
    const int c0 = std::min(static_cast<int>(std::floor(u)), grid.width - 1);
    const int r0 = std::min(static_cast<int>(std::floor(v)), grid.height - 1);
    const int c1 = std::min(c0 + 1, grid.width - 1);
    const int r1 = std::min(r0 + 1, grid.height - 1);
    const double fu = u - c0;
    const double fv = v - r0;
    const double top = grid.at(c0, r0) * (1.0 - fu) + grid.at(c1, r0) * fu;
    const double bottom = grid.at(c0, r1) * (1.0 - fu) + grid.at(c1, r1) * fu;
    return top * (1.0 - fv) + bottom * fv;
}

}  // namespace cityforge::raster
