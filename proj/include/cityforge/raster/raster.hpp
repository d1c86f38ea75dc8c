#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cityforge/geometry/types.hpp"
#include "cityforge/raster/image.hpp"

namespace cityforge::raster {

struct PaletteEntry {
    Rgb color;
    std::string label;
};

struct Palette {
    std::vector<PaletteEntry> entries;

    std::optional<std::size_t> find(Rgb c) const;
    std::optional<std::size_t> index_of(std::string_view label) const;
};

/// building (200,0,0), road (128,128,128), water (0,0,255), green (0,160,0), ground (240,230,200).
Palette default_palette();

/// JSON array of {"color":[r,g,b],"label":"..."}; colors and labels must be unique.
Palette parse_palette(std::string_view json);
std::string palette_json(const Palette& palette);

/// Class raster. Pixel (col, row) covers x in [col, col+1] * cell_size and
/// y in [height-row-1, height-row] * cell_size: row 0 is the northern edge.
struct ClassGrid {
    int width = 0;
    int height = 0;
    double cell_size = 1.0;
    std::vector<std::string> labels;       // class index -> label (palette order)
    std::vector<std::uint16_t> classes;  // row-major class indices

    std::uint16_t at(int col, int row) const {
        return classes[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col)];
    }
    const std::string& label_at(int col, int row) const { return labels[at(col, row)]; }
    std::optional<std::uint16_t> class_of(std::string_view label) const;
    std::size_t count(std::uint16_t cls) const;
    geom::Point2 pixel_center(int col, int row) const {
        return {(col + 0.5) * cell_size, (height - row - 0.5) * cell_size};
    }
    geom::BBox extent() const { return {0.0, 0.0, width * cell_size, height * cell_size}; }
};

/// Exact color lookup; throws UnknownColor (x, y, rgb) or BadImage.
ClassGrid load_semantic_map(std::span<const std::uint8_t> png, const Palette& palette, double cell_size = 1.0);
ClassGrid classify_exact(const RgbImage& img, const Palette& palette, double cell_size = 1.0);

/// Nearest palette color by squared RGB distance; ties go to the earlier entry.
ClassGrid quantize_satellite(std::span<const std::uint8_t> png, const Palette& palette, double cell_size = 1.0);
ClassGrid quantize_image(const RgbImage& img, const Palette& palette, double cell_size = 1.0);

/// Paints each class with its palette color (labels must exist in the palette).
RgbImage render_grid(const ClassGrid& grid, const Palette& palette);

struct Region {
    geom::Polygon polygon;       // simplified
    geom::Polygon unsimplified;  // traced at pixel edges
    std::string label;
    std::uint16_t class_index = 0;
    int top_left_col = 0;
    int top_left_row = 0;
    std::size_t pixel_count = 0;
};

/// 4-connected components per class, traced along pixel edges and simplified
/// with Douglas-Peucker at half a cell. Sorted by label, then top-left pixel.
std::vector<Region> vectorize_regions(const ClassGrid& grid);

/// Closed-ring Douglas-Peucker (keeps points farther than eps from the chord).
geom::Ring simplify_ring(const geom::Ring& ring, double eps);
/// Open polyline Douglas-Peucker.
std::vector<geom::Point2> simplify_polyline(const std::vector<geom::Point2>& pts, double eps);

struct HeightGrid {
    int width = 0;
    int height = 0;
    double cell_size = 1.0;
    std::vector<double> elevation;  // row-major, row 0 north

    double at(int col, int row) const {
        return elevation[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col)];
    }
    geom::BBox extent() const { return {0.0, 0.0, width * cell_size, height * cell_size}; }
};

/// 16-bit grayscale PNG, meters = value * scale.
HeightGrid load_height_png(std::span<const std::uint8_t> png, double cell_size = 1.0, double scale = 0.1);

/// Bilinear interpolation between cell centres (clamped to the edge cells
/// within the outer half cell). Throws OutOfExtent outside the grid.
double sample_height(const HeightGrid& grid, double x, double y);

}  // namespace cityforge::raster
