#pragma once

#include <cstdint>
#include <vector>

#include "cityforge/geometry/types.hpp"
#include "cityforge/raster/raster.hpp"

namespace cityforge::raster {

/// Binary mask, row-major, 1 = set.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    bool get(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height &&
               bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] != 0;
    }
    void set(int x, int y, bool v) {
        bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] = v ? 1 : 0;
    }
    std::size_t count() const;
};

Mask class_mask(const ClassGrid& grid, std::uint16_t cls);

/// Zhang-Suen thinning to a one-pixel-wide 8-connected skeleton.
Mask thin(Mask mask);

/// Chessboard distance from each set pixel to the nearest unset pixel (or
/// the image border), in pixels; 0 for unset pixels.
std::vector<int> chessboard_distance(const Mask& mask);

struct Centerline {
    geom::Polyline line;  // world coordinates of the grid
    double width = 0.0;   // meters, estimated from the distance transform
};

/// Traces a skeleton into polylines between junctions/endpoints (junction
/// clusters collapse to their centroid), simplified at one cell.
std::vector<Centerline> trace_centerlines(const Mask& skeleton, const Mask& region, const ClassGrid& grid);

}  // namespace cityforge::raster
