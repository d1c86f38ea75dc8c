#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cityforge/core/error.hpp"

namespace cityforge::raster {

enum class RasterErrc { UnknownColor, BadImage, BadPalette, OutOfExtent, InvalidGrid };

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

class RasterError : public CodedError<RasterErrc> {
public:
    RasterError(RasterErrc kind, const std::string& message, int x = -1, int y = -1, Rgb rgb = {})
        : CodedError<RasterErrc>(kind, message), x_(x), y_(y), rgb_(rgb) {}

    /// Pixel column/row and color for UnknownColor.
    int x() const noexcept { return x_; }
    int y() const noexcept { return y_; }
    Rgb rgb() const noexcept { return rgb_; }

private:
    int x_;
    int y_;
    Rgb rgb_;
};

/// 8-bit RGB, row-major, row 0 at the top.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    Rgb at(int x, int y) const {
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x));
        return {data[i], data[i + 1], data[i + 2]};
    }
    void set(int x, int y, Rgb c) {
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x));
        data[i] = c.r;
        data[i + 1] = c.g;
        data[i + 2] = c.b;
    }
};

/// 16-bit grayscale, row-major, row 0 at the top.
struct Gray16Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> data;
};

/// Decodes an 8-bit color PNG (RGB, RGBA or palette; alpha is dropped).
RgbImage decode_rgb_png(std::span<const std::uint8_t> bytes);
/// Decodes a 16-bit grayscale PNG; values are taken as stored.
Gray16Image decode_gray16_png(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_png(const RgbImage& img);
std::vector<std::uint8_t> encode_png(const Gray16Image& img);

}  // namespace cityforge::raster
