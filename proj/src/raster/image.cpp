#include "cityforge/raster/image.hpp"

#include <png.h>

#include <cstring>
#include <string>

namespace cityforge::raster {

namespace {

struct ImageGuard {
    png_image img{};
    ImageGuard() {
        std::memset(&img, 0, sizeof img);
        img.version = PNG_IMAGE_VERSION;
    }
    ~ImageGuard() { png_image_free(&img); }
};

[[noreturn]] void bad(const std::string& why) { throw RasterError(RasterErrc::BadImage, "bad image: " + why); }

void begin(ImageGuard& g, std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) bad("empty input");
    if (!png_image_begin_read_from_memory(&g.img, bytes.data(), bytes.size())) bad(g.img.message);
}

}  // namespace

RgbImage decode_rgb_png(std::span<const std::uint8_t> bytes) {
    ImageGuard g;
    begin(g, bytes);
    if (g.img.format & PNG_FORMAT_FLAG_LINEAR) bad("expected 8-bit channels");
    if (!(g.img.format & PNG_FORMAT_FLAG_COLOR)) bad("expected an RGB image");
    g.img.format = PNG_FORMAT_RGB;
    RgbImage out;
    out.width = static_cast<int>(g.img.width);
    out.height = static_cast<int>(g.img.height);
    out.data.resize(PNG_IMAGE_SIZE(g.img));
    if (!png_image_finish_read(&g.img, nullptr, out.data.data(), 0, nullptr)) bad(g.img.message);
    return out;
}

Gray16Image decode_gray16_png(std::span<const std::uint8_t> bytes) {
    ImageGuard g;
    begin(g, bytes);
    if (!(g.img.format & PNG_FORMAT_FLAG_LINEAR)) bad("expected 16-bit channels");
    if (g.img.format & PNG_FORMAT_FLAG_COLOR) bad("expected a grayscale image");
    g.img.format = PNG_FORMAT_LINEAR_Y;
    Gray16Image out;
    out.width = static_cast<int>(g.img.width);
    out.height = static_cast<int>(g.img.height);
    out.data.resize(static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height));
    if (!png_image_finish_read(&g.img, nullptr, out.data.data(), 0, nullptr)) bad(g.img.message);
    return out;
}

namespace {

std::vector<std::uint8_t> write(png_image& img, const void* pixels) {
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&img, nullptr, &size, 0, pixels, 0, nullptr)) bad(img.message);
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&img, out.data(), &size, 0, pixels, 0, nullptr)) bad(img.message);
    out.resize(size);
    return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const RgbImage& src) {
    ImageGuard g;
    g.img.width = static_cast<png_uint_32>(src.width);
    g.img.height = static_cast<png_uint_32>(src.height);
    g.img.format = PNG_FORMAT_RGB;
    return write(g.img, src.data.data());
}

std::vector<std::uint8_t> encode_png(const Gray16Image& src) {
    ImageGuard g;
    g.img.width = static_cast<png_uint_32>(src.width);
    g.img.height = static_cast<png_uint_32>(src.height);
    g.img.format = PNG_FORMAT_LINEAR_Y;
    return write(g.img, src.data.data());
}

}  // namespace cityforge::raster
