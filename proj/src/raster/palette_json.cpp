#include <json.hpp>

#include "cityforge/raster/raster.hpp"

namespace cityforge::raster {

Palette parse_palette(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw RasterError(RasterErrc::BadPalette, std::string("palette is not valid JSON: ") + e.what());
    }
    if (!doc.is_array() || doc.empty()) throw RasterError(RasterErrc::BadPalette, "palette must be a non-empty array");
    Palette p;
    for (const auto& e : doc) {
        if (!e.is_object() || !e.contains("color") || !e.contains("label") || e.size() != 2) {
            throw RasterError(RasterErrc::BadPalette, "palette entries need exactly 'color' and 'label'");
        }
        const auto& c = e["color"];
        if (!c.is_array() || c.size() != 3) throw RasterError(RasterErrc::BadPalette, "color must be [r,g,b]");
        int rgb[3];
        for (int i = 0; i < 3; ++i) {
            if (!c[i].is_number_integer() || c[i].get<int>() < 0 || c[i].get<int>() > 255) {
                throw RasterError(RasterErrc::BadPalette, "color components must be integers in 0..255");
            }
            rgb[i] = c[i].get<int>();
        }
        if (!e["label"].is_string() || e["label"].get<std::string>().empty()) {
            throw RasterError(RasterErrc::BadPalette, "label must be a non-empty string");
        }
        PaletteEntry entry{{static_cast<std::uint8_t>(rgb[0]), static_cast<std::uint8_t>(rgb[1]),
                            static_cast<std::uint8_t>(rgb[2])},
                           e["label"].get<std::string>()};
        if (p.find(entry.color)) throw RasterError(RasterErrc::BadPalette, "duplicate palette color");
        if (p.index_of(entry.label)) throw RasterError(RasterErrc::BadPalette, "duplicate palette label " + entry.label);
        p.entries.push_back(std::move(entry));
    }
    return p;
}

std::string palette_json(const Palette& palette) {
    nlohmann::json doc = nlohmann::json::array();
    for (const PaletteEntry& e : palette.entries) {
        doc.push_back({{"color", {e.color.r, e.color.g, e.color.b}}, {"label", e.label}});
    }
    return doc.dump(2);
}

}  // namespace cityforge::raster
