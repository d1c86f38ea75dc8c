#include "cityforge/osm/osm.hpp"

#include <expat.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <memory>
#include <numbers>

#include "cityforge/geometry/polygon.hpp"

namespace cityforge::osm {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

enum class Open { None, Node, Way, Relation };

struct ParseState {
    XML_Parser parser = nullptr;
    OsmDocument doc;
    Open open = Open::None;
    std::int64_t current = 0;
    std::optional<OsmError> error;
};

const char* attr(const XML_Char** atts, const char* name) {
    for (int i = 0; atts[i]; i += 2) {
        if (std::strcmp(atts[i], name) == 0) return atts[i + 1];
    }
    return nullptr;
}

template <typename T>
bool parse_number(const char* s, T& out) {
    if (!s) return false;
    const char* end = s + std::strlen(s);
    auto [ptr, ec] = std::from_chars(s, end, out);
    return ec == std::errc() && ptr == end;
}

void fail(ParseState& st, OsmError err) {
    if (!st.error) st.error = std::move(err);
    XML_StopParser(st.parser, XML_FALSE);
}

void fail_attr(ParseState& st, const char* element, const char* name) {
    fail(st, OsmError(OsmErrc::BadAttribute,
                      std::string("<") + element + "> has a missing or malformed '" + name + "' attribute", 0,
                      static_cast<long>(XML_GetCurrentLineNumber(st.parser)),
                      static_cast<long>(XML_GetCurrentColumnNumber(st.parser)) + 1));
}

Tags* current_tags(ParseState& st) {
    switch (st.open) {
        case Open::Node: return &st.doc.nodes[st.current].tags;
        case Open::Way: return &st.doc.ways[st.current].tags;
        case Open::Relation: return &st.doc.relations[st.current].tags;
        case Open::None: return nullptr;
    }
    return nullptr;
}

template <typename Map>
bool insert_unique(ParseState& st, Map& map, std::int64_t id, const char* kind) {
    if (map.count(id)) {
        fail(st, OsmError(OsmErrc::DuplicateId, std::string("duplicate ") + kind + " id " + std::to_string(id), id));
        return false;
    }
    map[id];
    return true;
}

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** atts) {
    auto& st = *static_cast<ParseState*>(user);
    if (st.error) return;
    const std::string_view el(name);
    std::int64_t id = 0;
    if (el == "node") {
        if (!parse_number(attr(atts, "id"), id)) return fail_attr(st, name, "id");
        const char* lat_s = attr(atts, "lat");
        const char* lon_s = attr(atts, "lon");
        double lat = 0.0, lon = 0.0;
        if (!lat_s || !lon_s) {
            return fail(st, OsmError(OsmErrc::MissingLatLon, "node " + std::to_string(id) + " has no lat/lon", id));
        }
        if (!parse_number(lat_s, lat)) return fail_attr(st, name, "lat");
        if (!parse_number(lon_s, lon)) return fail_attr(st, name, "lon");
        if (!insert_unique(st, st.doc.nodes, id, "node")) return;
        st.doc.nodes[id].lat = lat;
        st.doc.nodes[id].lon = lon;
        st.open = Open::Node;
        st.current = id;
    } else if (el == "way") {
        if (!parse_number(attr(atts, "id"), id)) return fail_attr(st, name, "id");
        if (!insert_unique(st, st.doc.ways, id, "way")) return;
        st.open = Open::Way;
        st.current = id;
    } else if (el == "relation") {
        if (!parse_number(attr(atts, "id"), id)) return fail_attr(st, name, "id");
        if (!insert_unique(st, st.doc.relations, id, "relation")) return;
        st.open = Open::Relation;
        st.current = id;
    } else if (el == "nd") {
        if (st.open != Open::Way) return;
        std::int64_t ref = 0;
        if (!parse_number(attr(atts, "ref"), ref)) return fail_attr(st, name, "ref");
        st.doc.ways[st.current].refs.push_back(ref);
    } else if (el == "member") {
        if (st.open != Open::Relation) return;
        Member m;
        const char* type = attr(atts, "type");
        if (!type) return fail_attr(st, name, "type");
        if (!parse_number(attr(atts, "ref"), m.ref)) return fail_attr(st, name, "ref");
        m.type = type;
        const char* role = attr(atts, "role");
        m.role = role ? role : "";
        st.doc.relations[st.current].members.push_back(std::move(m));
    } else if (el == "tag") {
        Tags* tags = current_tags(st);
        if (!tags) return;
        const char* k = attr(atts, "k");
        const char* v = attr(atts, "v");
        if (!k) return fail_attr(st, name, "k");
        (*tags)[k] = v ? v : "";
    }
}

void XMLCALL on_end(void* user, const XML_Char* name) {
    auto& st = *static_cast<ParseState*>(user);
    const std::string_view el(name);
    if (el == "node" || el == "way" || el == "relation") st.open = Open::None;
}

}  // namespace

OsmDocument parse_osm(std::string_view xml) {
    ParseState st;
    std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                                         &XML_ParserFree);
    st.parser = parser.get();
    XML_SetUserData(st.parser, &st);
    XML_SetElementHandler(st.parser, on_start, on_end);
    const XML_Status status = XML_Parse(st.parser, xml.data(), static_cast<int>(xml.size()), XML_TRUE);
    if (st.error) throw *st.error;
    if (status != XML_STATUS_OK) {
        const long line = static_cast<long>(XML_GetCurrentLineNumber(st.parser));
        const long col = static_cast<long>(XML_GetCurrentColumnNumber(st.parser)) + 1;
        throw OsmError(OsmErrc::XmlSyntax,
                       "XML syntax error at " + std::to_string(line) + ":" + std::to_string(col) + ": " +
                           XML_ErrorString(XML_GetErrorCode(st.parser)),
                       0, line, col);
    }
    for (const auto& [id, way] : st.doc.ways) {
        for (std::int64_t ref : way.refs) {
            if (!st.doc.nodes.count(ref)) {
                throw OsmError(OsmErrc::DanglingNodeRef,
                               "way " + std::to_string(id) + " references missing node " + std::to_string(ref), id);
            }
        }
    }
    return std::move(st.doc);
}

geom::Point2 project(double lat, double lon, GeoOrigin origin) {
    if (!(std::abs(lat) <= 90.0) || !(std::abs(lon) <= 180.0) || !(std::abs(origin.lat0) <= 90.0) ||
        !(std::abs(origin.lon0) <= 180.0)) {
        throw OsmError(OsmErrc::OutOfRange, "latitude/longitude out of range");
    }
    return {kEarthRadius * (lon - origin.lon0) * std::cos(origin.lat0 * kDeg) * kDeg,
            kEarthRadius * (lat - origin.lat0) * kDeg};
}

std::pair<double, double> unproject(geom::Point2 p, GeoOrigin origin) {
    const double lat = origin.lat0 + p.y / (kEarthRadius * kDeg);
    const double lon = origin.lon0 + p.x / (kEarthRadius * std::cos(origin.lat0 * kDeg) * kDeg);
    return {lat, lon};
}

GeoOrigin bbox_origin(const OsmDocument& doc) {
    if (doc.nodes.empty()) return {};
    double lat_lo = INFINITY, lat_hi = -INFINITY, lon_lo = INFINITY, lon_hi = -INFINITY;
    for (const auto& [id, n] : doc.nodes) {
        lat_lo = std::min(lat_lo, n.lat);
        lat_hi = std::max(lat_hi, n.lat);
        lon_lo = std::min(lon_lo, n.lon);
        lon_hi = std::max(lon_hi, n.lon);
    }
    return {0.5 * (lat_lo + lat_hi), 0.5 * (lon_lo + lon_hi)};
}

double highway_width(std::string_view highway) {
    if (highway == "motorway") return 24.0;
    if (highway == "primary") return 16.0;
    if (highway == "secondary") return 12.0;
    if (highway == "residential") return 8.0;
    if (highway == "footway") return 2.5;
    return 8.0;
}

namespace {

// Leading decimal number of a tag value such as "12", "12.5 m" or "12m".
std::optional<double> leading_number(const std::string& s) {
    std::size_t i = 0;
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
    if (j == i) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + j, v);
    if (ec != std::errc() || ptr != s.data() + j) return std::nullopt;
    std::string rest = s.substr(j);
    while (!rest.empty() && rest.front() == ' ') rest.erase(rest.begin());
    if (!rest.empty() && rest != "m") return std::nullopt;
    if (!(v > 0.0) || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

std::optional<double> declared_height(const Tags& tags) {
    if (auto it = tags.find("height"); it != tags.end()) {
        if (auto h = leading_number(it->second)) return h;
    }
    if (auto it = tags.find("building:levels"); it != tags.end()) {
        if (auto l = leading_number(it->second)) return *l * 3.0;
    }
    return std::nullopt;
}

namespace {

bool has(const Tags& t, const char* k) { return t.count(k) != 0; }

bool is_building(const Tags& t) {
    auto it = t.find("building");
    return it != t.end() && it->second != "no";
}

bool is_water(const Tags& t) {
    auto it = t.find("natural");
    return (it != t.end() && it->second == "water") || has(t, "waterway");
}

std::vector<geom::Point2> way_points(const OsmDocument& doc, const Way& w, GeoOrigin o) {
    std::vector<geom::Point2> pts;
    for (std::int64_t ref : w.refs) {
        const Node& n = doc.nodes.at(ref);
        pts.push_back(project(n.lat, n.lon, o));
    }
    return pts;
}

// Closed way to polygon; nullopt when degenerate or self-intersecting.
std::optional<geom::Polygon> closed_polygon(std::vector<geom::Point2> pts) {
    if (pts.size() >= 2 && geom::distance(pts.front(), pts.back()) <= geom::kCoincident) pts.pop_back();
    geom::Polygon p{geom::clean_ring(pts), {}};
    if (p.outer.size() < 3 || !geom::ring_is_simple(p.outer) ||
        std::abs(geom::ring_signed_area(p.outer)) <= geom::kEps) {
        return std::nullopt;
    }
    return geom::oriented(std::move(p));
}

// Joins member ways end to end into closed rings.
std::optional<std::vector<geom::Ring>> assemble_rings(std::vector<std::vector<geom::Point2>> parts) {
    std::vector<geom::Ring> rings;
    while (!parts.empty()) {
        std::vector<geom::Point2> cur = std::move(parts.front());
        parts.erase(parts.begin());
        while (geom::distance(cur.front(), cur.back()) > geom::kCoincident) {
            bool joined = false;
            for (std::size_t i = 0; i < parts.size(); ++i) {
                auto& p = parts[i];
                if (geom::distance(p.front(), cur.back()) <= geom::kCoincident) {
                    cur.insert(cur.end(), p.begin() + 1, p.end());
                } else if (geom::distance(p.back(), cur.back()) <= geom::kCoincident) {
                    cur.insert(cur.end(), p.rbegin() + 1, p.rend());
                } else {
                    continue;
                }
                parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(i));
                joined = true;
                break;
            }
            if (!joined) return std::nullopt;
        }
        cur.pop_back();
        geom::Ring r = geom::clean_ring(cur);
        if (r.size() < 3 || !geom::ring_is_simple(r)) return std::nullopt;
        rings.push_back(std::move(r));
    }
    return rings;
}

std::optional<std::vector<geom::Polygon>> multipolygon(const OsmDocument& doc, const Relation& rel, GeoOrigin o) {
    std::vector<std::vector<geom::Point2>> outer_parts, inner_parts;
    for (const Member& m : rel.members) {
        if (m.type != "way") continue;
        auto it = doc.ways.find(m.ref);
        if (it == doc.ways.end()) return std::nullopt;
        (m.role == "inner" ? inner_parts : outer_parts).push_back(way_points(doc, it->second, o));
    }
    if (outer_parts.empty()) return std::nullopt;
    auto outers = assemble_rings(std::move(outer_parts));
    auto inners = assemble_rings(std::move(inner_parts));
    if (!outers || !inners) return std::nullopt;
    std::vector<geom::Polygon> polys;
    for (geom::Ring& r : *outers) polys.push_back(geom::oriented({std::move(r), {}}));
    for (geom::Ring& h : *inners) {
        bool placed = false;
        for (geom::Polygon& p : polys) {
            if (geom::locate(h[0], p.outer, 0.0) == geom::Location::Inside) {
                p.holes.push_back(h);
                placed = true;
                break;
            }
        }
        if (!placed) return std::nullopt;
    }
    for (geom::Polygon& p : polys) {
        p = geom::oriented(std::move(p));
        if (!geom::polygon_is_simple(p)) return std::nullopt;
    }
    return polys;
}

}  // namespace

LayerSet classify_layers(const OsmDocument& doc, GeoOrigin origin) {
    LayerSet out;
    out.origin = origin;
    auto skip = [&](const char* element, std::int64_t id, std::string reason) {
        out.skipped.push_back({element, id, std::move(reason)});
    };

    for (const auto& [id, way] : doc.ways) {
        const Tags& t = way.tags;
        if (has(t, "highway")) {
            geom::Polyline line;
            for (const geom::Point2& p : way_points(doc, way, origin)) {
                if (line.points.empty() || geom::distance(line.points.back(), p) > geom::kEps) line.points.push_back(p);
            }
            if (line.points.size() < 2) {
                skip("way", id, "degenerate highway");
                continue;
            }
            const std::string& cls = t.at("highway");
            out.roads.push_back({std::move(line), cls, highway_width(cls), id});
            ++out.ways_classified;
        } else if (is_building(t) || is_water(t) || has(t, "landuse")) {
            if (!way.closed()) {
                skip("way", id, "open way cannot form an area");
                continue;
            }
            auto poly = closed_polygon(way_points(doc, way, origin));
            if (!poly) {
                skip("way", id, "degenerate or self-intersecting ring");
                continue;
            }
            if (is_building(t)) {
                out.buildings.push_back({std::move(*poly), declared_height(t), id, false});
            } else if (is_water(t)) {
                out.water.push_back(std::move(*poly));
            } else {
                out.landuse.push_back({std::move(*poly), t.at("landuse")});
            }
            ++out.ways_classified;
        } else {
            skip("way", id, t.empty() ? "untagged" : "unclassified tags");
        }
    }

    for (const auto& [id, rel] : doc.relations) {
        const Tags& t = rel.tags;
        auto type = t.find("type");
        const bool mp = type != t.end() && type->second == "multipolygon";
        if (!mp || !(is_building(t) || is_water(t))) {
            skip("relation", id, "unsupported relation");
            continue;
        }
        auto polys = multipolygon(doc, rel, origin);
        if (!polys) {
            skip("relation", id, "rings could not be assembled");
            continue;
        }
        for (geom::Polygon& p : *polys) {
            if (is_building(t)) {
                out.buildings.push_back({std::move(p), declared_height(t), id, true});
            } else {
                out.water.push_back(std::move(p));
            }
        }
    }
    return out;
}

}  // namespace cityforge::osm
