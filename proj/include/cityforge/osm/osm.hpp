#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cityforge/geometry/types.hpp"

namespace cityforge::osm {

enum class OsmErrc { XmlSyntax, DanglingNodeRef, MissingLatLon, DuplicateId, BadAttribute, OutOfRange };

class OsmError : public CodedError<OsmErrc> {
public:
    OsmError(OsmErrc kind, const std::string& message, std::int64_t id = 0, long line = 0, long column = 0)
        : CodedError<OsmErrc>(kind, message), id_(id), line_(line), column_(column) {}

    /// Element id for DanglingNodeRef (way id) / MissingLatLon (node id).
    std::int64_t id() const noexcept { return id_; }
    /// 1-based location for XmlSyntax.
    long line() const noexcept { return line_; }
    long column() const noexcept { return column_; }

private:
    std::int64_t id_;
    long line_;
    long column_;
};

using Tags = std::map<std::string, std::string>;

struct Node {
    double lat = 0.0;
    double lon = 0.0;
    Tags tags;
};

struct Way {
    std::vector<std::int64_t> refs;
    Tags tags;

    bool closed() const { return refs.size() >= 4 && refs.front() == refs.back(); }
};

struct Member {
    std::string type;  // node | way | relation
    std::int64_t ref = 0;
    std::string role;
};

struct Relation {
    std::vector<Member> members;
    Tags tags;
};

struct OsmDocument {
    std::map<std::int64_t, Node> nodes;
    std::map<std::int64_t, Way> ways;
    std::map<std::int64_t, Relation> relations;
};

/// Parses the OSM XML v0.6 subset (node/way/nd/relation/member/tag).
OsmDocument parse_osm(std::string_view xml);

inline constexpr double kEarthRadius = 6378137.0;

struct GeoOrigin {
    double lat0 = 0.0;
    double lon0 = 0.0;
};

/// Equirectangular projection to local meters around `origin`.
geom::Point2 project(double lat, double lon, GeoOrigin origin);

/// Inverse of project: returns {lat, lon}.
std::pair<double, double> unproject(geom::Point2 p, GeoOrigin origin);

/// Centre of the node bounding box.
GeoOrigin bbox_origin(const OsmDocument& doc);

struct Road {
    geom::Polyline line;
    std::string highway;
    double width = 8.0;
    std::int64_t way_id = 0;
};

struct Building {
    geom::Polygon footprint;
    std::optional<double> declared_height;
    std::int64_t source_id = 0;
    bool from_relation = false;
};

struct Landuse {
    geom::Polygon area;
    std::string label;
};

struct Skipped {
    std::string element;  // "way" or "relation"
    std::int64_t id = 0;
    std::string reason;
};

struct LayerSet {
    std::vector<Road> roads;
    std::vector<Building> buildings;
    std::vector<geom::Polygon> water;
    std::vector<Landuse> landuse;
    std::vector<Skipped> skipped;
    /// Ways that landed in one of the layers; ways_classified + skipped ways = all ways.
    std::size_t ways_classified = 0;
    GeoOrigin origin;
};

/// motorway 24, primary 16, secondary 12, residential 8, footway 2.5, anything else 8.
double highway_width(std::string_view highway);

/// height=<meters> wins over building:levels=<n> (n x 3 m).
std::optional<double> declared_height(const Tags& tags);

LayerSet classify_layers(const OsmDocument& doc, GeoOrigin origin);

}  // namespace cityforge::osm
