#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cityforge/core/error.hpp"

namespace cityforge::protocol {

/// The closed set of data formats actions consume and produce.
enum class DataFormat : std::uint8_t {
    SceneLayout,
    NoiseFunction,
    Image,
    TextureMaterial,
    GeographicInformationData,
    Point,
    BooleanValue,
    ComplexGeometry,
    Color,
    BasicGeometry,
    StringInformation,
    Surface,
    Line,
    RandomNumber,
};

inline constexpr std::size_t kFormatCount = 14;

const std::array<DataFormat, kFormatCount>& all_formats();

/// Serialized label, e.g. "GeographicInformationData".
std::string_view format_label(DataFormat f);

/// Parameter type label used in action docs ("tuple" for Point, "str" for
/// StringInformation, ...). One label per format.
std::string_view type_label(DataFormat f);

enum class ProtocolErrc {
    MissingField,
    UnknownFormat,
    UnknownField,
    DuplicateClassname,
    BadClassname,
    BadDocument,
    UnknownAction,
};

class ProtocolError : public CodedError<ProtocolErrc> {
public:
    ProtocolError(ProtocolErrc kind, std::string detail, const std::string& message)
        : CodedError<ProtocolErrc>(kind, message), detail_(std::move(detail)) {}

    /// Field name, format label or classname the error is about.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string detail_;
};

DataFormat parse_format(std::string_view label);
DataFormat format_for_type(std::string_view type);

/// Bit set over DataFormat.
using FormatSet = std::uint16_t;

inline constexpr FormatSet bit(DataFormat f) { return static_cast<FormatSet>(1u << static_cast<unsigned>(f)); }
inline constexpr bool has(FormatSet s, DataFormat f) { return (s & bit(f)) != 0; }
FormatSet format_set(std::initializer_list<DataFormat> formats);
std::vector<DataFormat> formats_in(FormatSet s);

struct ActionInput {
    std::string name;
    DataFormat format = DataFormat::StringInformation;
    std::string description;
    std::optional<std::string> default_value;
};

/// Structured encapsulation of one action: classname, description, inputs,
/// limitation and run entry point, plus the produced format and the
/// annotator's tags.
struct ActionManifest {
    std::string classname;
    std::string description;
    std::vector<ActionInput> inputs;
    std::string limitation;
    std::string run;
    std::optional<DataFormat> output;
    std::vector<std::string> tags;

    FormatSet input_formats() const;
};

bool valid_classname(std::string_view name);

/// Accepts a manifest file ({classname, description, inputs, limitation, run}
/// plus optional output) or an action doc ({name, description, parameters}).
/// Unknown fields are rejected.
ActionManifest validate_manifest(std::string_view json_document);

/// Manifest file form (pretty-printed JSON).
std::string manifest_json(const ActionManifest& m);

/// Action doc: {"name", "description", "parameters": {p: {"type", "description"}}}.
std::string action_doc(const ActionManifest& m);

/// The 14 conversion interfaces with their format signatures.
std::vector<ActionManifest> builtin_conversions();

/// Signature table of the builtins as a JSON array.
std::string conversion_table_json();

struct ActionCall;

/// Manifests plus their implementations, keyed by classname.
class ActionRegistry {
public:
    using Implementation = std::function<void(ActionCall&)>;

    /// Throws DuplicateClassname or BadClassname.
    void add(ActionManifest manifest, Implementation impl);

    bool contains(std::string_view classname) const;
    /// Throws UnknownAction.
    const ActionManifest& manifest(std::string_view classname) const;
    const Implementation& implementation(std::string_view classname) const;
    void set_tags(std::string_view classname, std::vector<std::string> tags);

    /// Sorted by classname.
    std::vector<const ActionManifest*> manifests() const;
    std::size_t size() const { return entries_.size(); }

private:
    struct Entry {
        ActionManifest manifest;
        Implementation impl;
    };
    const Entry& entry(std::string_view classname) const;

    std::map<std::string, Entry, std::less<>> entries_;
};

}  // namespace cityforge::protocol
