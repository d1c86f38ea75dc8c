#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "cityforge/core/error.hpp"
#include "cityforge/geometry/types.hpp"

namespace cityforge::assets {

inline constexpr std::size_t kEmbeddingDim = 768;

using Embedding = std::vector<double>;

enum class AssetErrc { EmptyText, EmptyLibrary, BadParams, DuplicateId, BadLibrary };

using AssetError = CodedError<AssetErrc>;

/// Maps text to a unit vector of kEmbeddingDim components.
class EmbeddingClient {
public:
    virtual ~EmbeddingClient() = default;
    virtual Embedding embed(std::string_view text) const = 0;
};

/// Character 3-gram feature hashing (text lowercased and padded with one
/// space on each side), L2-normalized.
class HashingEmbedding : public EmbeddingClient {
public:
    Embedding embed(std::string_view text) const override;
};

/// Default hashing embedding; throws EmptyText.
Embedding embed_text(std::string_view text);

/// Dot product divided by both norms (0 when either is zero).
double cosine(const Embedding& a, const Embedding& b);

struct AssetMaterial {
    std::array<double, 3> base_color{0.8, 0.8, 0.8};
    double roughness = 0.5;

    friend bool operator==(const AssetMaterial&, const AssetMaterial&) = default;
};

struct AssetRecord {
    std::string id;
    std::string kind;
    std::string description;
    std::shared_ptr<const geom::Mesh> mesh;
    AssetMaterial material;
    Embedding embedding;
};

struct Candidate {
    std::size_t index = 0;
    double score = 0.0;
};

/// Record store with snapshot reads and serialized additions.
class AssetLibrary {
public:
    explicit AssetLibrary(std::shared_ptr<const EmbeddingClient> client = nullptr);

    AssetLibrary(const AssetLibrary& other);
    AssetLibrary& operator=(const AssetLibrary&) = delete;

    /// Computes the embedding when empty. Throws DuplicateId.
    void add(AssetRecord record);

    std::size_t size() const;
    bool empty() const { return size() == 0; }
    AssetRecord at(std::size_t i) const;
    std::vector<AssetRecord> snapshot() const;
    const EmbeddingClient& client() const { return *client_; }

    /// Best `k` records by cosine similarity, ties by id.
    std::vector<Candidate> top_k(const Embedding& query, std::size_t k = 10) const;

    /// Uniform pick among the top min(k, n) matches. Throws EmptyLibrary.
    AssetRecord retrieve(std::string_view query, std::uint64_t seed, std::size_t k = 10) const;

private:
    std::vector<Candidate> top_k_unlocked(const Embedding& query, std::size_t k) const;

    mutable std::shared_mutex mutex_;
    std::shared_ptr<const EmbeddingClient> client_;
    std::vector<AssetRecord> records_;
};

struct AssetParams {
    // building
    double width = 10.0;
    double depth = 10.0;
    double height = 30.0;
    std::string roof = "flat";  // "flat" or "gabled"
    double roof_height = 3.0;
    // tree
    double canopy_radius = 2.0;
    double canopy_height = 3.0;
    double trunk_radius = 0.25;
    double trunk_height = 2.0;
    // streetlamp
    double pole_height = 6.0;
    double arm_length = 1.5;
    int segments = 32;
};

/// Appends a procedural asset of kind building, tree or streetlamp to the
/// library and returns it. Id is "<kind>_<n>" with n the library size.
/// Throws BadParams.
AssetRecord generate_asset(AssetLibrary& library, std::string_view kind, const AssetParams& params, std::uint64_t seed);

/// Closed cone with its base circle (n segments) at z0.
geom::Mesh cone_mesh(double radius, double height, int segments, double z0 = 0.0);
/// Closed cylinder with n segments between z0 and z0 + height.
geom::Mesh cylinder_mesh(double radius, double height, int segments, double z0 = 0.0);
/// Closed axis-aligned box centred on (cx, cy), from z0 to z0 + h.
geom::Mesh box_mesh(double cx, double cy, double w, double d, double z0, double h);

/// Directory layout: index.json (ids in insertion order), <id>.json and
/// <id>.mesh per record.
void save_library(const AssetLibrary& library, const std::string& dir);
AssetLibrary load_library(const std::string& dir, std::shared_ptr<const EmbeddingClient> client = nullptr);

/// Mesh blob: "CFMESH01", u32 vertex count, u32 triangle count, f64
/// positions, f64 normals, u32 indices (little endian).
std::string encode_mesh(const geom::Mesh& mesh);
geom::Mesh decode_mesh(std::string_view bytes);

}  // namespace cityforge::assets
