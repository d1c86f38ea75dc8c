#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <json.hpp>
#include <mutex>

#include "cityforge/assets/assets.hpp"
#include "cityforge/core/rng.hpp"
#include "cityforge/core/text.hpp"
#include "cityforge/geometry/mesh.hpp"

namespace cityforge::assets {

Embedding HashingEmbedding::embed(std::string_view text) const {
    if (text.empty()) throw AssetError(AssetErrc::EmptyText, "cannot embed empty text");
    const std::string padded = " " + lowercase(text) + " ";
    Embedding v(kEmbeddingDim, 0.0);
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
        v[fnv1a64(std::string_view(padded).substr(i, 3)) % kEmbeddingDim] += 1.0;
    }
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    const double n = std::sqrt(n2);
    for (double& x : v) x /= n;
    return v;
}

Embedding embed_text(std::string_view text) { return HashingEmbedding{}.embed(text); }

double cosine(const Embedding& a, const Embedding& b) {
    double ab = 0.0, aa = 0.0, bb = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    for (std::size_t i = n; i < a.size(); ++i) aa += a[i] * a[i];
    for (std::size_t i = n; i < b.size(); ++i) bb += b[i] * b[i];
    if (aa == 0.0 || bb == 0.0) return 0.0;
    return ab / (std::sqrt(aa) * std::sqrt(bb));
}

AssetLibrary::AssetLibrary(std::shared_ptr<const EmbeddingClient> client)
    : client_(client ? std::move(client) : std::make_shared<HashingEmbedding>()) {}

AssetLibrary::AssetLibrary(const AssetLibrary& other) : client_(other.client_), records_(other.snapshot()) {}

void AssetLibrary::add(AssetRecord record) {
    if (record.embedding.empty()) record.embedding = client_->embed(record.description);
    std::unique_lock lock(mutex_);
    for (const AssetRecord& r : records_) {
        if (r.id == record.id) throw AssetError(AssetErrc::DuplicateId, "duplicate asset id: " + record.id);
    }
    records_.push_back(std::move(record));
}

std::size_t AssetLibrary::size() const {
    std::shared_lock lock(mutex_);
    return records_.size();
}

AssetRecord AssetLibrary::at(std::size_t i) const {
    std::shared_lock lock(mutex_);
    return records_.at(i);
}

std::vector<AssetRecord> AssetLibrary::snapshot() const {
    std::shared_lock lock(mutex_);
    return records_;
}

std::vector<Candidate> AssetLibrary::top_k(const Embedding& query, std::size_t k) const {
    std::shared_lock lock(mutex_);
    return top_k_unlocked(query, k);
}

std::vector<Candidate> AssetLibrary::top_k_unlocked(const Embedding& query, std::size_t k) const {
    std::vector<Candidate> all;
    all.reserve(records_.size());
    for (std::size_t i = 0; i < records_.size(); ++i) all.push_back({i, cosine(query, records_[i].embedding)});
    const std::size_t take = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(),
                      [&](const Candidate& a, const Candidate& b) {
                          if (a.score != b.score) return a.score > b.score;
                          return records_[a.index].id < records_[b.index].id;
                      });
    all.resize(take);
    return all;
}

AssetRecord AssetLibrary::retrieve(std::string_view query, std::uint64_t seed, std::size_t k) const {
    if (k == 0) throw AssetError(AssetErrc::BadParams, "k must be positive");
    const Embedding q = client_->embed(query);
    std::shared_lock lock(mutex_);
    if (records_.empty()) throw AssetError(AssetErrc::EmptyLibrary, "asset library is empty");
    const std::vector<Candidate> top = top_k_unlocked(q, k);
    Rng rng(seed);
    return records_[top[rng.below(top.size())].index];
}

std::string encode_mesh(const geom::Mesh& mesh) {
    std::string out = "CFMESH01";
    auto put32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
    };
    auto put64 = [&](double d) {
        std::uint64_t v;
        std::memcpy(&v, &d, 8);
        for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
    };
    put32(static_cast<std::uint32_t>(mesh.positions.size()));
    put32(static_cast<std::uint32_t>(mesh.triangles.size()));
    for (const geom::Vec3& p : mesh.positions) {
        put64(p.x);
        put64(p.y);
        put64(p.z);
    }
    for (std::size_t i = 0; i < mesh.positions.size(); ++i) {
        const geom::Vec3 n = i < mesh.normals.size() ? mesh.normals[i] : geom::Vec3{0, 0, 1};
        put64(n.x);
        put64(n.y);
        put64(n.z);
    }
    for (const geom::TriIndex& t : mesh.triangles) {
        for (std::uint32_t v : t) put32(v);
    }
    return out;
}

geom::Mesh decode_mesh(std::string_view bytes) {
    std::size_t pos = 0;
    auto need = [&](std::size_t n) {
        if (pos + n > bytes.size()) throw AssetError(AssetErrc::BadLibrary, "truncated mesh blob");
    };
    need(8);
    if (bytes.substr(0, 8) != "CFMESH01") throw AssetError(AssetErrc::BadLibrary, "not a mesh blob");
    pos = 8;
    auto get32 = [&]() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos++])) << (8 * i);
        return v;
    };
    auto get64 = [&]() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos++])) << (8 * i);
        double d;
        std::memcpy(&d, &v, 8);
        return d;
    };
    geom::Mesh m;
    const std::uint32_t nv = get32();
    const std::uint32_t nt = get32();
    m.positions.resize(nv);
    m.normals.resize(nv);
    m.triangles.resize(nt);
    for (auto& p : m.positions) p = {get64(), get64(), get64()};
    for (auto& n : m.normals) n = {get64(), get64(), get64()};
    for (auto& t : m.triangles) {
        for (auto& v : t) {
            v = get32();
            if (v >= nv) throw AssetError(AssetErrc::BadLibrary, "mesh index out of range");
        }
    }
    return m;
}

void save_library(const AssetLibrary& library, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    nlohmann::json index = nlohmann::json::array();
    for (const AssetRecord& r : library.snapshot()) {
        nlohmann::json j;
        j["id"] = r.id;
        j["kind"] = r.kind;
        j["description"] = r.description;
        j["material"] = {{"base_color", r.material.base_color}, {"roughness", r.material.roughness}};
        j["embedding"] = r.embedding;
        write_file((fs::path(dir) / (r.id + ".json")).string(), j.dump());
        write_file((fs::path(dir) / (r.id + ".mesh")).string(), encode_mesh(r.mesh ? *r.mesh : geom::Mesh{}));
        index.push_back(r.id);
    }
    write_file((fs::path(dir) / "index.json").string(), index.dump(2));
}

AssetLibrary load_library(const std::string& dir, std::shared_ptr<const EmbeddingClient> client) {
    namespace fs = std::filesystem;
    AssetLibrary lib(std::move(client));
    try {
        const nlohmann::json index = nlohmann::json::parse(read_file((fs::path(dir) / "index.json").string()));
        for (const auto& id : index) {
            const std::string sid = id.get<std::string>();
            const nlohmann::json j = nlohmann::json::parse(read_file((fs::path(dir) / (sid + ".json")).string()));
            AssetRecord r;
            r.id = j.at("id").get<std::string>();
            r.kind = j.at("kind").get<std::string>();
            r.description = j.at("description").get<std::string>();
            r.material.base_color = j.at("material").at("base_color").get<std::array<double, 3>>();
            r.material.roughness = j.at("material").at("roughness").get<double>();
            r.embedding = j.at("embedding").get<Embedding>();
            r.mesh = std::make_shared<const geom::Mesh>(decode_mesh(read_file((fs::path(dir) / (sid + ".mesh")).string())));
            lib.add(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw AssetError(AssetErrc::BadLibrary, std::string("bad library: ") + e.what());
    }
    return lib;
}

}  // namespace cityforge::assets
