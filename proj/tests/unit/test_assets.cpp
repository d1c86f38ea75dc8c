#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>

#include "cityforge/assets/assets.hpp"
#include "cityforge/geometry/mesh.hpp"

using namespace cityforge;
using namespace cityforge::assets;

namespace {

// Independent 3-gram hashing: FNV-1a over the lowercased, space-padded text.
std::vector<double> oracle_embed(std::string text) {
    for (char& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    text = " " + text + " ";
    std::vector<double> v(768, 0.0);
    for (std::size_t i = 0; i + 3 <= text.size(); ++i) {
        std::uint64_t h = 14695981039346656037ull;
        for (std::size_t j = i; j < i + 3; ++j) {
            h ^= static_cast<unsigned char>(text[j]);
            h *= 1099511628211ull;
        }
        v[h % 768] += 1.0;
    }
    double n = 0.0;
    for (double x : v) n += x * x;
    for (double& x : v) x /= std::sqrt(n);
    return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

class ScaledEmbedding : public EmbeddingClient {
public:
    explicit ScaledEmbedding(double k) : k_(k) {}
    Embedding embed(std::string_view text) const override {
        Embedding v = embed_text(text);
        for (double& x : v) x *= k_;
        return v;
    }

private:
    double k_;
};

std::string random_description(std::mt19937_64& rng) {
    static const char* words[] = {"tall",  "glass", "tower", "oak",   "tree",   "red",    "brick", "house",
                                  "lamp",  "steel", "small", "pine",  "office", "garden", "old",   "modern",
                                  "roof",  "flat",  "green", "stone", "bench",  "street", "light", "canopy"};
    std::uniform_int_distribution<int> n(1, 5), w(0, 23);
    std::string s;
    const int k = n(rng);
    for (int i = 0; i < k; ++i) s += std::string(i ? " " : "") + words[w(rng)];
    return s;
}

AssetLibrary random_library(std::size_t n, std::uint64_t seed, std::shared_ptr<const EmbeddingClient> client = nullptr) {
    std::mt19937_64 rng(seed);
    AssetLibrary lib(std::move(client));
    for (std::size_t i = 0; i < n; ++i) {
        AssetRecord r;
        r.id = "a" + std::to_string(1000 + i);
        r.kind = "prop";
        r.description = random_description(rng);
        r.mesh = std::make_shared<const geom::Mesh>(box_mesh(0, 0, 1, 1, 0, 1));
        lib.add(r);
    }
    return lib;
}

}  // namespace

TEST_CASE("embeddings are unit vectors matching the hashing oracle") {
    for (const char* t : {"a", "tall glass tower", "Oak Tree", "streetlamp 6 m pole with 1.5 m arm"}) {
        CAPTURE(t);
        const Embedding e = embed_text(t);
        REQUIRE(e.size() == kEmbeddingDim);
        double n = 0.0;
        for (double x : e) n += x * x;
        CHECK(std::abs(std::sqrt(n) - 1.0) < 1e-9);
        CHECK(std::abs(dot(e, e) - 1.0) < 1e-9);
        const auto o = oracle_embed(t);
        for (std::size_t i = 0; i < kEmbeddingDim; ++i) REQUIRE(std::abs(e[i] - o[i]) < 1e-12);
    }
    CHECK(embed_text("x y") == embed_text("x y"));
    CHECK_THROWS_AS(embed_text(""), AssetError);
}

TEST_CASE("near-duplicate text scores above unrelated text") {
    const double near = dot(oracle_embed("tall glass tower"), oracle_embed("tall glass towers"));
    const double far = dot(oracle_embed("tall glass tower"), oracle_embed("oak tree"));
    REQUIRE(near > far);
    CHECK(cosine(embed_text("tall glass tower"), embed_text("tall glass towers")) >
          cosine(embed_text("tall glass tower"), embed_text("oak tree")));
}

TEST_CASE("top-k matches an exhaustive scan") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const AssetLibrary lib = random_library(300, seed);
        std::mt19937_64 rng(seed * 77);
        for (int q = 0; q < 10; ++q) {
            const std::string query = random_description(rng);
            const Embedding qe = embed_text(query);
            const auto recs = lib.snapshot();
            std::vector<std::pair<double, std::string>> all;
            for (const AssetRecord& r : recs) all.push_back({dot(oracle_embed(r.description), oracle_embed(query)), r.id});
            std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            const auto top = lib.top_k(qe, 10);
            REQUIRE(top.size() == 10);
            for (std::size_t i = 0; i < 10; ++i) {
                // equal scores may differ in the last bit between the two sums
                CHECK(std::abs(top[i].score - all[i].first) < 1e-12);
                if (i + 1 < all.size() && std::abs(all[i].first - all[i + 1].first) > 1e-12 &&
                    (i == 0 || std::abs(all[i - 1].first - all[i].first) > 1e-12))
                    CHECK(lib.at(top[i].index).id == all[i].second);
            }
        }
    }
}

TEST_CASE("retrieval picks from the top matches") {
    AssetLibrary lib = random_library(40, 9);
    AssetRecord exact;
    exact.id = "zz_target";
    exact.kind = "prop";
    exact.description = "weathered copper fountain";
    exact.mesh = std::make_shared<const geom::Mesh>(box_mesh(0, 0, 1, 1, 0, 1));
    lib.add(exact);
    CHECK(lib.retrieve("weathered copper fountain", 123, 1).id == "zz_target");
    const auto top = lib.top_k(embed_text("weathered copper fountain"), 10);
    CHECK(lib.at(top[0].index).id == "zz_target");
    CHECK(std::abs(top[0].score - 1.0) < 1e-12);

    for (std::uint64_t s = 0; s < 50; ++s) {
        const std::string id = lib.retrieve("copper", s).id;
        CHECK(lib.retrieve("copper", s).id == id);
        bool in_top = false;
        for (const Candidate& c : lib.top_k(embed_text("copper"), 10)) in_top |= lib.at(c.index).id == id;
        CHECK(in_top);
    }

    AssetLibrary small = random_library(3, 4);
    CHECK(small.top_k(embed_text("tree"), 10).size() == 3);
    std::set<std::string> seen;
    for (std::uint64_t s = 0; s < 200; ++s) seen.insert(small.retrieve("tree", s).id);
    CHECK(seen.size() == 3);

    AssetLibrary none;
    CHECK_THROWS_AS(none.retrieve("tree", 0), AssetError);
}

TEST_CASE("retrieval ignores the scale of raw embeddings") {
    const AssetLibrary a = random_library(200, 21);
    const AssetLibrary b = random_library(200, 21, std::make_shared<ScaledEmbedding>(7.25));
    std::mt19937_64 rng(5);
    for (int q = 0; q < 20; ++q) {
        const std::string query = random_description(rng);
        CHECK(a.retrieve(query, static_cast<std::uint64_t>(q)).id == b.retrieve(query, static_cast<std::uint64_t>(q)).id);
    }
}

TEST_CASE("procedural assets") {
    AssetLibrary lib;
    AssetParams p;
    p.width = 10;
    p.depth = 10;
    p.height = 30;
    const AssetRecord b = generate_asset(lib, "building", p, 1);
    CHECK(b.id == "building_0");
    CHECK(geom::is_closed(*b.mesh));
    CHECK(std::abs(geom::mesh_volume(*b.mesh) - 3000.0) <= 3000.0 * 1e-6);
    CHECK(b.description.find("building") != std::string::npos);

    p.roof = "gabled";
    p.roof_height = 4;
    const AssetRecord g = generate_asset(lib, "building", p, 2);
    // gable prism: half of width x roof_height, times depth
    CHECK(std::abs(geom::mesh_volume(*g.mesh) - (3000.0 + 0.5 * 10 * 4 * 10)) < 1e-6);

    const geom::Mesh cone = cone_mesh(2.0, 3.0, 64);
    const double analytic = std::numbers::pi * 4.0 * 3.0 / 3.0;
    const double polygon = 64.0 / 2.0 * 4.0 * std::sin(2.0 * std::numbers::pi / 64.0) * 3.0 / 3.0;
    CHECK(std::abs(geom::mesh_volume(cone) - analytic) < 0.01 * analytic);
    CHECK(std::abs(geom::mesh_volume(cone) - polygon) < 1e-9);

    AssetParams t;
    t.canopy_radius = 2;
    t.canopy_height = 3;
    const AssetRecord tree = generate_asset(lib, "tree", t, 3);
    const double trunk = t.segments / 2.0 * t.trunk_radius * t.trunk_radius * std::sin(2 * std::numbers::pi / t.segments) *
                         t.trunk_height;
    const double canopy =
        t.segments / 2.0 * 4.0 * std::sin(2 * std::numbers::pi / t.segments) * 3.0 / 3.0;
    CHECK(std::abs(geom::mesh_volume(*tree.mesh) - (trunk + canopy)) < 1e-9);
    CHECK(std::abs(canopy - analytic) < 0.01 * analytic);

    const AssetRecord lamp = generate_asset(lib, "streetlamp", AssetParams{}, 4);
    CHECK(lamp.kind == "streetlamp");
    CHECK(!lamp.mesh->triangles.empty());

    AssetParams bad;
    bad.height = -1;
    CHECK_THROWS_AS(generate_asset(lib, "building", bad, 0), AssetError);
    CHECK_THROWS_AS(generate_asset(lib, "bridge", AssetParams{}, 0), AssetError);

    // growth is monotone: earlier records are untouched
    const std::size_t before = lib.size();
    const auto snap = lib.snapshot();
    generate_asset(lib, "tree", AssetParams{}, 5);
    CHECK(lib.size() == before + 1);
    for (std::size_t i = 0; i < snap.size(); ++i) {
        CHECK(lib.at(i).id == snap[i].id);
        CHECK(lib.at(i).description == snap[i].description);
        CHECK(lib.at(i).embedding == snap[i].embedding);
    }
    for (const AssetRecord& r : lib.snapshot()) {
        double n = 0.0;
        for (double x : r.embedding) n += x * x;
        CHECK(std::abs(std::sqrt(n) - 1.0) < 1e-9);
    }
}

TEST_CASE("library directory round trip") {
    AssetLibrary lib;
    for (int i = 0; i < 3; ++i) {
        AssetParams p;
        p.height = 10.0 + i;
        generate_asset(lib, i == 1 ? "tree" : "building", p, static_cast<std::uint64_t>(i));
    }
    CHECK_THROWS_AS(lib.add(lib.at(0)), AssetError);
    const auto dir = std::filesystem::temp_directory_path() / "cityforge_test_library";
    std::filesystem::remove_all(dir);
    save_library(lib, dir.string());
    const AssetLibrary back = load_library(dir.string());
    REQUIRE(back.size() == lib.size());
    for (std::size_t i = 0; i < lib.size(); ++i) {
        const AssetRecord a = lib.at(i), b = back.at(i);
        CHECK(a.id == b.id);
        CHECK(a.kind == b.kind);
        CHECK(a.description == b.description);
        CHECK(a.material == b.material);
        CHECK(a.mesh->positions.size() == b.mesh->positions.size());
        CHECK(a.mesh->triangles.size() == b.mesh->triangles.size());
        CHECK(std::abs(geom::mesh_volume(*a.mesh) - geom::mesh_volume(*b.mesh)) < 1e-12);
    }
    std::filesystem::remove_all(dir);
}
