#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>

#include "skillmap/analysis.hpp"
#include "skillmap/errors.hpp"

namespace fs = std::filesystem;
using namespace skillmap;

namespace {

EmbeddingSpace two_blobs(int per_blob, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.1);
    EmbeddingSpace space("blobs", 2);
    for (int i = 0; i < per_blob; ++i) {
        space.insert("L" + std::to_string(i), Eigen::Vector2d(-5.0 + g(rng), g(rng)));
        space.insert("R" + std::to_string(i), Eigen::Vector2d(5.0 + g(rng), g(rng)));
    }
    return space;
}

}  // namespace

TEST_CASE("kmeans separates well-split blobs deterministically") {
    EmbeddingSpace space = two_blobs(8, 3);
    ClusterAssignment a = kmeans(space, 2, 7);
    const int left = a.cluster_of.at("L0");
    const int right = a.cluster_of.at("R0");
    CHECK(left != right);
    for (int i = 0; i < 8; ++i) {
        CHECK(a.cluster_of.at("L" + std::to_string(i)) == left);
        CHECK(a.cluster_of.at("R" + std::to_string(i)) == right);
    }
    CHECK(a.inertia < 1.0);

    ClusterAssignment b = kmeans(space, 2, 7);
    CHECK(a.cluster_of == b.cluster_of);
    CHECK(a.inertia == b.inertia);
}

TEST_CASE("kmeans input validation") {
    EmbeddingSpace space = two_blobs(2, 1);
    CHECK_THROWS_AS(kmeans(space, 0, 1), ConfigError);
    CHECK_THROWS_AS(kmeans(space, 5, 1), DataError);
}

TEST_CASE("cluster match scores read partners in both directions") {
    ClusterAssignment a;
    a.cluster_of = {{"a1", 0}, {"b1", 0}, {"a2", 1}, {"b2", 2}, {"lonely", 2}};
    a.centroids.resize(3, Eigen::Vector2d::Zero());
    EquivalenceSet truth;
    truth.pairs = {{"a1", "b1"}, {"a2", "b2"}};

    auto scores = cluster_match_score(a, truth);
    // cluster 0: a1 and b1 are partners and co-resident
    CHECK(scores.at(0).value() == doctest::Approx(1.0));
    // cluster 1: a2's partner b2 lives in cluster 2
    CHECK(scores.at(1).value() == doctest::Approx(0.0));
    // cluster 2: b2 misses a2; lonely has no partner and does not count
    CHECK(scores.at(2).value() == doctest::Approx(0.0));

    EquivalenceSet empty_truth;
    empty_truth.pairs = {{"x", "y"}};
    auto none = cluster_match_score(a, empty_truth);
    CHECK_FALSE(none.at(0).has_value());
}

TEST_CASE("projection export writes one row per skill") {
    EmbeddingSpace space = two_blobs(2, 5);
    ClusterAssignment a = kmeans(space, 2, 1);
    const fs::path path = fs::temp_directory_path() / "skillmap_proj.csv";
    export_projection({{"plat", space}}, a, path.string());
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "platform,skill,cluster,v0,v1");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 4);
    fs::remove(path);

    EmbeddingSpace other("other", 3);
    other.insert("x", Eigen::Vector3d::Zero());
    CHECK_THROWS_AS(export_projection({{"p", space}, {"q", other}}, a, path.string()), DataError);
}
