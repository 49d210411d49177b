#include <cmath>

#include "doctest.h"
#include "gbe/shortest_path.hpp"
#include "gbe/worldgen.hpp"
#include "support/oracles.hpp"

using namespace gbe;

namespace {

// Hand-built world: positions chosen, features zero-filled.
World tiny_world(const std::vector<std::pair<double, double>>& positions,
                 const std::vector<std::pair<int, int>>& edges) {
    World w;
    w.id = 99;
    w.feature_dim = 1;
    w.regions.push_back({0, "kitchen"});
    for (std::size_t i = 0; i < positions.size(); ++i) {
        NodeSpec n;
        n.id = static_cast<NodeId>(i);
        n.x = quantize_metric(positions[i].first);
        n.y = quantize_metric(positions[i].second);
        n.region = 0;
        n.feature = Eigen::VectorXd::Zero(1);
        w.nodes.push_back(n);
    }
    for (auto [a, b] : edges) {
        Edge e;
        e.a = std::min(a, b);
        e.b = std::max(a, b);
        e.length = quantize_metric(w.distance_between_positions(e.a, e.b));
        w.edges.push_back(e);
    }
    w.rebuild_adjacency();
    return w;
}

}  // namespace

TEST_SUITE("shortest_path") {

TEST_CASE("distance to self is zero") {
    World w = generate_world(3, WorldConfig{.node_count = 10, .region_count = 2, .object_count = 1});
    for (NodeId n = 0; n < 10; ++n) CHECK(shortest_distance(w, n, n) == 0.0);
}

TEST_CASE("3-4-5 triangle prefers the direct edge when present") {
    // Right triangle: 0-(0,0), 1-(3,0), 2-(3,4); legs 3 and 4, hypotenuse 5.
    World with_direct = tiny_world({{0, 0}, {3, 0}, {3, 4}}, {{0, 1}, {1, 2}, {0, 2}});
    CHECK(shortest_distance(with_direct, 0, 2) == doctest::Approx(5.0).epsilon(1e-12));
    World without_direct = tiny_world({{0, 0}, {3, 0}, {3, 4}}, {{0, 1}, {1, 2}});
    CHECK(shortest_distance(without_direct, 0, 2) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("unknown node ids throw") {
    World w = tiny_world({{0, 0}, {1, 0}}, {{0, 1}});
    CHECK_THROWS_AS(shortest_distance(w, 0, 5), std::out_of_range);
    CHECK_THROWS_AS(shortest_distance(w, -1, 0), std::out_of_range);
}

TEST_CASE("matches Floyd-Warshall exactly on random worlds") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        WorldConfig cfg;
        cfg.node_count = 10 + static_cast<int>(seed * 3 % 41);
        cfg.region_count = 3;
        cfg.object_count = 2;
        World w = generate_world(seed, cfg);
        auto fw = test::floyd_warshall(w);
        for (NodeId a = 0; a < cfg.node_count; ++a) {
            std::vector<double> d = dijkstra_from(w, a);
            for (NodeId b = 0; b < cfg.node_count; ++b)
                CHECK(d[static_cast<std::size_t>(b)] == fw[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
        }
    }
}

TEST_CASE("symmetry and triangle inequality on sampled triples") {
    World w = generate_world(21, WorldConfig{.node_count = 30, .region_count = 4, .object_count = 2});
    Rng rng(123);
    for (int i = 0; i < 200; ++i) {
        NodeId a = rng.uniform_int(30), b = rng.uniform_int(30), c = rng.uniform_int(30);
        double ab = shortest_distance(w, a, b);
        CHECK(ab == shortest_distance(w, b, a));
        CHECK(ab <= shortest_distance(w, a, c) + shortest_distance(w, c, b) + 1e-12);
    }
}

TEST_CASE("recovered paths are adjacent chains with the right length") {
    World w = generate_world(5, WorldConfig{.node_count = 25, .region_count = 3, .object_count = 2});
    Rng rng(9);
    for (int i = 0; i < 50; ++i) {
        NodeId a = rng.uniform_int(25), b = rng.uniform_int(25);
        auto path = shortest_path_between(w, a, b);
        REQUIRE(!path.empty());
        CHECK(path.front() == a);
        CHECK(path.back() == b);
        double total = 0.0;
        for (std::size_t k = 1; k < path.size(); ++k) {
            bool adjacent = false;
            for (auto [m, len] : w.adjacency[path[k - 1]])
                if (m == path[k]) {
                    adjacent = true;
                    total += len;
                }
            CHECK(adjacent);
        }
        CHECK(total == shortest_distance(w, a, b));
    }
}

}  // TEST_SUITE
