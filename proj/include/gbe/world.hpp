#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gbe/common.hpp"
#include "gbe/geometry.hpp"

namespace gbe {

struct NodeSpec {
    NodeId id = 0;
    double x = 0.0;  // meters, snapped to kMetricGrid
    double y = 0.0;
    int region = 0;
    Eigen::VectorXd feature;  // synthetic panoramic feature, dim = World::feature_dim
};

struct Edge {
    NodeId a = 0;
    NodeId b = 0;
    double length = 0.0;  // Euclidean distance of the snapped endpoints, snapped
};

struct ObjectSpec {
    struct Relation {
        int other_object = 0;
        std::string type;  // near | above | below | left_of | right_of
    };
    struct HomeView {
        NodeId node = 0;        // node the object is visible from
        PolarExtent extent;     // ground-truth angular bounding box seen from there
    };

    int id = 0;
    std::string class_token;
    std::vector<std::string> attribute_tokens;  // color, size, shape
    std::vector<Relation> relations;
    std::vector<HomeView> home_views;  // non-empty
    int region = 0;
    double x = 0.0;  // object center, meters
    double y = 0.0;
    double z = 0.0;  // height above eye level; only survives in polar labels
    double size = 0.5;  // physical extent, meters
};

struct RegionSpec {
    int id = 0;
    std::string type_token;
};

struct World {
    std::uint64_t id = 0;
    int feature_dim = 0;
    std::vector<NodeSpec> nodes;      // ids dense from 0
    std::vector<Edge> edges;          // undirected, a < b
    std::vector<ObjectSpec> objects;  // ids dense from 0
    std::vector<RegionSpec> regions;

    // Derived, rebuilt on load: neighbors sorted by node id.
    std::vector<std::vector<std::pair<NodeId, double>>> adjacency;

    void rebuild_adjacency();
    int degree(NodeId n) const { return static_cast<int>(adjacency.at(n).size()); }
    const ObjectSpec& object(int id) const;
    std::vector<NodeId> home_nodes(int object_id) const;
    double distance_between_positions(NodeId a, NodeId b) const;
};

// Throws std::runtime_error describing the first violated invariant.
void validate_world(const World& w);

struct Instruction {
    std::vector<int> tokens;               // ids into the fixed vocabulary
    std::array<bool, 5> granularity{};     // segments present (1..5 -> index 0..4)
};

struct EpisodeSpec {
    std::uint64_t world_id = 0;
    NodeId start = 0;
    int object_id = 0;
    std::vector<NodeId> target_nodes;           // = object's home nodes
    Instruction instruction;
    std::map<NodeId, PolarPoint> polar_labels;  // per target node
    double shortest_path_length = 0.0;          // min over target nodes, meters
};

// Structured text (JSON) round trips.
std::string world_to_json(const World& w);
World world_from_json(const std::string& text);
std::string episode_to_json(const EpisodeSpec& e);
EpisodeSpec episode_from_json(const std::string& text);

void save_text_file(const std::string& path, const std::string& text);
std::string load_text_file(const std::string& path);

}  // namespace gbe
