#pragma once

#include <set>

#include "gbe/common.hpp"
#include "gbe/world.hpp"

namespace gbe {

struct WorldConfig {
    int node_count = 36;
    int region_count = 6;
    int object_count = 6;
    int feature_dim = 32;
    double extent = 0.0;          // side of the square layout, meters; 0 -> 4*sqrt(node_count)
    double connect_radius = 0.0;  // 0 -> 1.8*extent/sqrt(node_count)
    double visibility_radius = 2.6;
    int max_connect_retries = 64;

    double resolved_extent() const;
    double resolved_radius() const;
};

// Random geometric layout: uniform positions (snapped to the metric grid),
// edges between nodes within the connect radius. Resamples positions until
// the graph connects; throws std::runtime_error after max_connect_retries.
World generate_world(std::uint64_t seed, const WorldConfig& config);

// Start-node sampler with the distance-threshold schedule: threshold starts
// at 18 m and is multiplied by 0.8 after every 5 sample failures. Returns a
// node whose distance to the nearest target exceeds the current threshold.
NodeId sample_trajectory(const World& w, const std::vector<NodeId>& target_nodes, Rng& rng);

inline constexpr double kStartDistanceThreshold = 18.0;
inline constexpr double kThresholdDiscount = 0.8;
inline constexpr int kFailuresPerDiscount = 5;

// Templated instruction over the requested granularity segments:
//   1 object name, 2 attributes+relationships, 3 region, 4 neighbor regions,
//   5 rewritten full form (merges the content of 1-4 into one stream; when 5
//   is requested the separate segments are not emitted).
// Deterministic in (world, object, granularity). Throws on unknown level ids
// or an empty set.
Instruction generate_instruction(const World& w, const ObjectSpec& object,
                                 const std::set<int>& granularity);

// Assembles a full episode for a sampled start node.
EpisodeSpec make_episode(const World& w, int object_id, NodeId start,
                         const std::set<int>& granularity);

}  // namespace gbe
