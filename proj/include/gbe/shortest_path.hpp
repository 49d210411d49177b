#pragma once

#include <limits>
#include <vector>

#include "gbe/world.hpp"

namespace gbe {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Single-source Dijkstra over edge lengths. Result indexed by node id.
std::vector<double> dijkstra_from(const World& w, NodeId source);

// Distance to the nearest of several sources (virtual super-source).
std::vector<double> multi_source_distances(const World& w, const std::vector<NodeId>& sources);

// Exact shortest-path distance; symmetric, 0 iff a == b.
// Throws std::out_of_range for unknown node ids.
double shortest_distance(const World& w, NodeId a, NodeId b);

// Node sequence from a to b inclusive, deterministic under ties.
std::vector<NodeId> shortest_path_between(const World& w, NodeId a, NodeId b);

}  // namespace gbe
