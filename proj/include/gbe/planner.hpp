#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "gbe/env.hpp"
#include "gbe/nn/tape.hpp"
#include "gbe/world.hpp"

namespace gbe {

struct PlannerConfig {
    int embed_dim = 64;    // D_m
    int gcn_layers = 2;
    bool tanh_nonlinearity = true;   // false -> identity (linear GCN)
    bool readout_graph_neighbors = true;  // false -> only the latest U_t neighbors
};

// Dynamic semantic graph built during one episode: per-node observations
// (V), the explored edge set (E), visited/frontier bookkeeping. Node
// embeddings (M) are materialized on a tape by propagate() each decision,
// re-initialized from the node features so re-observations refresh them.
struct PlannerState {
    struct NodeRecord {
        std::optional<Eigen::VectorXd> visited_feature;   // f^v once the node is visited
        std::vector<Eigen::VectorXd> observed_features;   // f^u per observation
    };

    std::map<NodeId, NodeRecord> nodes;                // V
    std::set<std::pair<NodeId, NodeId>> edges;         // E, pairs normalized a < b
    std::set<NodeId> visited;
    std::set<NodeId> frontier;                         // observed but not visited
    std::vector<NodeId> last_neighbors;                // node ids of the latest U_t

    bool contains(NodeId n) const { return nodes.count(n) > 0; }
};

// Records the current node (visited, feature f^v), its neighbor
// observations, and the new edges. Unvisited neighbors join the frontier.
// Throws std::invalid_argument on feature dimension mismatches.
void observe(PlannerState& state, NodeId current, const Eigen::VectorXd& visited_feature,
             const std::vector<NeighborObs>& neighbors);

// Rule 1: visited nodes expose f^v. Rules 2-3: observed-only nodes expose
// the mean of their recorded observations.
Eigen::VectorXd node_feature(const PlannerState& state, NodeId n);

// Sorted frontier = the candidate set C.
std::vector<NodeId> candidates(const PlannerState& state);

// M after the GCN rounds, as a D_m x |V| matrix node plus the column index
// of every graph node. Columns are initialized by the vision encoding of
// node_feature and propagated through
//   M' = nonlinearity(W_g * M * A_hat),
// with A_hat the symmetrically normalized adjacency of E with self-loops.
// encoded_inputs keeps the pre-GCN encodings; candidate features come from
// there.
struct PropagatedEmbeddings {
    nn::NodeRef embeddings;
    std::map<NodeId, int> column_of;
    std::vector<nn::NodeRef> encoded_inputs;
};

PropagatedEmbeddings propagate(nn::Tape& tape, const PlannerState& state,
                               const PlannerConfig& config);

// f^g_t: mean embedding of the current node and its neighbors (graph
// neighbors in E by default, the latest U_t when configured so).
nn::NodeRef readout(nn::Tape& tape, const PropagatedEmbeddings& prop, const PlannerState& state,
                    NodeId current, const PlannerConfig& config);

// Teacher: stop when already at a target, otherwise move to the candidate
// minimizing approach cost plus remaining distance,
//   argmin_c [ D(current, c) + min_j D(c, T_j) ],
// ties broken by the smallest node id. Under the multi-hop GotoNode
// semantics this follows an exact shortest path to the nearest target.
// Throws std::logic_error when no candidate exists away from a target.
NavAction teacher_action(const World& world, const std::vector<NodeId>& candidate_ids,
                         const std::vector<double>& distance_to_targets, NodeId current);

// Convenience overload computing the target-distance field itself.
NavAction teacher_action(const World& world, const std::vector<NodeId>& candidate_ids,
                         const std::vector<NodeId>& targets, NodeId current);

}  // namespace gbe
