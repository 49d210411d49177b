#include "gbe/planner.hpp"

#include <algorithm>
#include <stdexcept>

#include "gbe/policy.hpp"
#include "gbe/shortest_path.hpp"

namespace gbe {

void observe(PlannerState& state, NodeId current, const Eigen::VectorXd& visited_feature,
             const std::vector<NeighborObs>& neighbors) {
    Eigen::Index dim = visited_feature.size();
    for (const NeighborObs& nb : neighbors)
        if (nb.feature.size() != dim)
            throw std::invalid_argument("observe: neighbor feature dimension mismatch");
    if (!state.nodes.empty()) {
        const auto& any = state.nodes.begin()->second;
        Eigen::Index have = any.visited_feature ? any.visited_feature->size()
                                                : any.observed_features.front().size();
        if (have != dim) throw std::invalid_argument("observe: feature dimension mismatch");
    }

    PlannerState::NodeRecord& rec = state.nodes[current];
    rec.visited_feature = visited_feature;  // overwrites candidate-only status
    state.visited.insert(current);
    state.frontier.erase(current);

    state.last_neighbors.clear();
    for (const NeighborObs& nb : neighbors) {
        state.nodes[nb.node].observed_features.push_back(nb.feature);
        state.edges.insert({std::min(current, nb.node), std::max(current, nb.node)});
        if (!state.visited.count(nb.node)) state.frontier.insert(nb.node);
        state.last_neighbors.push_back(nb.node);
    }
}

Eigen::VectorXd node_feature(const PlannerState& state, NodeId n) {
    auto it = state.nodes.find(n);
    if (it == state.nodes.end())
        throw std::out_of_range("node_feature: unknown node " + std::to_string(n));
    const auto& rec = it->second;
    if (rec.visited_feature) return *rec.visited_feature;
    if (rec.observed_features.empty())
        throw std::logic_error("node_feature: node has no recorded observations");
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(rec.observed_features.front().size());
    for (const auto& f : rec.observed_features) mean += f;
    return mean / static_cast<double>(rec.observed_features.size());
}

std::vector<NodeId> candidates(const PlannerState& state) {
    return {state.frontier.begin(), state.frontier.end()};  // std::set is ordered
}

PropagatedEmbeddings propagate(nn::Tape& tape, const PlannerState& state,
                               const PlannerConfig& config) {
    if (state.nodes.empty()) throw std::logic_error("propagate: empty planner state");

    PropagatedEmbeddings out;
    std::vector<NodeId> order;
    for (const auto& [id, rec] : state.nodes) {
        out.column_of[id] = static_cast<int>(order.size());
        order.push_back(id);
        out.encoded_inputs.push_back(encode_vision(tape, node_feature(state, id)));
    }
    nn::NodeRef m = tape.stack_cols(out.encoded_inputs);

    // Symmetrically normalized adjacency with self-loops, built over E.
    const int n = static_cast<int>(order.size());
    Eigen::MatrixXd adj = Eigen::MatrixXd::Identity(n, n);
    for (const auto& [a, b] : state.edges) {
        auto ia = out.column_of.find(a);
        auto ib = out.column_of.find(b);
        if (ia == out.column_of.end() || ib == out.column_of.end())
            throw std::logic_error("propagate: edge endpoint missing from V");
        adj(ia->second, ib->second) = 1.0;
        adj(ib->second, ia->second) = 1.0;
    }
    Eigen::VectorXd inv_sqrt_deg = adj.rowwise().sum().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd a_hat = inv_sqrt_deg.asDiagonal() * adj * inv_sqrt_deg.asDiagonal();
    nn::NodeRef a_hat_node = tape.constant(a_hat);

    for (int layer = 0; layer < config.gcn_layers; ++layer) {
        nn::NodeRef w = tape.param("gcn.W" + std::to_string(layer));
        m = tape.matmul(tape.matmul(w, m), a_hat_node);
        if (config.tanh_nonlinearity) m = tape.tanh(m);
    }
    out.embeddings = m;
    return out;
}

nn::NodeRef readout(nn::Tape& tape, const PropagatedEmbeddings& prop, const PlannerState& state,
                    NodeId current, const PlannerConfig& config) {
    auto column = [&](NodeId n) {
        auto it = prop.column_of.find(n);
        if (it == prop.column_of.end())
            throw std::out_of_range("readout: node missing embedding " + std::to_string(n));
        return it->second;
    };
    std::vector<int> cols = {column(current)};
    if (config.readout_graph_neighbors) {
        for (const auto& [a, b] : state.edges) {
            if (a == current) cols.push_back(column(b));
            if (b == current) cols.push_back(column(a));
        }
    } else {
        for (NodeId n : state.last_neighbors) cols.push_back(column(n));
    }
    return tape.mean_cols(prop.embeddings, cols);
}

NavAction teacher_action(const World& world, const std::vector<NodeId>& candidate_ids,
                         const std::vector<double>& distance_to_targets, NodeId current) {
    if (distance_to_targets.at(static_cast<std::size_t>(current)) == 0.0) return NavAction::stop();
    if (candidate_ids.empty())
        throw std::logic_error("teacher_action: no candidates while away from every target");
    std::vector<double> approach = dijkstra_from(world, current);
    NodeId best = -1;
    double best_cost = kInf;
    for (NodeId c : candidate_ids) {
        double cost = approach.at(static_cast<std::size_t>(c)) +
                      distance_to_targets.at(static_cast<std::size_t>(c));
        if (cost < best_cost || (cost == best_cost && c < best)) {
            best_cost = cost;
            best = c;
        }
    }
    return NavAction::goto_node(best);
}

NavAction teacher_action(const World& world, const std::vector<NodeId>& candidate_ids,
                         const std::vector<NodeId>& targets, NodeId current) {
    return teacher_action(world, candidate_ids, multi_source_distances(world, targets), current);
}

}  // namespace gbe
