#include "gbe/shortest_path.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace gbe {

namespace {

void check_node(const World& w, NodeId n, const char* what) {
    if (n < 0 || n >= static_cast<NodeId>(w.nodes.size()))
        throw std::out_of_range(std::string(what) + ": unknown node id " + std::to_string(n));
}

// Dijkstra from a set of sources. Ties in the queue pop in (distance, id)
// order; predecessors are only replaced on strict improvement, which keeps
// paths deterministic.
void run_dijkstra(const World& w, const std::vector<NodeId>& sources,
                  std::vector<double>& dist, std::vector<NodeId>* pred) {
    dist.assign(w.nodes.size(), kInf);
    if (pred) pred->assign(w.nodes.size(), -1);
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (NodeId s : sources) {
        dist[s] = 0.0;
        pq.push({0.0, s});
    }
    while (!pq.empty()) {
        auto [d, n] = pq.top();
        pq.pop();
        if (d > dist[n]) continue;
        for (auto [m, len] : w.adjacency[n]) {
            double nd = d + len;
            if (nd < dist[m]) {
                dist[m] = nd;
                if (pred) (*pred)[m] = n;
                pq.push({nd, m});
            }
        }
    }
}

}  // namespace

std::vector<double> dijkstra_from(const World& w, NodeId source) {
    check_node(w, source, "dijkstra_from");
    std::vector<double> dist;
    run_dijkstra(w, {source}, dist, nullptr);
    return dist;
}

std::vector<double> multi_source_distances(const World& w, const std::vector<NodeId>& sources) {
    if (sources.empty()) throw std::invalid_argument("multi_source_distances: empty source set");
    for (NodeId s : sources) check_node(w, s, "multi_source_distances");
    std::vector<double> dist;
    run_dijkstra(w, sources, dist, nullptr);
    return dist;
}

double shortest_distance(const World& w, NodeId a, NodeId b) {
    check_node(w, a, "shortest_distance");
    check_node(w, b, "shortest_distance");
    if (a == b) return 0.0;
    std::vector<double> dist;
    run_dijkstra(w, {a}, dist, nullptr);
    return dist[b];
}

std::vector<NodeId> shortest_path_between(const World& w, NodeId a, NodeId b) {
    check_node(w, a, "shortest_path_between");
    check_node(w, b, "shortest_path_between");
    std::vector<double> dist;
    std::vector<NodeId> pred;
    run_dijkstra(w, {a}, dist, &pred);
    if (dist[b] == kInf) throw std::runtime_error("shortest_path_between: unreachable node");
    std::vector<NodeId> path;
    for (NodeId n = b; n != -1; n = pred[n]) {
        path.push_back(n);
        if (n == a) break;
    }
    std::reverse(path.begin(), path.end());
    if (path.front() != a) throw std::runtime_error("shortest_path_between: path recovery failed");
    return path;
}

}  // namespace gbe
