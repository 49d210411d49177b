#include "gbe/env.hpp"

#include <stdexcept>

#include "gbe/shortest_path.hpp"

namespace gbe {

Env::Env(const World& world, const EpisodeSpec& episode, int decision_cap)
    : world_(world), episode_(episode), decision_cap_(decision_cap) {
    if (world.id != episode.world_id)
        throw std::invalid_argument("Env: episode references a different world id");
    if (episode.start < 0 || episode.start >= static_cast<NodeId>(world.nodes.size()))
        throw std::invalid_argument("Env: episode start node does not exist");
    if (decision_cap_ < 1) throw std::invalid_argument("Env: decision cap must be >= 1");
}

StepObservation Env::reset() {
    current_ = episode_.start;
    path_length_ = 0.0;
    decisions_ = 0;
    done_ = false;
    started_ = true;
    visited_sequence_ = {current_};
    observed_ = {current_};
    for (auto [m, len] : world_.adjacency[current_]) observed_.insert(m);
    return observe();
}

StepObservation Env::observe() const {
    const NodeSpec& n = world_.nodes[current_];
    StepObservation obs;
    obs.node = current_;
    obs.feature = n.feature;
    for (auto [m, len] : world_.adjacency[current_])
        obs.neighbors.push_back(NeighborObs{m, world_.nodes[m].feature});
    obs.gps_x = n.x;
    obs.gps_y = n.y;
    obs.done = done_;
    return obs;
}

EpisodeResult Env::finish(bool stopped) {
    done_ = true;
    EpisodeResult r;
    r.visited = visited_sequence_;
    r.path_length = path_length_;
    r.stop_node = current_;
    r.decisions = decisions_;
    r.stopped = stopped;
    return r;
}

std::variant<StepObservation, EpisodeResult> Env::step(const NavAction& action) {
    if (!started_) throw std::logic_error("Env::step before reset");
    if (done_) throw std::logic_error("Env::step after episode finished");
    ++decisions_;

    if (action.kind == NavAction::Kind::Stop) return finish(true);

    NodeId target = action.target;
    if (target < 0 || target >= static_cast<NodeId>(world_.nodes.size()))
        throw std::invalid_argument("Env::step: unknown node id " + std::to_string(target));
    if (!observed_.count(target))
        throw std::invalid_argument("Env::step: node " + std::to_string(target) +
                                    " has not been observed yet");
    if (target == current_) throw std::invalid_argument("Env::step: already at node");

    std::vector<NodeId> path = shortest_path_between(world_, current_, target);
    for (std::size_t i = 1; i < path.size(); ++i) {
        NodeId from = path[i - 1];
        NodeId to = path[i];
        for (auto [m, len] : world_.adjacency[from])
            if (m == to) {
                path_length_ += len;
                break;
            }
        visited_sequence_.push_back(to);
    }
    current_ = target;
    observed_.insert(current_);
    for (auto [m, len] : world_.adjacency[current_]) observed_.insert(m);

    if (decisions_ >= decision_cap_) return finish(false);
    return observe();
}

}  // namespace gbe
