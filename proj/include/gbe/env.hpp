#pragma once

#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "gbe/world.hpp"

namespace gbe {

struct NeighborObs {
    NodeId node = 0;
    Eigen::VectorXd feature;
};

struct StepObservation {
    NodeId node = 0;                     // current node d_0
    Eigen::VectorXd feature;             // panoramic feature v_t
    std::vector<NeighborObs> neighbors;  // U_t, one entry per graph neighbor
    double gps_x = 0.0;
    double gps_y = 0.0;
    bool done = false;
};

struct NavAction {
    enum class Kind { Stop, Goto };
    Kind kind = Kind::Stop;
    NodeId target = -1;

    static NavAction stop() { return NavAction{Kind::Stop, -1}; }
    static NavAction goto_node(NodeId n) { return NavAction{Kind::Goto, n}; }
};

struct EpisodeResult {
    std::vector<NodeId> visited;  // consecutive entries graph-adjacent
    double path_length = 0.0;     // sum of traversed edge lengths, meters
    NodeId stop_node = 0;
    std::optional<PolarPoint> final_localization;
    int decisions = 0;
    bool stopped = false;  // false when the decision cap forced termination
};

// One episode rollout runtime. GotoNode may name any already-observed node;
// the move executes as the shortest graph path from the current node,
// accumulating true edge lengths (this is what merges multiple low-level
// actions into one decision).
class Env {
public:
    static constexpr int kDefaultDecisionCap = 20;

    Env(const World& world, const EpisodeSpec& episode, int decision_cap = kDefaultDecisionCap);

    StepObservation reset();

    // Pre: reset() called, episode not done. Throws on unknown or
    // never-observed targets and on acting after termination.
    std::variant<StepObservation, EpisodeResult> step(const NavAction& action);

    NodeId current() const { return current_; }
    double path_length() const { return path_length_; }
    bool done() const { return done_; }
    int decisions() const { return decisions_; }
    const std::vector<NodeId>& visited_sequence() const { return visited_sequence_; }
    const std::set<NodeId>& observed() const { return observed_; }
    const EpisodeSpec& episode() const { return episode_; }
    const World& world() const { return world_; }

private:
    StepObservation observe() const;
    EpisodeResult finish(bool stopped);

    const World& world_;
    const EpisodeSpec& episode_;
    int decision_cap_;
    NodeId current_ = 0;
    double path_length_ = 0.0;
    int decisions_ = 0;
    bool done_ = false;
    bool started_ = false;
    std::vector<NodeId> visited_sequence_;
    std::set<NodeId> observed_;
};

}  // namespace gbe
