#pragma once

#include <vector>

#include "gbe/env.hpp"
#include "gbe/world.hpp"

namespace gbe {

inline constexpr double kSuccessThreshold = 3.0;  // meters, success is NE < 3

struct EpisodeEval {
    double navigation_error = 0.0;  // meters
    int success = 0;                // NE < threshold at the final node
    int oracle_success = 0;         // closest point along the trajectory
    int localization_success = 0;   // hit test at the stop node, given success
    double l_nav = 0.0;
    double l_gt = 0.0;
};

// Dijkstra distance from the final node to the nearest target.
double navigation_error(const World& w, const EpisodeResult& result,
                        const std::vector<NodeId>& targets);

int success(const World& w, const EpisodeResult& result, const std::vector<NodeId>& targets,
            double threshold = kSuccessThreshold);

// Success at the closest visited node, intermediate multi-hop nodes included.
int oracle_success(const World& w, const EpisodeResult& result, const std::vector<NodeId>& targets,
                   double threshold = kSuccessThreshold);

EpisodeEval evaluate_episode(const World& w, const EpisodeSpec& episode,
                             const EpisodeResult& result, double threshold = kSuccessThreshold);

double success_rate(const std::vector<EpisodeEval>& batch);
double oracle_success_rate(const std::vector<EpisodeEval>& batch);
double mean_navigation_error(const std::vector<EpisodeEval>& batch);

// (1/N) sum S_nav * l_gt / max(l_nav, l_gt).
double spl(const std::vector<EpisodeEval>& batch);

// Success rate of finding weighted by path length, exactly as printed:
// (1/N) sum S_nav * S_loc * l_nav / max(l_nav, l_gt).
double sfpl(const std::vector<EpisodeEval>& batch);

// SPL-convention variant with l_gt in the numerator.
double sfpl_splstyle(const std::vector<EpisodeEval>& batch);

}  // namespace gbe
