#include "gbe/metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include "gbe/geometry.hpp"
#include "gbe/shortest_path.hpp"

namespace gbe {

double navigation_error(const World& w, const EpisodeResult& result,
                        const std::vector<NodeId>& targets) {
    std::vector<double> dist = multi_source_distances(w, targets);
    return dist.at(static_cast<std::size_t>(result.stop_node));
}

int success(const World& w, const EpisodeResult& result, const std::vector<NodeId>& targets,
            double threshold) {
    return navigation_error(w, result, targets) < threshold ? 1 : 0;
}

int oracle_success(const World& w, const EpisodeResult& result, const std::vector<NodeId>& targets,
                   double threshold) {
    std::vector<double> dist = multi_source_distances(w, targets);
    for (NodeId n : result.visited)
        if (dist.at(static_cast<std::size_t>(n)) < threshold) return 1;
    return 0;
}

EpisodeEval evaluate_episode(const World& w, const EpisodeSpec& episode,
                             const EpisodeResult& result, double threshold) {
    if (episode.world_id != w.id)
        throw std::invalid_argument("evaluate_episode: world/episode id mismatch");
    EpisodeEval ev;
    std::vector<double> dist = multi_source_distances(w, episode.target_nodes);
    ev.navigation_error = dist.at(static_cast<std::size_t>(result.stop_node));
    ev.success = ev.navigation_error < threshold ? 1 : 0;
    for (NodeId n : result.visited)
        if (dist.at(static_cast<std::size_t>(n)) < threshold) ev.oracle_success = 1;
    ev.l_nav = result.path_length;
    ev.l_gt = episode.shortest_path_length;

    // Localization counts only on navigation success, and only where the
    // object is actually visible (the stop node carries an extent).
    if (ev.success && result.final_localization) {
        const ObjectSpec& obj = w.object(episode.object_id);
        for (const auto& hv : obj.home_views) {
            if (hv.node == result.stop_node &&
                localization_hit(*result.final_localization, hv.extent)) {
                ev.localization_success = 1;
                break;
            }
        }
    }
    return ev;
}

namespace {

double mean_over(const std::vector<EpisodeEval>& batch, double (*term)(const EpisodeEval&)) {
    if (batch.empty()) throw std::invalid_argument("metrics: empty batch");
    double sum = 0.0;
    for (const EpisodeEval& e : batch) sum += term(e);
    return sum / static_cast<double>(batch.size());
}

}  // namespace

double success_rate(const std::vector<EpisodeEval>& batch) {
    return mean_over(batch, [](const EpisodeEval& e) { return static_cast<double>(e.success); });
}

double oracle_success_rate(const std::vector<EpisodeEval>& batch) {
    return mean_over(batch,
                     [](const EpisodeEval& e) { return static_cast<double>(e.oracle_success); });
}

double mean_navigation_error(const std::vector<EpisodeEval>& batch) {
    return mean_over(batch, [](const EpisodeEval& e) { return e.navigation_error; });
}

double spl(const std::vector<EpisodeEval>& batch) {
    return mean_over(batch, [](const EpisodeEval& e) {
        return e.success ? e.l_gt / std::max(e.l_nav, e.l_gt) : 0.0;
    });
}

double sfpl(const std::vector<EpisodeEval>& batch) {
    return mean_over(batch, [](const EpisodeEval& e) {
        return e.success && e.localization_success ? e.l_nav / std::max(e.l_nav, e.l_gt) : 0.0;
    });
}

double sfpl_splstyle(const std::vector<EpisodeEval>& batch) {
    return mean_over(batch, [](const EpisodeEval& e) {
        return e.success && e.localization_success ? e.l_gt / std::max(e.l_nav, e.l_gt) : 0.0;
    });
}

}  // namespace gbe
