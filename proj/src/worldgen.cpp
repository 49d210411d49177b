#include "gbe/worldgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "gbe/shortest_path.hpp"
#include "gbe/vocab.hpp"

namespace gbe {

double WorldConfig::resolved_extent() const {
    return extent > 0 ? extent : 4.0 * std::sqrt(static_cast<double>(node_count));
}

double WorldConfig::resolved_radius() const {
    return connect_radius > 0
               ? connect_radius
               : 1.8 * resolved_extent() / std::sqrt(static_cast<double>(std::max(node_count, 2)));
}

namespace {

// Deterministic per-token direction vector; the seed depends only on the
// token string, so features are stable across worlds and runs.
Eigen::VectorXd token_embedding(const std::string& token, int dim) {
    Rng rng(mix_seed(fnv1a64(token) ^ 0x7061746856454354ull));
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    double n = v.norm();
    if (n > 0) v /= n;
    return v;
}

bool layout_connected(int n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
    std::vector<std::vector<NodeId>> adj(n);
    for (auto [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<char> seen(n, 0);
    std::queue<NodeId> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop();
        for (NodeId v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                q.push(v);
            }
    }
    return count == n;
}

struct CameraBands {
    static constexpr double kHeadingStep = kPi / 6.0;    // 12 panoramic views
    static constexpr double kElevationStep = kPi / 12.0; // fine elevation aim
};

// The labeling pipeline: aim a discretized virtual camera at the object,
// project the four corners of its bounding box to pixels, then recover the
// polar label from the pixel-space box center.
ObjectSpec::HomeView make_home_view(const ObjectSpec& obj, const NodeSpec& node) {
    double dx = obj.x - node.x;
    double dy = obj.y - node.y;
    double horizontal = std::max(std::hypot(dx, dy), 0.7);
    double heading = std::atan2(dy, dx);
    double elevation = std::atan2(obj.z, horizontal);

    Camera cam;
    cam.heading = wrap_angle(std::round(heading / CameraBands::kHeadingStep) * CameraBands::kHeadingStep);
    cam.elevation = std::round(elevation / CameraBands::kElevationStep) * CameraBands::kElevationStep;

    double half_w = std::min(std::atan(obj.size / (2.0 * horizontal)), 0.30);
    double half_h = std::min(std::atan(0.8 * obj.size / (2.0 * horizontal)), 0.25);

    Pixel p1 = polar_to_pixel({wrap_angle(heading - half_w), elevation - half_h}, cam);
    Pixel p2 = polar_to_pixel({wrap_angle(heading + half_w), elevation - half_h}, cam);
    Pixel p3 = polar_to_pixel({wrap_angle(heading + half_w), elevation + half_h}, cam);
    Pixel p4 = polar_to_pixel({wrap_angle(heading - half_w), elevation + half_h}, cam);

    ObjectSpec::HomeView hv;
    hv.node = node.id;
    hv.extent.center = pixel_to_polar(bbox_center(p1, p2, p3, p4), cam);
    hv.extent.width = 2.0 * half_w;
    hv.extent.height = 2.0 * half_h;
    return hv;
}

}  // namespace

World generate_world(std::uint64_t seed, const WorldConfig& config) {
    if (config.node_count < 2) throw std::invalid_argument("generate_world: node_count >= 2 required");
    if (config.object_count < 1) throw std::invalid_argument("generate_world: object_count >= 1 required");
    if (config.region_count < 1) throw std::invalid_argument("generate_world: region_count >= 1 required");
    if (config.feature_dim < 1) throw std::invalid_argument("generate_world: feature_dim >= 1 required");

    const double side = config.resolved_extent();
    const double radius = config.resolved_radius();
    Rng rng(mix_seed(seed ^ 0x776f726c6467656eull));

    World w;
    w.id = seed;
    w.feature_dim = config.feature_dim;

    // Layout: resample until the radius graph connects.
    std::vector<std::pair<double, double>> pos;
    std::vector<std::pair<NodeId, NodeId>> edge_ids;
    bool ok = false;
    for (int attempt = 0; attempt < config.max_connect_retries && !ok; ++attempt) {
        pos.clear();
        edge_ids.clear();
        for (int i = 0; i < config.node_count; ++i)
            pos.emplace_back(quantize_metric(rng.uniform(0.0, side)), quantize_metric(rng.uniform(0.0, side)));
        for (int a = 0; a < config.node_count; ++a)
            for (int b = a + 1; b < config.node_count; ++b) {
                double d = std::hypot(pos[a].first - pos[b].first, pos[a].second - pos[b].second);
                if (d > 0 && d <= radius) edge_ids.emplace_back(a, b);
            }
        ok = layout_connected(config.node_count, edge_ids);
    }
    if (!ok)
        throw std::runtime_error("generate_world: random geometric graph failed to connect after " +
                                 std::to_string(config.max_connect_retries) + " retries");

    // Regions: nearest sampled center, ties to the lower region id.
    std::vector<std::pair<double, double>> centers;
    for (int r = 0; r < config.region_count; ++r)
        centers.emplace_back(rng.uniform(0.0, side), rng.uniform(0.0, side));
    const auto& region_types = Vocab::region_types();
    std::vector<int> type_order(region_types.size());
    std::iota(type_order.begin(), type_order.end(), 0);
    for (int i = static_cast<int>(type_order.size()) - 1; i > 0; --i)
        std::swap(type_order[i], type_order[rng.uniform_int(i + 1)]);
    for (int r = 0; r < config.region_count; ++r)
        w.regions.push_back({r, region_types[type_order[r % type_order.size()]]});

    for (int i = 0; i < config.node_count; ++i) {
        NodeSpec n;
        n.id = i;
        n.x = pos[i].first;
        n.y = pos[i].second;
        int best = 0;
        double best_d = kInf;
        for (int r = 0; r < config.region_count; ++r) {
            double d = std::hypot(n.x - centers[r].first, n.y - centers[r].second);
            if (d < best_d) {
                best_d = d;
                best = r;
            }
        }
        n.region = best;
        w.nodes.push_back(std::move(n));
    }

    for (auto [a, b] : edge_ids) {
        Edge e;
        e.a = a;
        e.b = b;
        e.length = quantize_metric(w.distance_between_positions(a, b));
        w.edges.push_back(e);
    }
    w.rebuild_adjacency();

    // Objects: anchors spread over distinct nodes where possible.
    std::vector<NodeId> anchor_order(w.nodes.size());
    std::iota(anchor_order.begin(), anchor_order.end(), 0);
    for (int i = static_cast<int>(anchor_order.size()) - 1; i > 0; --i)
        std::swap(anchor_order[i], anchor_order[rng.uniform_int(i + 1)]);

    const auto& classes = Vocab::object_classes();
    const auto& colors = Vocab::colors();
    const auto& sizes = Vocab::sizes();
    const auto& shapes = Vocab::shapes();

    for (int k = 0; k < config.object_count; ++k) {
        const NodeSpec& anchor = w.nodes[anchor_order[k % anchor_order.size()]];
        ObjectSpec o;
        o.id = k;
        o.class_token = classes[rng.uniform_int(static_cast<int>(classes.size()))];
        o.attribute_tokens = {colors[rng.uniform_int(static_cast<int>(colors.size()))],
                              sizes[rng.uniform_int(static_cast<int>(sizes.size()))],
                              shapes[rng.uniform_int(static_cast<int>(shapes.size()))]};
        double angle = rng.uniform(-kPi, kPi);
        double off = rng.uniform(0.8, 1.6);
        o.x = anchor.x + off * std::cos(angle);
        o.y = anchor.y + off * std::sin(angle);
        o.z = rng.uniform(-0.4, 0.9);
        o.size = rng.uniform(0.3, 1.0);
        o.region = anchor.region;
        for (const NodeSpec& n : w.nodes) {
            double d = std::hypot(o.x - n.x, o.y - n.y);
            if (d >= 0.7 && d <= config.visibility_radius) o.home_views.push_back(make_home_view(o, n));
        }
        if (o.home_views.empty()) o.home_views.push_back(make_home_view(o, anchor));
        w.objects.push_back(std::move(o));
    }

    // Relations between co-visible objects, derived from actual geometry.
    for (ObjectSpec& o : w.objects) {
        std::vector<NodeId> mine;
        for (const auto& hv : o.home_views) mine.push_back(hv.node);
        std::sort(mine.begin(), mine.end());
        for (const ObjectSpec& other : w.objects) {
            if (other.id == o.id || o.relations.size() >= 2) continue;
            bool covisible = false;
            for (const auto& hv : other.home_views)
                if (std::binary_search(mine.begin(), mine.end(), hv.node)) covisible = true;
            if (!covisible) continue;
            std::string type;
            if (other.z - o.z > 0.35)
                type = "below";  // o sits below other
            else if (o.z - other.z > 0.35)
                type = "above";
            else {
                double d = std::hypot(o.x - other.x, o.y - other.y);
                if (d < 1.2)
                    type = "near";
                else
                    type = (o.x < other.x) ? "left_of" : "right_of";
            }
            o.relations.push_back({other.id, type});
        }
    }

    // Synthetic panoramic features: region identity + visible object content
    // + per-node noise. Vision has to carry real signal for the modality
    // ablation to mean anything.
    std::vector<std::vector<const ObjectSpec*>> visible(w.nodes.size());
    for (const ObjectSpec& o : w.objects)
        for (const auto& hv : o.home_views) visible[hv.node].push_back(&o);
    for (NodeSpec& n : w.nodes) {
        Eigen::VectorXd f = 0.8 * token_embedding(w.regions[n.region].type_token, w.feature_dim);
        for (const ObjectSpec* o : visible[n.id]) {
            f += token_embedding(o->class_token, w.feature_dim);
            f += 0.4 * token_embedding(o->attribute_tokens[0], w.feature_dim);
            f += 0.25 * token_embedding(o->attribute_tokens[1], w.feature_dim);
            f += 0.25 * token_embedding(o->attribute_tokens[2], w.feature_dim);
        }
        for (int i = 0; i < w.feature_dim; ++i) f[i] += 0.35 * rng.normal();
        n.feature = f;
    }

    validate_world(w);
    return w;
}

NodeId sample_trajectory(const World& w, const std::vector<NodeId>& target_nodes, Rng& rng) {
    if (target_nodes.empty()) throw std::invalid_argument("sample_trajectory: empty target set");
    if (target_nodes.size() >= w.nodes.size())
        throw std::invalid_argument("sample_trajectory: no non-target start node exists");
    std::vector<double> dist = multi_source_distances(w, target_nodes);
    double threshold = kStartDistanceThreshold;
    int failures = 0;
    while (true) {
        NodeId candidate = rng.uniform_int(static_cast<int>(w.nodes.size()));
        if (dist[candidate] > threshold) return candidate;
        ++failures;
        if (failures % kFailuresPerDiscount == 0) threshold *= kThresholdDiscount;
    }
}

namespace {

void emit(std::vector<int>& out, const std::string& word) { out.push_back(Vocab::instance().id(word)); }

struct InstructionContent {
    std::string class_token;
    std::vector<std::string> attributes;
    std::vector<std::pair<std::string, std::string>> relations;  // (type, other class)
    std::string region_type;
    std::vector<std::string> neighbor_region_types;
};

InstructionContent collect_content(const World& w, const ObjectSpec& object) {
    InstructionContent c;
    c.class_token = object.class_token;
    c.attributes = object.attribute_tokens;
    for (const auto& r : object.relations)
        c.relations.emplace_back(r.type, w.object(r.other_object).class_token);
    c.region_type = w.regions.at(object.region).type_token;
    std::set<int> nbr_regions;
    for (const Edge& e : w.edges) {
        int ra = w.nodes[e.a].region;
        int rb = w.nodes[e.b].region;
        if (ra == object.region && rb != object.region) nbr_regions.insert(rb);
        if (rb == object.region && ra != object.region) nbr_regions.insert(ra);
    }
    std::set<std::string> seen_types;
    for (int r : nbr_regions) {
        const std::string& t = w.regions.at(r).type_token;
        if (t != c.region_type && seen_types.insert(t).second) c.neighbor_region_types.push_back(t);
        if (c.neighbor_region_types.size() >= 2) break;
    }
    return c;
}

}  // namespace

Instruction generate_instruction(const World& w, const ObjectSpec& object,
                                 const std::set<int>& granularity) {
    if (granularity.empty()) throw std::invalid_argument("generate_instruction: empty granularity set");
    for (int g : granularity)
        if (g < 1 || g > 5) throw std::invalid_argument("generate_instruction: unknown granularity level");

    InstructionContent c = collect_content(w, object);
    Instruction ins;
    std::vector<int>& t = ins.tokens;

    if (granularity.count(5)) {
        // Rewritten full form: one merged stream over all content.
        emit(t, "go");
        emit(t, "to");
        emit(t, "the");
        emit(t, c.region_type);
        for (const auto& nb : c.neighbor_region_types) {
            emit(t, "next");
            emit(t, "to");
            emit(t, "the");
            emit(t, nb);
        }
        emit(t, "and");
        emit(t, "find");
        emit(t, "the");
        for (const auto& a : c.attributes) emit(t, a);
        emit(t, c.class_token);
        for (const auto& [rel, other] : c.relations) {
            emit(t, rel);
            emit(t, "the");
            emit(t, other);
        }
        emit(t, "it");
        emit(t, "is");
        emit(t, "the");
        emit(t, "target");
        ins.granularity[4] = true;
        return ins;
    }

    if (granularity.count(1)) {
        emit(t, "find");
        emit(t, "the");
        emit(t, c.class_token);
        ins.granularity[0] = true;
    }
    if (granularity.count(2)) {
        emit(t, "it");
        emit(t, "is");
        for (const auto& a : c.attributes) emit(t, a);
        for (const auto& [rel, other] : c.relations) {
            emit(t, "it");
            emit(t, "is");
            emit(t, rel);
            emit(t, "the");
            emit(t, other);
        }
        ins.granularity[1] = true;
    }
    if (granularity.count(3)) {
        emit(t, "it");
        emit(t, "is");
        emit(t, "in");
        emit(t, "the");
        emit(t, c.region_type);
        ins.granularity[2] = true;
    }
    if (granularity.count(4)) {
        if (!c.neighbor_region_types.empty()) {
            for (const auto& nb : c.neighbor_region_types) {
                emit(t, "the");
                emit(t, c.region_type);
                emit(t, "is");
                emit(t, "next");
                emit(t, "to");
                emit(t, "the");
                emit(t, nb);
            }
            ins.granularity[3] = true;
        }
    }
    if (t.empty()) throw std::invalid_argument("generate_instruction: no content for requested granularity");
    return ins;
}

EpisodeSpec make_episode(const World& w, int object_id, NodeId start,
                         const std::set<int>& granularity) {
    const ObjectSpec& obj = w.object(object_id);
    EpisodeSpec e;
    e.world_id = w.id;
    e.start = start;
    e.object_id = object_id;
    e.target_nodes = w.home_nodes(object_id);
    for (const auto& hv : obj.home_views) e.polar_labels[hv.node] = hv.extent.center;
    e.instruction = generate_instruction(w, obj, granularity);
    std::vector<double> dist = multi_source_distances(w, e.target_nodes);
    e.shortest_path_length = dist[start];
    if (!(e.shortest_path_length > 0) || e.shortest_path_length == kInf)
        throw std::runtime_error("make_episode: start node must be distinct from and connected to targets");
    return e;
}

}  // namespace gbe
