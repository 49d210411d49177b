#include "gbe/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gbe {

using nlohmann::json;

void World::rebuild_adjacency() {
    adjacency.assign(nodes.size(), {});
    for (const Edge& e : edges) {
        adjacency.at(e.a).emplace_back(e.b, e.length);
        adjacency.at(e.b).emplace_back(e.a, e.length);
    }
    for (auto& nbrs : adjacency) std::sort(nbrs.begin(), nbrs.end());
}

const ObjectSpec& World::object(int id) const {
    if (id < 0 || id >= static_cast<int>(objects.size()))
        throw std::out_of_range("World::object: unknown object id " + std::to_string(id));
    return objects[id];
}

std::vector<NodeId> World::home_nodes(int object_id) const {
    std::vector<NodeId> out;
    for (const auto& hv : object(object_id).home_views) out.push_back(hv.node);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double World::distance_between_positions(NodeId a, NodeId b) const {
    const NodeSpec& na = nodes.at(a);
    const NodeSpec& nb = nodes.at(b);
    return std::hypot(na.x - nb.x, na.y - nb.y);
}

namespace {

bool connected(const World& w) {
    if (w.nodes.empty()) return false;
    std::vector<char> seen(w.nodes.size(), 0);
    std::queue<NodeId> q;
    q.push(0);
    seen[0] = 1;
    std::size_t count = 1;
    while (!q.empty()) {
        NodeId n = q.front();
        q.pop();
        for (auto [m, len] : w.adjacency[n]) {
            if (!seen[m]) {
                seen[m] = 1;
                ++count;
                q.push(m);
            }
        }
    }
    return count == w.nodes.size();
}

}  // namespace

void validate_world(const World& w) {
    if (w.nodes.empty()) throw std::runtime_error("world: no nodes");
    for (std::size_t i = 0; i < w.nodes.size(); ++i) {
        const NodeSpec& n = w.nodes[i];
        if (n.id != static_cast<NodeId>(i))
            throw std::runtime_error("world: node ids not dense from 0");
        if (n.feature.size() != w.feature_dim)
            throw std::runtime_error("world: node feature dim mismatch");
        if (n.region < 0 || n.region >= static_cast<int>(w.regions.size()))
            throw std::runtime_error("world: node region out of range");
    }
    std::set<std::pair<NodeId, NodeId>> seen_edges;
    for (const Edge& e : w.edges) {
        if (e.a >= e.b) throw std::runtime_error("world: edge not normalized (a < b)");
        if (e.b >= static_cast<NodeId>(w.nodes.size()))
            throw std::runtime_error("world: edge endpoint out of range");
        if (!seen_edges.insert({e.a, e.b}).second)
            throw std::runtime_error("world: duplicate edge");
        double d = quantize_metric(w.distance_between_positions(e.a, e.b));
        if (std::abs(e.length - d) > kMetricGrid)
            throw std::runtime_error("world: edge length != Euclidean distance of endpoints");
        if (e.length <= 0) throw std::runtime_error("world: non-positive edge length");
    }
    if (w.adjacency.size() != w.nodes.size())
        throw std::runtime_error("world: adjacency not built");
    if (!connected(w)) throw std::runtime_error("world: graph not connected");
    for (const ObjectSpec& o : w.objects) {
        if (o.home_views.empty())
            throw std::runtime_error("world: object with empty home node set");
        for (const auto& hv : o.home_views) {
            if (hv.node < 0 || hv.node >= static_cast<NodeId>(w.nodes.size()))
                throw std::runtime_error("world: home node out of range");
            if (hv.extent.width <= 0 || hv.extent.height <= 0)
                throw std::runtime_error("world: non-positive polar extent");
            if (hv.extent.center.heading < -kPi || hv.extent.center.heading >= kPi)
                throw std::runtime_error("world: extent heading outside [-pi, pi)");
            if (std::abs(hv.extent.center.elevation) > kPi / 2.0)
                throw std::runtime_error("world: extent elevation outside [-pi/2, pi/2]");
        }
    }
}

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd vector_from_json(const json& a) {
    Eigen::VectorXd v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    return v;
}

json polar_to_json(const PolarPoint& p) { return json{{"heading", p.heading}, {"elevation", p.elevation}}; }

PolarPoint polar_from_json(const json& j) {
    return PolarPoint{j.at("heading").get<double>(), j.at("elevation").get<double>()};
}

}  // namespace

std::string world_to_json(const World& w) {
    json j;
    j["world_id"] = w.id;
    j["feature_dim"] = w.feature_dim;
    json nodes = json::array();
    for (const NodeSpec& n : w.nodes) {
        nodes.push_back(json{{"id", n.id},
                             {"x", n.x},
                             {"y", n.y},
                             {"region", n.region},
                             {"feature", vector_to_json(n.feature)}});
    }
    j["nodes"] = nodes;
    json edges = json::array();
    for (const Edge& e : w.edges) edges.push_back(json{{"a", e.a}, {"b", e.b}, {"length", e.length}});
    j["edges"] = edges;
    json regions = json::array();
    for (const RegionSpec& r : w.regions) regions.push_back(json{{"id", r.id}, {"type", r.type_token}});
    j["regions"] = regions;
    json objects = json::array();
    for (const ObjectSpec& o : w.objects) {
        json rel = json::array();
        for (const auto& r : o.relations) rel.push_back(json{{"other", r.other_object}, {"type", r.type}});
        json homes = json::array();
        for (const auto& hv : o.home_views) {
            homes.push_back(json{{"node", hv.node},
                                 {"center", polar_to_json(hv.extent.center)},
                                 {"width", hv.extent.width},
                                 {"height", hv.extent.height}});
        }
        objects.push_back(json{{"id", o.id},
                               {"class", o.class_token},
                               {"attributes", o.attribute_tokens},
                               {"relations", rel},
                               {"home_views", homes},
                               {"region", o.region},
                               {"x", o.x},
                               {"y", o.y},
                               {"z", o.z},
                               {"size", o.size}});
    }
    j["objects"] = objects;
    return j.dump(2) + "\n";
}

World world_from_json(const std::string& text) {
    json j = json::parse(text);
    World w;
    w.id = j.at("world_id").get<std::uint64_t>();
    w.feature_dim = j.at("feature_dim").get<int>();
    for (const json& n : j.at("nodes")) {
        NodeSpec node;
        node.id = n.at("id").get<NodeId>();
        node.x = n.at("x").get<double>();
        node.y = n.at("y").get<double>();
        node.region = n.at("region").get<int>();
        node.feature = vector_from_json(n.at("feature"));
        w.nodes.push_back(std::move(node));
    }
    for (const json& e : j.at("edges"))
        w.edges.push_back(Edge{e.at("a").get<NodeId>(), e.at("b").get<NodeId>(), e.at("length").get<double>()});
    for (const json& r : j.at("regions"))
        w.regions.push_back(RegionSpec{r.at("id").get<int>(), r.at("type").get<std::string>()});
    for (const json& o : j.at("objects")) {
        ObjectSpec obj;
        obj.id = o.at("id").get<int>();
        obj.class_token = o.at("class").get<std::string>();
        obj.attribute_tokens = o.at("attributes").get<std::vector<std::string>>();
        for (const json& r : o.at("relations"))
            obj.relations.push_back({r.at("other").get<int>(), r.at("type").get<std::string>()});
        for (const json& hv : o.at("home_views")) {
            ObjectSpec::HomeView h;
            h.node = hv.at("node").get<NodeId>();
            h.extent.center = polar_from_json(hv.at("center"));
            h.extent.width = hv.at("width").get<double>();
            h.extent.height = hv.at("height").get<double>();
            obj.home_views.push_back(h);
        }
        obj.region = o.at("region").get<int>();
        obj.x = o.at("x").get<double>();
        obj.y = o.at("y").get<double>();
        obj.z = o.at("z").get<double>();
        obj.size = o.at("size").get<double>();
        w.objects.push_back(std::move(obj));
    }
    w.rebuild_adjacency();
    return w;
}

std::string episode_to_json(const EpisodeSpec& e) {
    json j;
    j["world_id"] = e.world_id;
    j["start"] = e.start;
    j["object_id"] = e.object_id;
    j["target_nodes"] = e.target_nodes;
    j["tokens"] = e.instruction.tokens;
    j["granularity"] = e.instruction.granularity;
    json labels = json::array();
    for (const auto& [node, p] : e.polar_labels)
        labels.push_back(json{{"node", node}, {"label", polar_to_json(p)}});
    j["polar_labels"] = labels;
    j["shortest_path_length"] = e.shortest_path_length;
    return j.dump() + "\n";
}

EpisodeSpec episode_from_json(const std::string& text) {
    json j = json::parse(text);
    EpisodeSpec e;
    e.world_id = j.at("world_id").get<std::uint64_t>();
    e.start = j.at("start").get<NodeId>();
    e.object_id = j.at("object_id").get<int>();
    e.target_nodes = j.at("target_nodes").get<std::vector<NodeId>>();
    e.instruction.tokens = j.at("tokens").get<std::vector<int>>();
    auto g = j.at("granularity").get<std::vector<bool>>();
    for (std::size_t i = 0; i < 5 && i < g.size(); ++i) e.instruction.granularity[i] = g[i];
    for (const json& l : j.at("polar_labels"))
        e.polar_labels[l.at("node").get<NodeId>()] = polar_from_json(l.at("label"));
    e.shortest_path_length = j.at("shortest_path_length").get<double>();
    return e;
}

void save_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string load_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for read: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace gbe
