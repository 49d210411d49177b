#include "gbe/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gbe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t train_world_seed(const DatasetConfig& c, int i) { return c.seed * 1000 + 1 + i; }
std::uint64_t unseen_world_seed(const DatasetConfig& c, int i) { return c.seed * 1000 + 501 + i; }

std::vector<EpisodeSpec> episodes_for(const World& w, int object_id, int count,
                                      const std::set<int>& granularity, std::uint64_t salt,
                                      const std::set<NodeId>* avoid_starts) {
    std::vector<EpisodeSpec> out;
    std::vector<NodeId> targets = w.home_nodes(object_id);
    if (targets.size() >= w.nodes.size()) return out;  // nowhere to start from
    Rng rng(mix_seed(w.id ^ mix_seed(static_cast<std::uint64_t>(object_id) * 2654435761ull + salt)));
    std::set<NodeId> used;
    for (int k = 0; k < count; ++k) {
        NodeId start = -1;
        for (int attempt = 0; attempt < 20; ++attempt) {
            start = sample_trajectory(w, targets, rng);
            bool clash = used.count(start) || (avoid_starts && avoid_starts->count(start));
            if (!clash) break;
        }
        used.insert(start);
        out.push_back(make_episode(w, object_id, start, granularity));
    }
    return out;
}

}  // namespace

Dataset generate_dataset(const DatasetConfig& config) {
    if (config.train_worlds < 1) throw std::invalid_argument("generate_dataset: need >= 1 train world");
    if (config.unseen_worlds < 1)
        throw std::invalid_argument("generate_dataset: need >= 1 unseen world");

    Dataset ds;
    std::vector<std::uint64_t> train_ids, unseen_ids;
    for (int i = 0; i < config.train_worlds; ++i) {
        std::uint64_t seed = train_world_seed(config, i);
        ds.worlds.emplace(seed, generate_world(seed, config.world));
        train_ids.push_back(seed);
    }
    for (int i = 0; i < config.unseen_worlds; ++i) {
        std::uint64_t seed = unseen_world_seed(config, i);
        ds.worlds.emplace(seed, generate_world(seed, config.world));
        unseen_ids.push_back(seed);
    }

    auto& train = ds.splits[kSplitTrain];
    auto& seen_instruction = ds.splits[kSplitSeenInstruction];
    auto& seen_house = ds.splits[kSplitSeenHouse];
    auto& unseen_house = ds.splits[kSplitUnseenHouse];

    for (std::uint64_t id : train_ids) {
        const World& w = ds.worlds.at(id);
        int total = static_cast<int>(w.objects.size());
        int held = std::min(config.held_out_objects, total - 1);
        int train_objects = total - held;
        for (int o = 0; o < train_objects; ++o) {
            auto eps = episodes_for(w, o, config.episodes_per_object, config.granularity, 0xa11ce,
                                    nullptr);
            std::set<NodeId> train_starts;
            for (const auto& e : eps) train_starts.insert(e.start);
            for (auto& e : eps) train.push_back(std::move(e));
            auto val = episodes_for(w, o, config.val_starts, config.granularity, 0xb0b,
                                    &train_starts);
            for (auto& e : val) seen_instruction.push_back(std::move(e));
        }
        for (int o = train_objects; o < total; ++o) {
            auto val = episodes_for(w, o, config.val_starts, config.granularity, 0xcafe, nullptr);
            for (auto& e : val) seen_house.push_back(std::move(e));
        }
    }
    for (std::uint64_t id : unseen_ids) {
        const World& w = ds.worlds.at(id);
        for (int o = 0; o < static_cast<int>(w.objects.size()); ++o) {
            auto val = episodes_for(w, o, config.val_starts, config.granularity, 0xd00d, nullptr);
            for (auto& e : val) unseen_house.push_back(std::move(e));
        }
    }
    return ds;
}

void save_dataset(const Dataset& dataset, const DatasetConfig& config, const std::string& dir) {
    fs::create_directories(fs::path(dir) / "worlds");
    fs::create_directories(fs::path(dir) / "splits");

    json manifest;
    manifest["format_version"] = 1;
    manifest["config"] = {
        {"seed", config.seed},
        {"train_worlds", config.train_worlds},
        {"unseen_worlds", config.unseen_worlds},
        {"episodes_per_object", config.episodes_per_object},
        {"val_starts", config.val_starts},
        {"held_out_objects", config.held_out_objects},
        {"granularity", std::vector<int>(config.granularity.begin(), config.granularity.end())},
        {"node_count", config.world.node_count},
        {"region_count", config.world.region_count},
        {"object_count", config.world.object_count},
        {"feature_dim", config.world.feature_dim},
        {"extent", config.world.resolved_extent()},
        {"connect_radius", config.world.resolved_radius()},
        {"visibility_radius", config.world.visibility_radius},
    };

    std::vector<std::uint64_t> train_ids, unseen_ids;
    for (int i = 0; i < config.train_worlds; ++i) train_ids.push_back(train_world_seed(config, i));
    for (int i = 0; i < config.unseen_worlds; ++i) unseen_ids.push_back(unseen_world_seed(config, i));
    manifest["train_world_ids"] = train_ids;
    manifest["unseen_world_ids"] = unseen_ids;

    json worlds_json = json::array();
    for (const auto& [id, w] : dataset.worlds) {
        std::string file = "worlds/w" + std::to_string(id) + ".json";
        save_text_file((fs::path(dir) / file).string(), world_to_json(w));
        worlds_json.push_back(json{{"id", id}, {"file", file}});
    }
    manifest["worlds"] = worlds_json;

    json splits_json;
    for (const auto& [name, episodes] : dataset.splits) {
        std::string file = "splits/" + name + ".jsonl";
        std::ostringstream lines;
        for (const EpisodeSpec& e : episodes) lines << episode_to_json(e);
        save_text_file((fs::path(dir) / file).string(), lines.str());
        splits_json[name] = json{{"file", file}, {"episodes", episodes.size()}};
    }
    manifest["splits"] = splits_json;
    save_text_file((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

Dataset load_dataset(const std::string& dir) {
    json manifest = json::parse(load_text_file((fs::path(dir) / "manifest.json").string()));
    Dataset ds;
    for (const json& w : manifest.at("worlds")) {
        World world = world_from_json(load_text_file((fs::path(dir) / w.at("file").get<std::string>()).string()));
        validate_world(world);
        ds.worlds.emplace(world.id, std::move(world));
    }
    for (auto& [name, meta] : manifest.at("splits").items()) {
        std::istringstream lines(load_text_file((fs::path(dir) / meta.at("file").get<std::string>()).string()));
        std::string line;
        auto& eps = ds.splits[name];
        while (std::getline(lines, line))
            if (!line.empty()) eps.push_back(episode_from_json(line));
    }
    return ds;
}

void override_granularity(Dataset& dataset, const std::set<int>& granularity) {
    for (auto& [name, episodes] : dataset.splits)
        for (EpisodeSpec& e : episodes) {
            const World& w = dataset.worlds.at(e.world_id);
            e.instruction = generate_instruction(w, w.object(e.object_id), granularity);
        }
}

}  // namespace gbe
