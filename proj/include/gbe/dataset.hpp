#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "gbe/world.hpp"
#include "gbe/worldgen.hpp"

namespace gbe {

// Four-way split: train; same instructions with new starts; same houses
// with held-out objects (new instructions); fresh houses.
inline const char* kSplitTrain = "train";
inline const char* kSplitSeenInstruction = "val_seen_instruction";
inline const char* kSplitSeenHouse = "val_seen_house";
inline const char* kSplitUnseenHouse = "val_unseen_house";

struct DatasetConfig {
    std::uint64_t seed = 1;
    int train_worlds = 3;
    int unseen_worlds = 2;
    WorldConfig world;
    int episodes_per_object = 20;  // train episodes per (world, object)
    int val_starts = 3;            // episodes per (world, object) in val splits
    int held_out_objects = 1;      // per train world, reserved for val_seen_house
    std::set<int> granularity = {5};
};

struct Dataset {
    std::map<std::uint64_t, World> worlds;
    std::map<std::string, std::vector<EpisodeSpec>> splits;
};

Dataset generate_dataset(const DatasetConfig& config);

// Layout: manifest.json, worlds/w<id>.json, splits/<name>.jsonl.
// Output is byte-identical for identical configs.
void save_dataset(const Dataset& dataset, const DatasetConfig& config, const std::string& dir);
Dataset load_dataset(const std::string& dir);

// Regenerates every instruction at the requested granularity (the Tab. 6
// harness); episodes are otherwise untouched.
void override_granularity(Dataset& dataset, const std::set<int>& granularity);

}  // namespace gbe
