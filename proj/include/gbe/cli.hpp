#pragma once

#include <optional>
#include <set>
#include <string>

#include "gbe/dataset.hpp"
#include "gbe/learning.hpp"
#include "gbe/metrics.hpp"

namespace gbe {

struct GenWorldArgs {
    std::uint64_t seed = 0;
    WorldConfig world;
    std::string out;  // world JSON path
};

struct GenDatasetArgs {
    DatasetConfig config;
    std::string out;  // dataset directory
};

struct TrainArgs {
    std::string data_dir;
    std::string out_dir;
    TrainConfig config;
    bool no_ge = false;                      // lambda3 = 0
    std::optional<std::set<int>> granularity;  // regenerate instructions when set
    std::string eval_split;                  // periodic eval split, with eval_every
};

struct EvalArgs {
    std::string data_dir;
    std::string split = kSplitUnseenHouse;
    std::string policy = "checkpoint";  // checkpoint | random | teacher
    std::string checkpoint;
    std::string out_csv;
    std::string traj_out;  // optional trajectory record dump (JSON lines)
    std::uint64_t seed = 7;
    double threshold = 3.0;
    int decision_cap = Env::kDefaultDecisionCap;
    bool zero_vision = false;
    bool zero_language = false;
    std::optional<std::set<int>> granularity;
    PlannerConfig planner;
    PolicyConfig policy_config;
};

// Exit code 0 on success. Configuration problems raise std::invalid_argument
// (exit 1 in main); runtime aborts such as the NaN guard raise
// std::runtime_error (exit 2).
int cmd_gen_world(const GenWorldArgs& args);
int cmd_gen_dataset(const GenDatasetArgs& args);
int cmd_train(const TrainArgs& args);
int cmd_eval(const EvalArgs& args);

struct EvalSummary {
    double ne = 0.0, osr = 0.0, sr = 0.0, spl_value = 0.0, sfpl_value = 0.0, sfpl_spl = 0.0;
    int episodes = 0;
};

// Shared by cmd_eval and the tests; runs the requested policy over a split.
EvalSummary run_evaluation(const Dataset& dataset, const EvalArgs& args,
                           std::vector<EpisodeEval>* per_episode = nullptr,
                           std::vector<TrajectoryRecord>* records = nullptr);

std::string metrics_csv(const std::vector<EpisodeEval>& evals);

}  // namespace gbe
