#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gbe/env.hpp"
#include "gbe/nn/gradcheck.hpp"
#include "gbe/nn/tape.hpp"
#include "gbe/planner.hpp"
#include "gbe/policy.hpp"

namespace gbe {

enum class RolloutMode {
    Imitation,    // executes the ground-truth action, records log p
    Reinforce,    // samples from p, gets shaped rewards
    Exploration,  // samples from p, records the teacher action (GE)
    Greedy,       // argmax, no supervision; targets stay hidden
};

// Per-step log of one episode; the plain, serializable side of a rollout.
struct TrajectoryRecord {
    struct Step {
        NodeId node = 0;
        std::vector<NodeId> candidates;
        std::vector<double> log_probs;  // |C|+1, index 0 = stop
        int action_index = 0;
        int teacher_index = -1;         // GE teacher / IL ground truth
        double reward = 0.0;            // RL only
        double value = 0.0;
        std::array<double, 2> localization{0.0, 0.0};
        std::vector<NodeId> frontier;   // debug dump only
    };
    std::uint64_t world_id = 0;
    int object_id = 0;
    NodeId start = 0;
    RolloutMode mode = RolloutMode::Greedy;
    std::vector<Step> steps;
    EpisodeResult result;
    double vision_input_l1 = 0.0;    // summed |feature| actually fed to the policy
    double language_input_l1 = 0.0;  // summed |embedding| of the instruction tokens

    std::string to_json() const;
    static TrajectoryRecord from_json(const std::string& text);
};

// Tape-side twin of TrajectoryRecord: the node references the losses need.
struct RolloutTrace {
    struct Step {
        std::vector<NodeId> candidate_ids;
        nn::NodeRef log_probs;
        nn::NodeRef localization;
        nn::NodeRef value;
        int action_index = 0;
        int teacher_index = -1;
        NodeId node = 0;
    };
    RolloutMode mode = RolloutMode::Greedy;
    const EpisodeSpec* episode = nullptr;
    std::vector<Step> steps;
    EpisodeResult result;
    int supervised_stop_step = -1;  // step whose localization gets the MSE label
    std::vector<double> rewards;
    std::vector<double> returns;
    std::vector<double> advantages;
    TrajectoryRecord record;
};

struct RolloutOptions {
    RolloutMode mode = RolloutMode::Greedy;
    bool zero_vision = false;
    bool zero_language = false;
    int decision_cap = Env::kDefaultDecisionCap;
    bool debug_dump = false;
    double success_threshold = 3.0;
};

RolloutTrace rollout(nn::Tape& tape, const World& world, const EpisodeSpec& episode,
                     const PlannerConfig& planner_config, const PolicyConfig& policy_config,
                     const RolloutOptions& options, Rng& rng);

// Scripted baselines; no parameters involved.
EpisodeResult random_rollout(const World& world, const EpisodeSpec& episode, Rng& rng,
                             int decision_cap = Env::kDefaultDecisionCap);
EpisodeResult teacher_rollout(const World& world, const EpisodeSpec& episode,
                              int decision_cap = Env::kDefaultDecisionCap);

// r_t = D(pos_t, nearest target) - D(pos_{t+1}, nearest target), terminal
// bonus on success; gamma-discounted returns and A_t = G_t - V_t.
void compute_rewards(RolloutTrace& trace, const World& world, double gamma,
                     double success_threshold = 3.0, double terminal_bonus = 3.0);

struct TrainConfig {
    double lambda1 = 0.5;   // imitation
    double lambda2 = 0.25;  // reinforcement
    double lambda3 = 0.25;  // graph-based exploration
    double gamma = 0.95;
    double learning_rate = 1e-3;
    double rmsprop_decay = 0.99;
    double rmsprop_eps = 1e-8;
    int iterations = 2000;
    double value_loss_weight = 0.5;
    double entropy_weight = 0.0;
    double success_threshold = 3.0;
    double terminal_bonus = 3.0;
    int decision_cap = Env::kDefaultDecisionCap;
    bool zero_vision = false;
    bool zero_language = false;
    std::uint64_t seed = 1;
    int eval_every = 0;  // 0 disables periodic evaluation
    PlannerConfig planner;
    PolicyConfig policy;
};

// Eq. 8: -l1 sum_il a* log p  - l2 sum_rl a log p * A  - l3 sum_ge a^ log p.
// Advantages enter as constants; with entropy_weight > 0 an entropy bonus is
// subtracted over the RL steps.
nn::NodeRef nav_loss(nn::Tape& tape, const std::vector<RolloutTrace>& il,
                     const std::vector<RolloutTrace>& rl, const std::vector<RolloutTrace>& ge,
                     const TrainConfig& config);

// Eq. 9: (1/N) sum [(lh_hat - lh)^2 + (le_hat - le)^2] over supervised stop
// steps. N = 0 yields a zero constant.
nn::NodeRef loc_loss(nn::Tape& tape, const std::vector<RolloutTrace>& traces);

// Critic regression toward the discounted returns (mean squared error).
nn::NodeRef value_loss(nn::Tape& tape, const std::vector<RolloutTrace>& rl);

struct CurveRow {
    int iteration = 0;
    double nav_loss = 0.0;
    double loc_loss = 0.0;
    std::optional<double> eval_sr;
    std::optional<double> eval_spl;
    std::optional<double> eval_sfpl;
};

struct TrainOutcome {
    nn::ParamStore store;
    std::vector<CurveRow> curve;
};

// One iteration = one IL + one RL + one GE rollout of the same sampled
// episode (modes whose lambda is zero are skipped), joint loss, RMSProp
// step. Deterministic under a fixed config. Throws std::runtime_error with
// the iteration number when the NaN guard trips.
TrainOutcome train(const TrainConfig& config,
                   const std::map<std::uint64_t, World>& worlds,
                   const std::vector<EpisodeSpec>& episodes,
                   const std::vector<EpisodeSpec>* eval_split = nullptr);

// Greedy evaluation of a parameter snapshot over a split.
std::vector<RolloutTrace> evaluate_policy(nn::ParamStore& store,
                                          const std::map<std::uint64_t, World>& worlds,
                                          const std::vector<EpisodeSpec>& episodes,
                                          const PlannerConfig& planner_config,
                                          const PolicyConfig& policy_config,
                                          const RolloutOptions& base_options);

}  // namespace gbe
