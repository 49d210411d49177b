#include "gbe/learning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gbe/metrics.hpp"
#include "gbe/shortest_path.hpp"
#include "gbe/vocab.hpp"
#include "json.hpp"

namespace gbe {

using nlohmann::json;
using nn::NodeRef;
using nn::Tape;

namespace {

const char* mode_name(RolloutMode m) {
    switch (m) {
        case RolloutMode::Imitation: return "imitation";
        case RolloutMode::Reinforce: return "reinforce";
        case RolloutMode::Exploration: return "exploration";
        case RolloutMode::Greedy: return "greedy";
    }
    return "greedy";
}

RolloutMode mode_from_name(const std::string& s) {
    if (s == "imitation") return RolloutMode::Imitation;
    if (s == "reinforce") return RolloutMode::Reinforce;
    if (s == "exploration") return RolloutMode::Exploration;
    if (s == "greedy") return RolloutMode::Greedy;
    throw std::invalid_argument("unknown rollout mode: " + s);
}

int sample_categorical(const Eigen::MatrixXd& log_probs, Rng& rng) {
    double u = rng.uniform();
    double acc = 0.0;
    int last = static_cast<int>(log_probs.rows()) - 1;
    for (int i = 0; i <= last; ++i) {
        acc += std::exp(log_probs(i, 0));
        if (u < acc) return i;
    }
    return last;
}

int argmax_index(const Eigen::MatrixXd& log_probs) {
    int best = 0;
    for (int i = 1; i < log_probs.rows(); ++i)
        if (log_probs(i, 0) > log_probs(best, 0)) best = i;
    return best;
}

int action_to_index(const NavAction& action, const std::vector<NodeId>& candidates) {
    if (action.kind == NavAction::Kind::Stop) return 0;
    auto it = std::find(candidates.begin(), candidates.end(), action.target);
    if (it == candidates.end())
        throw std::logic_error("action_to_index: node not in the candidate set");
    return static_cast<int>(it - candidates.begin()) + 1;
}

// Ground-truth IL action: stop at a target, otherwise the first node on a
// shortest path to the nearest target (nearest by distance, ties to the
// smallest target id).
NavAction ground_truth_action(const World& world, const std::vector<NodeId>& targets,
                              NodeId current) {
    std::vector<double> from_here = dijkstra_from(world, current);
    NodeId nearest = -1;
    double best = kInf;
    for (NodeId t : targets) {
        double d = from_here.at(static_cast<std::size_t>(t));
        if (d < best || (d == best && t < nearest)) {
            best = d;
            nearest = t;
        }
    }
    if (best == 0.0) return NavAction::stop();
    std::vector<NodeId> path = shortest_path_between(world, current, nearest);
    return NavAction::goto_node(path.at(1));
}

}  // namespace

RolloutTrace rollout(Tape& tape, const World& world, const EpisodeSpec& episode,
                     const PlannerConfig& planner_config, const PolicyConfig& policy_config,
                     const RolloutOptions& options, Rng& rng) {
    Env env(world, episode, options.decision_cap);
    StepObservation obs = env.reset();
    PlannerState state;

    const int vocab_size = Vocab::instance().size();
    auto lang = nn::sequence_encode(tape, episode.instruction.tokens, vocab_size,
                                    policy_config.language, options.zero_language);

    RolloutTrace trace;
    trace.mode = options.mode;
    trace.episode = &episode;
    trace.record.world_id = episode.world_id;
    trace.record.object_id = episode.object_id;
    trace.record.start = episode.start;
    trace.record.mode = options.mode;
    if (!options.zero_language) {
        const Eigen::MatrixXd& embed = tape.store()->at("lang.embed").value;
        for (int tok : episode.instruction.tokens)
            trace.record.language_input_l1 += embed.col(tok).cwiseAbs().sum();
    }

    const bool training = options.mode != RolloutMode::Greedy;
    std::vector<double> target_dist;
    if (training) target_dist = multi_source_distances(world, episode.target_nodes);

    while (true) {
        Eigen::VectorXd feature = options.zero_vision
                                      ? Eigen::VectorXd::Zero(obs.feature.size()).eval()
                                      : obs.feature;
        std::vector<NeighborObs> neighbors = obs.neighbors;
        if (options.zero_vision)
            for (NeighborObs& nb : neighbors) nb.feature.setZero();
        trace.record.vision_input_l1 += feature.cwiseAbs().sum();
        for (const NeighborObs& nb : neighbors)
            trace.record.vision_input_l1 += nb.feature.cwiseAbs().sum();

        observe(state, obs.node, feature, neighbors);
        PropagatedEmbeddings prop = propagate(tape, state, planner_config);
        NodeRef f_g = readout(tape, prop, state, obs.node, planner_config);
        NodeRef f_t = cross_modal(tape, f_g, lang.states);

        std::vector<NodeId> cand = candidates(state);
        std::vector<NodeRef> cand_features;
        cand_features.reserve(cand.size());
        for (NodeId c : cand) cand_features.push_back(prop.encoded_inputs[prop.column_of.at(c)]);
        PolicyOutput out = decide(tape, f_t, cand_features);
        const Eigen::MatrixXd& logp = tape.value(out.log_probs);

        int action_index = 0;
        int teacher_index = -1;
        switch (options.mode) {
            case RolloutMode::Imitation:
                action_index = action_to_index(ground_truth_action(world, episode.target_nodes,
                                                                   env.current()),
                                               cand);
                teacher_index = action_index;
                break;
            case RolloutMode::Reinforce:
                action_index = sample_categorical(logp, rng);
                break;
            case RolloutMode::Exploration:
                action_index = sample_categorical(logp, rng);
                teacher_index = action_to_index(
                    teacher_action(world, cand, target_dist, env.current()), cand);
                break;
            case RolloutMode::Greedy:
                action_index = argmax_index(logp);
                break;
        }

        RolloutTrace::Step step;
        step.candidate_ids = cand;
        step.log_probs = out.log_probs;
        step.localization = out.localization;
        step.value = out.value;
        step.action_index = action_index;
        step.teacher_index = teacher_index;
        step.node = obs.node;
        trace.steps.push_back(step);

        TrajectoryRecord::Step rec;
        rec.node = obs.node;
        rec.candidates = cand;
        rec.log_probs.assign(logp.data(), logp.data() + logp.rows());
        rec.action_index = action_index;
        rec.teacher_index = teacher_index;
        rec.value = tape.value(out.value)(0, 0);
        const Eigen::MatrixXd& loc = tape.value(out.localization);
        rec.localization = {loc(0, 0), loc(1, 0)};
        if (options.debug_dump) rec.frontier = cand;
        trace.record.steps.push_back(std::move(rec));

        NavAction act = action_index == 0 ? NavAction::stop()
                                          : NavAction::goto_node(cand[action_index - 1]);
        auto result = env.step(act);
        if (std::holds_alternative<EpisodeResult>(result)) {
            trace.result = std::get<EpisodeResult>(result);
            const Eigen::MatrixXd& last_loc = tape.value(trace.steps.back().localization);
            trace.result.final_localization = PolarPoint{last_loc(0, 0), last_loc(1, 0)};
            bool on_target = std::binary_search(episode.target_nodes.begin(),
                                                episode.target_nodes.end(), trace.result.stop_node);
            if (trace.result.stopped && on_target)
                trace.supervised_stop_step = static_cast<int>(trace.steps.size()) - 1;
            trace.record.result = trace.result;
            return trace;
        }
        obs = std::get<StepObservation>(result);
    }
}

EpisodeResult random_rollout(const World& world, const EpisodeSpec& episode, Rng& rng,
                             int decision_cap) {
    Env env(world, episode, decision_cap);
    StepObservation obs = env.reset();
    PlannerState state;
    while (true) {
        observe(state, obs.node, obs.feature, obs.neighbors);
        std::vector<NodeId> cand = candidates(state);
        int pick = rng.uniform_int(static_cast<int>(cand.size()) + 1);
        NavAction act = pick == 0 ? NavAction::stop() : NavAction::goto_node(cand[pick - 1]);
        auto result = env.step(act);
        if (std::holds_alternative<EpisodeResult>(result)) return std::get<EpisodeResult>(result);
        obs = std::get<StepObservation>(result);
    }
}

EpisodeResult teacher_rollout(const World& world, const EpisodeSpec& episode, int decision_cap) {
    Env env(world, episode, decision_cap);
    StepObservation obs = env.reset();
    PlannerState state;
    std::vector<double> target_dist = multi_source_distances(world, episode.target_nodes);
    while (true) {
        observe(state, obs.node, obs.feature, obs.neighbors);
        NavAction act = teacher_action(world, candidates(state), target_dist, env.current());
        auto result = env.step(act);
        if (std::holds_alternative<EpisodeResult>(result)) return std::get<EpisodeResult>(result);
        obs = std::get<StepObservation>(result);
    }
}

void compute_rewards(RolloutTrace& trace, const World& world, double gamma,
                     double success_threshold, double terminal_bonus) {
    if (!trace.episode) throw std::logic_error("compute_rewards: trace without episode");
    std::vector<double> dist = multi_source_distances(world, trace.episode->target_nodes);
    const std::size_t n = trace.steps.size();
    trace.rewards.assign(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        NodeId from = trace.steps[t].node;
        NodeId to = (t + 1 < n) ? trace.steps[t + 1].node : trace.result.stop_node;
        trace.rewards[t] = dist[static_cast<std::size_t>(from)] - dist[static_cast<std::size_t>(to)];
    }
    if (dist[static_cast<std::size_t>(trace.result.stop_node)] < success_threshold)
        trace.rewards[n - 1] += terminal_bonus;

    trace.returns.assign(n, 0.0);
    double g = 0.0;
    for (std::size_t t = n; t-- > 0;) {
        g = trace.rewards[t] + gamma * g;
        trace.returns[t] = g;
    }
    trace.advantages.assign(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        trace.advantages[t] = trace.returns[t] - trace.record.steps[t].value;
        trace.record.steps[t].reward = trace.rewards[t];
    }
}

namespace {

NodeRef sum_neg_log_prob(Tape& tape, const std::vector<RolloutTrace>& batch, bool use_teacher) {
    NodeRef acc = tape.zeros(1, 1);
    for (const RolloutTrace& tr : batch) {
        for (const auto& step : tr.steps) {
            int index = use_teacher ? step.teacher_index : step.action_index;
            if (index < 0) throw std::logic_error("nav_loss: missing supervision index");
            acc = tape.add(acc, tape.scale(tape.pick(step.log_probs, index), -1.0));
        }
    }
    return acc;
}

}  // namespace

NodeRef nav_loss(Tape& tape, const std::vector<RolloutTrace>& il,
                 const std::vector<RolloutTrace>& rl, const std::vector<RolloutTrace>& ge,
                 const TrainConfig& config) {
    NodeRef loss = tape.zeros(1, 1);
    if (config.lambda1 != 0.0 && !il.empty())
        loss = tape.add(loss, tape.scale(sum_neg_log_prob(tape, il, false), config.lambda1));
    if (config.lambda2 != 0.0 && !rl.empty()) {
        NodeRef term = tape.zeros(1, 1);
        for (const RolloutTrace& tr : rl) {
            if (tr.advantages.size() != tr.steps.size())
                throw std::logic_error("nav_loss: RL trace without computed rewards");
            for (std::size_t t = 0; t < tr.steps.size(); ++t) {
                NodeRef neg_logp = tape.scale(tape.pick(tr.steps[t].log_probs,
                                                        tr.steps[t].action_index),
                                              -1.0);
                term = tape.add(term, tape.scale(neg_logp, tr.advantages[t]));
            }
        }
        if (config.entropy_weight != 0.0) {
            for (const RolloutTrace& tr : rl)
                for (const auto& step : tr.steps) {
                    // dot(p, log p) = -H; adding it rewards entropy.
                    NodeRef p = tape.softmax(step.log_probs);
                    term = tape.add(term,
                                    tape.scale(tape.dot(p, step.log_probs), config.entropy_weight));
                }
        }
        loss = tape.add(loss, tape.scale(term, config.lambda2));
    }
    if (config.lambda3 != 0.0 && !ge.empty())
        loss = tape.add(loss, tape.scale(sum_neg_log_prob(tape, ge, true), config.lambda3));
    return loss;
}

NodeRef loc_loss(Tape& tape, const std::vector<RolloutTrace>& traces) {
    NodeRef acc = tape.zeros(1, 1);
    int n = 0;
    for (const RolloutTrace& tr : traces) {
        if (tr.supervised_stop_step < 0) continue;
        const auto& step = tr.steps[static_cast<std::size_t>(tr.supervised_stop_step)];
        const PolarPoint& label = tr.episode->polar_labels.at(tr.result.stop_node);
        Eigen::VectorXd target(2);
        target << label.heading, label.elevation;
        NodeRef diff = tape.sub(step.localization, tape.constant_vector(target));
        acc = tape.add(acc, tape.dot(diff, diff));
        ++n;
    }
    if (n == 0) return acc;
    return tape.scale(acc, 1.0 / static_cast<double>(n));
}

NodeRef value_loss(Tape& tape, const std::vector<RolloutTrace>& rl) {
    NodeRef acc = tape.zeros(1, 1);
    int n = 0;
    for (const RolloutTrace& tr : rl) {
        for (std::size_t t = 0; t < tr.steps.size(); ++t) {
            Eigen::MatrixXd g(1, 1);
            g(0, 0) = tr.returns[t];
            NodeRef diff = tape.sub(tr.steps[t].value, tape.constant(g));
            acc = tape.add(acc, tape.hadamard(diff, diff));
            ++n;
        }
    }
    if (n == 0) return acc;
    return tape.scale(acc, 1.0 / static_cast<double>(n));
}

TrainOutcome train(const TrainConfig& config, const std::map<std::uint64_t, World>& worlds,
                   const std::vector<EpisodeSpec>& episodes,
                   const std::vector<EpisodeSpec>* eval_split) {
    if (episodes.empty()) throw std::invalid_argument("train: empty episode set");

    Rng init_rng(mix_seed(config.seed ^ 0x747261696e696e67ull));
    TrainOutcome outcome;
    init_policy_params(outcome.store, config.policy, Vocab::instance().size(),
                       config.planner.gcn_layers, init_rng);
    Rng rng = init_rng.fork(0x6c6f6f70);

    RolloutOptions base;
    base.zero_vision = config.zero_vision;
    base.zero_language = config.zero_language;
    base.decision_cap = config.decision_cap;
    base.success_threshold = config.success_threshold;

    for (int iter = 0; iter < config.iterations; ++iter) {
        const EpisodeSpec& ep = episodes[static_cast<std::size_t>(
            rng.uniform_int(static_cast<int>(episodes.size())))];
        const World& world = worlds.at(ep.world_id);

        Tape tape(&outcome.store);
        std::vector<RolloutTrace> il, rl, ge, all;
        try {
            if (config.lambda1 != 0.0) {
                RolloutOptions o = base;
                o.mode = RolloutMode::Imitation;
                il.push_back(rollout(tape, world, ep, config.planner, config.policy, o, rng));
            }
            if (config.lambda2 != 0.0) {
                RolloutOptions o = base;
                o.mode = RolloutMode::Reinforce;
                rl.push_back(rollout(tape, world, ep, config.planner, config.policy, o, rng));
                compute_rewards(rl.back(), world, config.gamma, config.success_threshold,
                                config.terminal_bonus);
            }
            if (config.lambda3 != 0.0) {
                RolloutOptions o = base;
                o.mode = RolloutMode::Exploration;
                ge.push_back(rollout(tape, world, ep, config.planner, config.policy, o, rng));
            }

            NodeRef nav = nav_loss(tape, il, rl, ge, config);
            for (const auto* batch : {&il, &rl, &ge})
                for (const RolloutTrace& tr : *batch) all.push_back(tr);
            NodeRef loc = loc_loss(tape, all);
            NodeRef total = tape.add(nav, loc);
            if (config.lambda2 != 0.0 && config.value_loss_weight != 0.0 && !rl.empty())
                total = tape.add(total, tape.scale(value_loss(tape, rl), config.value_loss_weight));

            CurveRow row;
            row.iteration = iter;
            row.nav_loss = tape.scalar(nav);
            row.loc_loss = tape.scalar(loc);

            tape.backward(total);
            outcome.store.rmsprop_step(config.learning_rate, config.rmsprop_decay,
                                       config.rmsprop_eps);

            if (eval_split && config.eval_every > 0 && (iter + 1) % config.eval_every == 0) {
                RolloutOptions eval_opts = base;
                eval_opts.mode = RolloutMode::Greedy;
                auto traces = evaluate_policy(outcome.store, worlds, *eval_split, config.planner,
                                              config.policy, eval_opts);
                std::vector<EpisodeEval> evals;
                for (const auto& tr : traces)
                    evals.push_back(evaluate_episode(worlds.at(tr.episode->world_id), *tr.episode,
                                                     tr.result, config.success_threshold));
                row.eval_sr = success_rate(evals);
                row.eval_spl = spl(evals);
                row.eval_sfpl = sfpl(evals);
            }
            outcome.curve.push_back(row);
        } catch (const std::runtime_error& err) {
            throw std::runtime_error("train: aborted at iteration " + std::to_string(iter) + ": " +
                                     err.what());
        }
    }
    return outcome;
}

std::vector<RolloutTrace> evaluate_policy(nn::ParamStore& store,
                                          const std::map<std::uint64_t, World>& worlds,
                                          const std::vector<EpisodeSpec>& episodes,
                                          const PlannerConfig& planner_config,
                                          const PolicyConfig& policy_config,
                                          const RolloutOptions& base_options) {
    std::vector<RolloutTrace> traces;
    traces.reserve(episodes.size());
    Rng rng(0x6576616cull);  // greedy rollouts never consume randomness
    for (const EpisodeSpec& ep : episodes) {
        Tape tape(&store);
        RolloutOptions o = base_options;
        o.mode = RolloutMode::Greedy;
        traces.push_back(rollout(tape, worlds.at(ep.world_id), ep, planner_config, policy_config,
                                 o, rng));
    }
    return traces;
}

std::string TrajectoryRecord::to_json() const {
    json j;
    j["world_id"] = world_id;
    j["object_id"] = object_id;
    j["start"] = start;
    j["mode"] = mode_name(mode);
    j["vision_input_l1"] = vision_input_l1;
    j["language_input_l1"] = language_input_l1;
    json steps_json = json::array();
    for (const Step& s : steps) {
        json sj;
        sj["node"] = s.node;
        sj["candidates"] = s.candidates;
        sj["log_probs"] = s.log_probs;
        sj["action_index"] = s.action_index;
        sj["teacher_index"] = s.teacher_index;
        sj["reward"] = s.reward;
        sj["value"] = s.value;
        sj["localization"] = s.localization;
        if (!s.frontier.empty()) sj["frontier"] = s.frontier;
        steps_json.push_back(std::move(sj));
    }
    j["steps"] = steps_json;
    j["visited"] = result.visited;
    j["path_length"] = result.path_length;
    j["stop_node"] = result.stop_node;
    j["decisions"] = result.decisions;
    j["stopped"] = result.stopped;
    if (result.final_localization) {
        j["final_localization"] = {{"heading", result.final_localization->heading},
                                   {"elevation", result.final_localization->elevation}};
    }
    return j.dump() + "\n";
}

TrajectoryRecord TrajectoryRecord::from_json(const std::string& text) {
    json j = json::parse(text);
    TrajectoryRecord r;
    r.world_id = j.at("world_id").get<std::uint64_t>();
    r.object_id = j.at("object_id").get<int>();
    r.start = j.at("start").get<NodeId>();
    r.mode = mode_from_name(j.at("mode").get<std::string>());
    r.vision_input_l1 = j.at("vision_input_l1").get<double>();
    r.language_input_l1 = j.at("language_input_l1").get<double>();
    for (const json& sj : j.at("steps")) {
        Step s;
        s.node = sj.at("node").get<NodeId>();
        s.candidates = sj.at("candidates").get<std::vector<NodeId>>();
        s.log_probs = sj.at("log_probs").get<std::vector<double>>();
        s.action_index = sj.at("action_index").get<int>();
        s.teacher_index = sj.at("teacher_index").get<int>();
        s.reward = sj.at("reward").get<double>();
        s.value = sj.at("value").get<double>();
        auto loc = sj.at("localization").get<std::vector<double>>();
        s.localization = {loc.at(0), loc.at(1)};
        if (sj.contains("frontier")) s.frontier = sj.at("frontier").get<std::vector<NodeId>>();
        r.steps.push_back(std::move(s));
    }
    r.result.visited = j.at("visited").get<std::vector<NodeId>>();
    r.result.path_length = j.at("path_length").get<double>();
    r.result.stop_node = j.at("stop_node").get<NodeId>();
    r.result.decisions = j.at("decisions").get<int>();
    r.result.stopped = j.at("stopped").get<bool>();
    if (j.contains("final_localization")) {
        r.result.final_localization = PolarPoint{
            j["final_localization"].at("heading").get<double>(),
            j["final_localization"].at("elevation").get<double>()};
    }
    return r;
}

}  // namespace gbe
