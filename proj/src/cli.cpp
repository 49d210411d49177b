#include "gbe/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include "gbe/metrics.hpp"
#include "gbe/vocab.hpp"
#include "json.hpp"

namespace gbe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_double(double v) {
    std::ostringstream ss;
    ss.setf(std::ios::fixed);
    ss.precision(6);
    ss << v;
    return ss.str();
}

void write_run_manifest(const std::string& out_dir, const std::string& command, json config,
                        const std::vector<std::string>& input_files) {
    json inputs = json::array();
    for (const std::string& path : input_files) {
        std::uint64_t h = fnv1a64(load_text_file(path));
        inputs.push_back(json{{"file", path}, {"fnv1a64", h}});
    }
    json j;
    j["command"] = command;
    j["config"] = std::move(config);
    j["inputs"] = inputs;
    fs::create_directories(out_dir);
    save_text_file((fs::path(out_dir) / "run_manifest.json").string(), j.dump(2) + "\n");
}

json train_config_json(const TrainConfig& c) {
    return json{
        {"lambda1", c.lambda1},
        {"lambda2", c.lambda2},
        {"lambda3", c.lambda3},
        {"gamma", c.gamma},
        {"learning_rate", c.learning_rate},
        {"iterations", c.iterations},
        {"value_loss_weight", c.value_loss_weight},
        {"entropy_weight", c.entropy_weight},
        {"success_threshold", c.success_threshold},
        {"terminal_bonus", c.terminal_bonus},
        {"decision_cap", c.decision_cap},
        {"zero_vision", c.zero_vision},
        {"zero_language", c.zero_language},
        {"seed", c.seed},
        {"gcn_layers", c.planner.gcn_layers},
        {"embed_dim", c.planner.embed_dim},
    };
}

}  // namespace

int cmd_gen_world(const GenWorldArgs& args) {
    if (args.out.empty()) throw std::invalid_argument("gen-world: --out is required");
    World w = generate_world(args.seed, args.world);
    fs::path out(args.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    save_text_file(args.out, world_to_json(w));
    std::cout << "world " << w.id << ": " << w.nodes.size() << " nodes, " << w.edges.size()
              << " edges, " << w.objects.size() << " objects -> " << args.out << "\n";
    return 0;
}

int cmd_gen_dataset(const GenDatasetArgs& args) {
    if (args.out.empty()) throw std::invalid_argument("gen-dataset: --out is required");
    Dataset ds = generate_dataset(args.config);
    save_dataset(ds, args.config, args.out);
    json cfg{{"seed", args.config.seed},
             {"train_worlds", args.config.train_worlds},
             {"unseen_worlds", args.config.unseen_worlds},
             {"episodes_per_object", args.config.episodes_per_object},
             {"val_starts", args.config.val_starts}};
    write_run_manifest(args.out, "gen-dataset", std::move(cfg), {});
    for (const auto& [name, eps] : ds.splits)
        std::cout << name << ": " << eps.size() << " episodes\n";
    return 0;
}

int cmd_train(const TrainArgs& args) {
    if (args.data_dir.empty() || args.out_dir.empty())
        throw std::invalid_argument("train: --data and --out are required");
    Dataset ds = load_dataset(args.data_dir);
    TrainConfig config = args.config;
    if (args.no_ge) config.lambda3 = 0.0;
    if (args.granularity) override_granularity(ds, *args.granularity);

    auto train_it = ds.splits.find(kSplitTrain);
    if (train_it == ds.splits.end() || train_it->second.empty())
        throw std::invalid_argument("train: dataset has no train split");

    const std::vector<EpisodeSpec>* eval_split = nullptr;
    if (!args.eval_split.empty()) {
        auto it = ds.splits.find(args.eval_split);
        if (it == ds.splits.end())
            throw std::invalid_argument("train: unknown eval split " + args.eval_split);
        eval_split = &it->second;
    }

    json cfg = train_config_json(config);
    cfg["data_dir"] = args.data_dir;
    if (args.granularity)
        cfg["granularity"] = std::vector<int>(args.granularity->begin(), args.granularity->end());
    write_run_manifest(args.out_dir, "train", std::move(cfg),
                       {(fs::path(args.data_dir) / "manifest.json").string()});

    TrainOutcome outcome = train(config, ds.worlds, train_it->second, eval_split);
    outcome.store.save((fs::path(args.out_dir) / "checkpoint.bin").string());

    std::ostringstream curve;
    curve << "iteration,nav_loss,loc_loss,eval_sr,eval_spl,eval_sfpl\n";
    for (const CurveRow& row : outcome.curve) {
        curve << row.iteration << ',' << format_double(row.nav_loss) << ','
              << format_double(row.loc_loss) << ',';
        if (row.eval_sr) curve << format_double(*row.eval_sr);
        curve << ',';
        if (row.eval_spl) curve << format_double(*row.eval_spl);
        curve << ',';
        if (row.eval_sfpl) curve << format_double(*row.eval_sfpl);
        curve << '\n';
    }
    save_text_file((fs::path(args.out_dir) / "curve.csv").string(), curve.str());
    std::cout << "trained " << config.iterations << " iterations -> " << args.out_dir << "\n";
    return 0;
}

EvalSummary run_evaluation(const Dataset& dataset, const EvalArgs& args,
                           std::vector<EpisodeEval>* per_episode,
                           std::vector<TrajectoryRecord>* records) {
    auto split_it = dataset.splits.find(args.split);
    if (split_it == dataset.splits.end())
        throw std::invalid_argument("eval: unknown split " + args.split);
    const std::vector<EpisodeSpec>& episodes = split_it->second;
    if (episodes.empty()) throw std::invalid_argument("eval: split is empty");

    std::vector<EpisodeEval> evals;
    evals.reserve(episodes.size());

    if (args.policy == "random") {
        Rng rng(mix_seed(args.seed ^ 0x72616e646f6dull));
        for (const EpisodeSpec& ep : episodes) {
            EpisodeResult r = random_rollout(dataset.worlds.at(ep.world_id), ep, rng,
                                             args.decision_cap);
            evals.push_back(evaluate_episode(dataset.worlds.at(ep.world_id), ep, r, args.threshold));
        }
    } else if (args.policy == "teacher") {
        for (const EpisodeSpec& ep : episodes) {
            EpisodeResult r = teacher_rollout(dataset.worlds.at(ep.world_id), ep, args.decision_cap);
            evals.push_back(evaluate_episode(dataset.worlds.at(ep.world_id), ep, r, args.threshold));
        }
    } else if (args.policy == "checkpoint") {
        if (args.checkpoint.empty()) throw std::invalid_argument("eval: --checkpoint is required");
        nn::ParamStore store = nn::ParamStore::load(args.checkpoint);
        RolloutOptions opts;
        opts.mode = RolloutMode::Greedy;
        opts.zero_vision = args.zero_vision;
        opts.zero_language = args.zero_language;
        opts.decision_cap = args.decision_cap;
        auto traces = evaluate_policy(store, dataset.worlds, episodes, args.planner,
                                      args.policy_config, opts);
        for (const auto& tr : traces) {
            evals.push_back(evaluate_episode(dataset.worlds.at(tr.episode->world_id), *tr.episode,
                                             tr.result, args.threshold));
            if (records) records->push_back(tr.record);
        }
    } else {
        throw std::invalid_argument("eval: unknown policy kind " + args.policy);
    }

    EvalSummary s;
    s.episodes = static_cast<int>(evals.size());
    s.ne = mean_navigation_error(evals);
    s.osr = oracle_success_rate(evals);
    s.sr = success_rate(evals);
    s.spl_value = spl(evals);
    s.sfpl_value = sfpl(evals);
    s.sfpl_spl = sfpl_splstyle(evals);
    if (per_episode) *per_episode = std::move(evals);
    return s;
}

std::string metrics_csv(const std::vector<EpisodeEval>& evals) {
    std::ostringstream csv;
    csv << "row,ne,osr,sr,spl,sfpl,sfpl_splstyle,l_nav,l_gt\n";
    for (std::size_t i = 0; i < evals.size(); ++i) {
        const EpisodeEval& e = evals[i];
        double term_spl = e.success ? e.l_gt / std::max(e.l_nav, e.l_gt) : 0.0;
        double term_sfpl =
            e.success && e.localization_success ? e.l_nav / std::max(e.l_nav, e.l_gt) : 0.0;
        double term_sfpl_spl =
            e.success && e.localization_success ? e.l_gt / std::max(e.l_nav, e.l_gt) : 0.0;
        csv << i << ',' << format_double(e.navigation_error) << ',' << e.oracle_success << ','
            << e.success << ',' << format_double(term_spl) << ',' << format_double(term_sfpl)
            << ',' << format_double(term_sfpl_spl) << ',' << format_double(e.l_nav) << ','
            << format_double(e.l_gt) << '\n';
    }
    csv << "aggregate," << format_double(mean_navigation_error(evals)) << ','
        << format_double(oracle_success_rate(evals)) << ',' << format_double(success_rate(evals))
        << ',' << format_double(spl(evals)) << ',' << format_double(sfpl(evals)) << ','
        << format_double(sfpl_splstyle(evals)) << ",,\n";
    return csv.str();
}

int cmd_eval(const EvalArgs& args) {
    if (args.data_dir.empty()) throw std::invalid_argument("eval: --data is required");
    Dataset ds = load_dataset(args.data_dir);
    if (args.granularity) override_granularity(ds, *args.granularity);

    std::vector<EpisodeEval> evals;
    std::vector<TrajectoryRecord> records;
    EvalSummary s = run_evaluation(ds, args, &evals, args.traj_out.empty() ? nullptr : &records);

    std::cout << "split=" << args.split << " policy=" << args.policy << " episodes=" << s.episodes
              << " NE=" << format_double(s.ne) << " OSR=" << format_double(s.osr)
              << " SR=" << format_double(s.sr) << " SPL=" << format_double(s.spl_value)
              << " SFPL=" << format_double(s.sfpl_value)
              << " SFPL_splstyle=" << format_double(s.sfpl_spl) << "\n";

    if (!args.out_csv.empty()) {
        fs::path out(args.out_csv);
        if (out.has_parent_path()) fs::create_directories(out.parent_path());
        save_text_file(args.out_csv, metrics_csv(evals));
    }
    if (!args.traj_out.empty()) {
        std::ostringstream lines;
        for (const TrajectoryRecord& r : records) lines << r.to_json();
        fs::path out(args.traj_out);
        if (out.has_parent_path()) fs::create_directories(out.parent_path());
        save_text_file(args.traj_out, lines.str());
    }
    return 0;
}

}  // namespace gbe
