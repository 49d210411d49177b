#include <iostream>
#include <set>
#include <vector>

#include "CLI11.hpp"
#include "gbe/cli.hpp"

namespace {

std::set<int> parse_granularity(const std::vector<int>& levels) {
    return {levels.begin(), levels.end()};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-based semantic exploration lab: synthetic houses, "
                 "instruction-conditioned navigation, training and evaluation"};
    app.require_subcommand(1);

    gbe::GenWorldArgs gen_world;
    auto* gw = app.add_subcommand("gen-world", "Generate one synthetic house");
    gw->add_option("--seed", gen_world.seed, "World seed");
    gw->add_option("--nodes", gen_world.world.node_count, "Node count");
    gw->add_option("--regions", gen_world.world.region_count, "Region count");
    gw->add_option("--objects", gen_world.world.object_count, "Object count");
    gw->add_option("--feature-dim", gen_world.world.feature_dim, "Feature dimension");
    gw->add_option("--extent", gen_world.world.extent, "Layout side length (m)");
    gw->add_option("--out", gen_world.out, "Output world JSON")->required();

    gbe::GenDatasetArgs gen_dataset;
    std::vector<int> ds_granularity;
    auto* gd = app.add_subcommand("gen-dataset", "Generate worlds plus the four-way episode split");
    gd->add_option("--seed", gen_dataset.config.seed, "Dataset seed");
    gd->add_option("--train-worlds", gen_dataset.config.train_worlds, "Training houses");
    gd->add_option("--unseen-worlds", gen_dataset.config.unseen_worlds, "Held-out houses");
    gd->add_option("--nodes", gen_dataset.config.world.node_count, "Nodes per world");
    gd->add_option("--regions", gen_dataset.config.world.region_count, "Regions per world");
    gd->add_option("--objects", gen_dataset.config.world.object_count, "Objects per world");
    gd->add_option("--feature-dim", gen_dataset.config.world.feature_dim, "Feature dimension");
    gd->add_option("--extent", gen_dataset.config.world.extent, "Layout side length (m)");
    gd->add_option("--episodes-per-object", gen_dataset.config.episodes_per_object,
                   "Train episodes per object");
    gd->add_option("--val-starts", gen_dataset.config.val_starts, "Val episodes per object");
    gd->add_option("--granularity", ds_granularity, "Instruction granularity levels (1-5)");
    gd->add_option("--out", gen_dataset.out, "Output dataset directory")->required();

    gbe::TrainArgs train_args;
    std::vector<int> train_granularity;
    auto* tr = app.add_subcommand("train", "Train the navigation agent");
    tr->add_option("--data", train_args.data_dir, "Dataset directory")->required();
    tr->add_option("--out", train_args.out_dir, "Run output directory")->required();
    tr->add_option("--seed", train_args.config.seed, "Training seed");
    tr->add_option("--iterations", train_args.config.iterations, "Training iterations (episodes)");
    tr->add_option("--lr", train_args.config.learning_rate, "RMSProp learning rate");
    tr->add_option("--lambda1", train_args.config.lambda1, "Imitation loss weight");
    tr->add_option("--lambda2", train_args.config.lambda2, "Reinforcement loss weight");
    tr->add_option("--lambda3", train_args.config.lambda3, "Graph-exploration loss weight");
    tr->add_option("--gamma", train_args.config.gamma, "Reward discount");
    tr->add_option("--entropy-weight", train_args.config.entropy_weight, "Entropy bonus weight");
    tr->add_option("--value-weight", train_args.config.value_loss_weight, "Critic loss weight");
    tr->add_option("--decision-cap", train_args.config.decision_cap, "Decisions per episode");
    tr->add_option("--eval-every", train_args.config.eval_every, "Periodic eval interval");
    tr->add_option("--eval-split", train_args.eval_split, "Periodic eval split name");
    tr->add_flag("--no-ge", train_args.no_ge, "Disable graph-based exploration (lambda3 = 0)");
    tr->add_flag("--zero-vision", train_args.config.zero_vision, "Zero all visual features");
    tr->add_flag("--zero-language", train_args.config.zero_language, "Zero all token embeddings");
    tr->add_option("--granularity", train_granularity,
                   "Regenerate instructions at these granularity levels");

    gbe::EvalArgs eval_args;
    std::vector<int> eval_granularity;
    auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint or baseline on a split");
    ev->add_option("--data", eval_args.data_dir, "Dataset directory")->required();
    ev->add_option("--split", eval_args.split, "Split name");
    ev->add_option("--policy", eval_args.policy, "checkpoint | random | teacher");
    ev->add_option("--checkpoint", eval_args.checkpoint, "Checkpoint file");
    ev->add_option("--seed", eval_args.seed, "Seed for the random baseline");
    ev->add_option("--threshold", eval_args.threshold, "Success threshold (m)");
    ev->add_option("--decision-cap", eval_args.decision_cap, "Decisions per episode");
    ev->add_option("--out", eval_args.out_csv, "Metrics CSV path");
    ev->add_option("--traj-out", eval_args.traj_out, "Trajectory record dump (JSON lines)");
    ev->add_flag("--zero-vision", eval_args.zero_vision, "Zero all visual features");
    ev->add_flag("--zero-language", eval_args.zero_language, "Zero all token embeddings");
    ev->add_option("--granularity", eval_granularity,
                   "Regenerate instructions at these granularity levels");

    gbe::EvalArgs random_args;
    auto* rb = app.add_subcommand("baseline-random", "Uniform-random policy over a split");
    rb->add_option("--data", random_args.data_dir, "Dataset directory")->required();
    rb->add_option("--split", random_args.split, "Split name");
    rb->add_option("--seed", random_args.seed, "Sampling seed");
    rb->add_option("--threshold", random_args.threshold, "Success threshold (m)");
    rb->add_option("--decision-cap", random_args.decision_cap, "Decisions per episode");
    rb->add_option("--out", random_args.out_csv, "Metrics CSV path");

    gbe::EvalArgs teacher_args;
    auto* tb = app.add_subcommand("baseline-teacher", "Shortest-path teacher over a split");
    tb->add_option("--data", teacher_args.data_dir, "Dataset directory")->required();
    tb->add_option("--split", teacher_args.split, "Split name");
    tb->add_option("--threshold", teacher_args.threshold, "Success threshold (m)");
    tb->add_option("--decision-cap", teacher_args.decision_cap, "Decisions per episode");
    tb->add_option("--out", teacher_args.out_csv, "Metrics CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gw->parsed()) return gbe::cmd_gen_world(gen_world);
        if (gd->parsed()) {
            if (!ds_granularity.empty())
                gen_dataset.config.granularity = parse_granularity(ds_granularity);
            return gbe::cmd_gen_dataset(gen_dataset);
        }
        if (tr->parsed()) {
            if (!train_granularity.empty())
                train_args.granularity = parse_granularity(train_granularity);
            return gbe::cmd_train(train_args);
        }
        if (ev->parsed()) {
            if (!eval_granularity.empty())
                eval_args.granularity = parse_granularity(eval_granularity);
            return gbe::cmd_eval(eval_args);
        }
        if (rb->parsed()) {
            random_args.policy = "random";
            return gbe::cmd_eval(random_args);
        }
        if (tb->parsed()) {
            teacher_args.policy = "teacher";
            return gbe::cmd_eval(teacher_args);
        }
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 1;
    } catch (const std::out_of_range& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "runtime abort: " << err.what() << "\n";
        return 2;
    }
    return 0;
}
