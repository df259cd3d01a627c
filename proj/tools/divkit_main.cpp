// divkit command line: synthetic data generation, scorer training, and the
// five experiment drivers (cascade, retrain-diff, diversity, channels,
// router). Experiment subcommands are thin wrappers over the config runner
// with flag overrides.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "divkit/experiment.hpp"
#include "divkit/generator.hpp"
#include "divkit/scorer.hpp"
#include "divkit/serialize.hpp"

namespace {

using divkit::json;

std::string resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("DIVKIT_OUT"); env != nullptr && *env != '\0') return env;
    return "out";
}

struct ExperimentFlags {
    std::string config_path;
    std::string out_dir;
    unsigned threads = 1;
    std::optional<std::uint64_t> master_seed;
    std::optional<std::uint64_t> trials;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Experiment config (JSON)")->required();
    cmd->add_option("--out", flags.out_dir, "Output directory (overrides DIVKIT_OUT)");
    cmd->add_option("--threads", flags.threads, "Concurrent trials")->check(CLI::PositiveNumber);
    cmd->add_option_function<std::uint64_t>(
        "--master-seed", [&flags](std::uint64_t v) { flags.master_seed = v; },
        "Override the config's master seed");
    cmd->add_option_function<std::uint64_t>(
        "--trials", [&flags](std::uint64_t v) { flags.trials = v; },
        "Override the config's trial count");
}

int run_experiment_command(const ExperimentFlags& flags, const std::string& expected_kind) {
    json doc;
    try {
        doc = json::parse(divkit::read_text_file(flags.config_path));
    } catch (const std::exception& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    }
    if (doc.is_object()) {
        if (!doc.contains("kind")) {
            doc["kind"] = expected_kind;
        } else if (doc.at("kind") != expected_kind) {
            std::cerr << "validation error: config kind '" << doc.at("kind").get<std::string>()
                      << "' does not match subcommand '" << expected_kind << "'\n";
            return 1;
        }
        if (flags.master_seed) doc["master_seed"] = *flags.master_seed;
        if (flags.trials) doc["trials"] = *flags.trials;
    }
    divkit::RunOptions opts;
    opts.out_dir = resolve_out_dir(flags.out_dir);
    opts.threads = flags.threads;
    return divkit::run_document(doc, opts);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"divkit: diversity and defence-in-depth experiment toolkit"};
    app.require_subcommand(1);

    // gen-data
    struct {
        std::size_t n = 1000;
        std::size_t dim = 2;
        std::uint64_t seed = 0;
        double separation = 2.0;
        double spread = 0.5;
        double hard_weight = 0.0;
        double hard_spread = 0.45;
        std::vector<double> hard_offset;
        std::string out = "data.csv";
    } gen;
    CLI::App* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic labeled dataset CSV");
    gen_cmd->add_option("--n", gen.n, "Demand count")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--dim", gen.dim, "Feature dimensionality")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--seed", gen.seed, "Generator seed");
    gen_cmd->add_option("--separation", gen.separation, "Distance between class centers on f0");
    gen_cmd->add_option("--spread", gen.spread, "Cluster standard deviation");
    gen_cmd->add_option("--hard-weight", gen.hard_weight, "Fraction drawn from the hard region");
    gen_cmd->add_option("--hard-spread", gen.hard_spread, "Hard-region standard deviation");
    gen_cmd->add_option("--hard-offset", gen.hard_offset,
                        "Per-axis class offset inside the hard region (default coincident)");
    gen_cmd->add_option("--out", gen.out, "Output CSV path");

    // train
    struct {
        std::string data;
        std::string out = "scorer.json";
        double lr = 0.1;
        std::uint64_t epochs = 300;
        double l2 = 1e-4;
        std::uint64_t seed = 0;
    } tr;
    CLI::App* train_cmd = app.add_subcommand("train", "Train a scorer on a dataset CSV");
    train_cmd->add_option("--data", tr.data, "Dataset CSV")->required();
    train_cmd->add_option("--out", tr.out, "Output parameter JSON path");
    train_cmd->add_option("--lr", tr.lr, "Learning rate");
    train_cmd->add_option("--epochs", tr.epochs, "Gradient descent steps")->check(CLI::PositiveNumber);
    train_cmd->add_option("--l2", tr.l2, "L2 penalty");
    train_cmd->add_option("--seed", tr.seed, "Initialization seed");

    ExperimentFlags cascade_flags, retrain_flags, diversity_flags, channels_flags, router_flags;
    add_experiment_flags(
        app.add_subcommand("cascade", "Build and evaluate difficulty cascades"), cascade_flags);
    add_experiment_flags(
        app.add_subcommand("retrain-diff", "Run the three-part retraining regression analysis"),
        retrain_flags);
    add_experiment_flags(
        app.add_subcommand("diversity", "Population failure-correlation experiment"),
        diversity_flags);
    add_experiment_flags(
        app.add_subcommand("channels", "Simulate diverse pair and trusted-checker channels"),
        channels_flags);
    add_experiment_flags(
        app.add_subcommand("router", "Router-to-specialist ensemble experiment"), router_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_cmd->parsed()) {
            divkit::GeneratorSpec spec;
            spec.n = gen.n;
            spec.dim = gen.dim;
            spec.seed = gen.seed;
            spec.center0.assign(gen.dim, 0.0);
            spec.center1.assign(gen.dim, 0.0);
            spec.center0[0] = -gen.separation / 2.0;
            spec.center1[0] = gen.separation / 2.0;
            spec.spread0 = spec.spread1 = gen.spread;
            if (gen.hard_weight > 0.0) {
                divkit::HardRegionSpec hard;
                hard.weight = gen.hard_weight;
                hard.center.assign(gen.dim, 0.0);
                hard.spread = gen.hard_spread;
                hard.class_offset = gen.hard_offset;
                spec.hard_region = std::move(hard);
            }
            divkit::save_dataset_csv(divkit::gen_data(spec), gen.out);
            std::cout << "wrote " << gen.out << " (" << gen.n << " demands, dim " << gen.dim
                      << ")\n";
            return 0;
        }
        if (train_cmd->parsed()) {
            divkit::LabeledDataset ds = divkit::load_dataset_csv(tr.data);
            divkit::TrainConfig cfg{tr.lr, static_cast<int>(tr.epochs), tr.l2, tr.seed};
            divkit::ScorerParams params = divkit::train(ds, cfg);
            divkit::write_text_file(tr.out, divkit::canonical_dump(divkit::to_json(params)));
            std::cout << "wrote " << tr.out << " (training loss "
                      << divkit::loss(params, ds, cfg.l2_penalty) << ")\n";
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }

    if (app.got_subcommand("cascade")) return run_experiment_command(cascade_flags, "cascade");
    if (app.got_subcommand("retrain-diff")) {
        return run_experiment_command(retrain_flags, "retraining");
    }
    if (app.got_subcommand("diversity")) return run_experiment_command(diversity_flags, "diversity");
    if (app.got_subcommand("channels")) return run_experiment_command(channels_flags, "channels");
    if (app.got_subcommand("router")) return run_experiment_command(router_flags, "router");
    return 1;
}
