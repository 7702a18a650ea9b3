// expred: ingest -> ground-truth -> features -> experiment pipeline.
//
//   expred ingest       --config cfg.json
//   expred ground-truth --config cfg.json
//   expred features     --config cfg.json
//   expred experiment   --config cfg.json [--seed N] [--label RW|POC] [--sampler KIND] [--k N]
//   expred coverage     --config cfg.json
//   expred run          --config cfg.json   (all stages in order)
//
// Exit codes: 0 success, 2 bad input or config, 3 pipeline failure.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "expred/cli/commands.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<std::string> label;
    std::optional<std::string> sampler;
    std::optional<std::size_t> k;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("-c,--config", o.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "override the base seed");
    sub->add_option("--output-dir", o.output_dir, "override the output directory");
    sub->add_option("--label", o.label, "RW or POC");
    sub->add_option("--sampler", o.sampler, "NONE, RUS, SMOTE, ADASYN or ALLKNN");
    sub->add_option("--k", o.k, "number of folds");
}

expred::cli::ExperimentConfig resolve(const Overrides& o) {
    using expred::InputError;
    auto c = expred::cli::load_config(o.config);
    if (o.seed) c.seed = *o.seed;
    if (o.output_dir) c.output_dir = std::filesystem::absolute(*o.output_dir).lexically_normal().string();
    if (o.label) {
        const auto l = expred::to_upper(*o.label);
        if (l == "RW") {
            c.label = expred::ExploitKind::Rw;
        } else if (l == "POC") {
            c.label = expred::ExploitKind::Poc;
        } else {
            throw InputError("--label must be RW or POC");
        }
    }
    if (o.sampler) {
        auto s = expred::balance::parse_sampler(*o.sampler);
        if (!s) throw InputError("unknown sampler '" + *o.sampler + "'");
        c.sampler.kind = *s;
    }
    if (o.k) {
        if (*o.k < 2) throw InputError("--k must be >= 2");
        c.k = *o.k;
    }
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exploit prediction from vulnerability and social media data"};
    app.require_subcommand(1);
    Overrides o;

    struct Stage {
        const char* name;
        const char* help;
        nlohmann::json (*run)(const expred::cli::ExperimentConfig&);
    };
    const Stage stages[] = {
        {"ingest", "parse raw sources into the normalised corpus", expred::cli::cmd_ingest},
        {"ground-truth", "merge exploit labels and write coverage reports", expred::cli::cmd_ground_truth},
        {"features", "assemble the feature matrix", expred::cli::cmd_features},
        {"experiment", "run the configured experiment", expred::cli::cmd_experiment},
        {"coverage", "write coverage-by-year and overlap reports", expred::cli::cmd_coverage},
    };
    std::vector<std::pair<CLI::App*, const Stage*>> subs;
    for (const auto& s : stages) {
        auto* sub = app.add_subcommand(s.name, s.help);
        add_common(sub, o);
        subs.emplace_back(sub, &s);
    }
    auto* run_all = app.add_subcommand("run", "ingest, ground-truth, features and experiment in order");
    add_common(run_all, o);

    CLI11_PARSE(app, argc, argv);

    std::string stage = "config";
    try {
        const auto cfg = resolve(o);
        if (run_all->parsed()) {
            for (std::size_t i = 0; i < 4; ++i) {
                stage = stages[i].name;
                expred::cli::in_stage(stage, [&] { return stages[i].run(cfg); });
            }
            std::cout << "wrote " << cfg.output_dir << "\n";
            return 0;
        }
        for (const auto& [sub, s] : subs) {
            if (!sub->parsed()) continue;
            stage = s->name;
            const auto summary = expred::cli::in_stage(stage, [&] { return s->run(cfg); });
            std::cout << summary.dump(2) << "\n";
        }
        return 0;
    } catch (const expred::InputError& e) {
        std::cerr << "expred " << stage << ": input error: " << e.what() << "\n";
        return 2;
    } catch (const expred::cli::StageError& e) {
        std::cerr << "expred " << stage << ": pipeline error in stage '" << e.stage() << "': " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "expred " << stage << ": pipeline error in stage '" << stage << "': " << e.what() << "\n";
        return 3;
    }
}
