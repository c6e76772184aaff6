// Command-line front end: run, sweep, evaluate, validate.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uavmec/harness.hpp"
#include "uavmec/validate.hpp"

using namespace uavmec;

namespace {

struct Common {
    std::string config;
    std::vector<std::uint64_t> seeds;
    std::string variant;
    std::string output;
    std::int64_t steps = 0;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("-c,--config", c.config, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("-s,--seed", c.seeds, "Seed(s); overrides experiment.seeds");
    cmd->add_option("-v,--variant", c.variant, "ab-mappo | b-mappo | ag-mappo | random");
    cmd->add_option("-o,--output", c.output, "Output directory");
    cmd->add_option("--steps", c.steps, "Total environment steps per seed");
    cmd->add_flag("-q,--quiet", c.quiet, "No per-episode progress");
}

harness::Config resolve(const Common& c) {
    harness::Config cfg = c.config.empty() ? harness::parse_config(nlohmann::json()) : harness::load_config(c.config);
    if (!c.seeds.empty()) cfg.experiment.seeds = c.seeds;
    if (!c.variant.empty()) cfg.experiment.variant = mappo::parse_variant(c.variant);
    if (!c.output.empty()) cfg.experiment.output_dir = c.output;
    if (c.steps > 0) cfg.train.total_steps = c.steps;
    cfg.validate();
    return cfg;
}

harness::Progress progress_printer(const Common& c, int episodes) {
    if (c.quiet) return {};
    return [episodes](std::uint64_t seed, const mappo::EpisodeMetrics& m) {
        if ((m.episode + 1) % 10 != 0 && m.episode + 1 != episodes) return;
        std::fprintf(stderr, "seed %llu ep %d/%d  mu %.3f  uav %.3f  energy %.4f  jain %.3f\n",
                     static_cast<unsigned long long>(seed), m.episode + 1, episodes, m.mean_mu_reward,
                     m.mean_uav_reward, m.weighted_energy, m.jain);
    };
}

void print_summary(const std::vector<harness::SummaryStat>& stats) {
    for (const auto& s : stats) std::printf("%-18s %14.6g +- %.6g\n", s.metric.c_str(), s.mean, s.stddev);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-UAV edge computing simulator with a MAPPO trainer"};
    app.require_subcommand(1);

    Common run_opts;
    auto* run = app.add_subcommand("run", "Train every seed and write metrics, checkpoints and traces");
    add_common(run, run_opts);

    Common sweep_opts;
    std::string axis;
    std::vector<double> values;
    auto* sweep = app.add_subcommand("sweep", "One run per axis value plus a comparative table");
    add_common(sweep, sweep_opts);
    sweep->add_option("-a,--axis", axis, "K | M | B | varpi | deviation_rate | f_max_loc | f_max_edge | L_max")
        ->required();
    sweep->add_option("--values", values, "Axis values")->required();

    Common eval_opts;
    std::string checkpoint;
    std::string trace = "trace.jsonl";
    std::optional<std::uint64_t> env_seed;
    auto* evaluate = app.add_subcommand("evaluate", "Roll one greedy episode from a checkpoint");
    evaluate->add_option("-c,--config", eval_opts.config, "JSON config (the run's echoed config.json)")
        ->check(CLI::ExistingFile);
    evaluate->add_option("--checkpoint", checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--trace", trace, "Trace output (JSON lines)");
    evaluate->add_option("--env-seed", env_seed, "Environment seed for the episode");

    bool verbose = false;
    auto* validate = app.add_subcommand("validate", "Run the fast invariant suite");
    validate->add_flag("--verbose", verbose, "Print every check");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const auto cfg = resolve(run_opts);
            const auto result = harness::run(cfg, progress_printer(run_opts, cfg.train.episodes()));
            print_summary(result.summary);
            std::printf("output: %s\n", cfg.experiment.output_dir.c_str());
        } else if (*sweep) {
            const auto cfg = resolve(sweep_opts);
            const auto rows = harness::sweep(cfg, axis, values, progress_printer(sweep_opts, cfg.train.episodes()));
            std::printf("%-14s %16s %16s %16s\n", axis.c_str(), "weighted_energy", "mu_energy", "uav_energy");
            for (const auto& r : rows)
                std::printf("%-14g %16.6g %16.6g %16.6g\n", r.value,
                            harness::find_stat(r.result.summary, "weighted_energy").mean,
                            harness::find_stat(r.result.summary, "mu_energy").mean,
                            harness::find_stat(r.result.summary, "uav_energy").mean);
            std::printf("output: %s/sweep.csv\n", cfg.experiment.output_dir.c_str());
        } else if (*evaluate) {
            const auto cfg = resolve(eval_opts);
            const std::uint64_t s = env_seed.value_or(harness::evaluation_seed(cfg.experiment.seeds.front()));
            const auto m = harness::evaluate_checkpoint(cfg, checkpoint, s, trace);
            std::printf("mean_mu_reward %.6g\nmean_uav_reward %.6g\nweighted_energy %.6g\njain %.6g\ntrace %s\n",
                        m.mean_mu_reward, m.mean_uav_reward, m.weighted_energy, m.jain, trace.c_str());
        } else if (*validate) {
            const auto report = validate::run_invariant_suite(verbose ? &std::cout : nullptr);
            for (const auto& f : report.failures) std::printf("FAIL %s\n", f.c_str());
            std::printf("%zu checks, %zu failed\n", report.checks, report.failures.size());
            return report.failures.empty() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
