#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavmec/env.hpp"
#include "uavmec/mappo.hpp"

namespace uavmec::harness {

struct ExperimentSpec {
    mappo::Variant variant = mappo::Variant::ab_mappo;
    std::vector<std::uint64_t> seeds{1};
    std::string output_dir = "runs/default";
    /// Save a checkpoint every n episodes in addition to the final one; 0 = final only.
    int checkpoint_every = 0;

    void validate() const;
};

struct Config {
    EnvConfig env;
    mappo::TrainConfig train;
    ExperimentSpec experiment;

    void validate() const;
};

/// Parses a JSON document with optional sections "env", "train" and
/// "experiment". Missing fields keep their defaults; unknown keys and type
/// mismatches throw ConfigError naming the dotted field path.
Config parse_config(const nlohmann::json& doc);
/// Reads and parses a file. An empty file yields the defaults.
Config load_config(const std::string& path);
/// Fully resolved config, every field present.
nlohmann::json to_json(const Config& cfg);

/// Sets one sweep axis on a config. Axes: K, M, B, varpi, deviation_rate,
/// f_max_loc, f_max_edge, L_max.
void apply_axis(Config& cfg, const std::string& axis, double value);
const std::vector<std::string>& sweep_axes();

/// Column order of metrics.csv.
const std::vector<std::string>& metric_columns();
std::vector<double> metric_values(const mappo::EpisodeMetrics& m);

/// Mean and sample standard deviation over seeds of the per-seed average of
/// the final 10% of episodes (at least one episode).
struct SummaryStat {
    std::string metric;
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t seeds = 0;
};

std::size_t tail_length(std::size_t episodes);
std::vector<SummaryStat> summarize(const std::vector<std::vector<mappo::EpisodeMetrics>>& per_seed);
const SummaryStat& find_stat(const std::vector<SummaryStat>& stats, const std::string& metric);

struct SeedRun {
    std::uint64_t seed = 0;
    std::string dir;
    std::vector<mappo::EpisodeMetrics> metrics;
    mappo::EpisodeMetrics evaluation;  // greedy episode after training
};

struct RunResult {
    std::vector<SeedRun> seeds;
    std::vector<SummaryStat> summary;
};

using Progress = std::function<void(std::uint64_t seed, const mappo::EpisodeMetrics&)>;

/// Trains every seed and writes under experiment.output_dir:
///   config.json, summary.csv, and per seed `seed_<s>/` with metrics.csv,
///   timing.csv, checkpoint.txt, trace.jsonl and evaluation.csv.
RunResult run(const Config& cfg, const Progress& progress = {});

struct SweepRow {
    double value = 0.0;
    RunResult result;
};

/// One run per value in `<output_dir>/<axis>_<value>/`, then `sweep.csv`.
std::vector<SweepRow> sweep(const Config& cfg, const std::string& axis, const std::vector<double>& values,
                            const Progress& progress = {});

/// Seed used for the greedy evaluation episode of a training seed.
std::uint64_t evaluation_seed(std::uint64_t seed);

/// Writes one JSON object per slot: positions, associations, energies.
void write_trace(const std::string& path, const mappo::Rollout& rollout);

/// Loads a checkpoint written by `run`, rolls one greedy episode and writes
/// its trace. Returns the episode metrics.
mappo::EpisodeMetrics evaluate_checkpoint(const Config& cfg, const std::string& checkpoint_path,
                                          std::uint64_t env_seed, const std::string& trace_path);

std::string format_double(double v);

}  // namespace uavmec::harness
