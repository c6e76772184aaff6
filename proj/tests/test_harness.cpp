#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "uavmec/harness.hpp"

using namespace uavmec;
using namespace uavmec::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

Config small_config(const fs::path& out, int episodes = 3) {
    Config c = parse_config(nlohmann::json::parse(R"({
        "env": {"num_mus": 3, "num_uavs": 2, "width": 500},
        "train": {"episode_length": 4, "hidden": 16, "feature_dim": 8}
    })"));
    c.train.total_steps = 4 * episodes;
    c.experiment.seeds = {1, 2};
    c.experiment.output_dir = out.string();
    return c;
}

}  // namespace

TEST_CASE("empty config yields the documented defaults") {
    const Config c = parse_config(nlohmann::json::object());
    CHECK(c.env.channel.bandwidth == 50e6);
    CHECK(c.env.mu_tx_power == 0.2);
    CHECK(c.env.d_th == 300.0);
    CHECK(c.train.episode_length == 300);
    CHECK(c.train.ppo_epochs == 5);
    CHECK(c.train.heads == 4);
    CHECK(c.experiment.variant == mappo::Variant::ab_mappo);

    TempDir d("uavmec_cfg_empty");
    const fs::path f = d.path / "empty.json";
    std::ofstream(f).close();
    const Config from_file = load_config(f.string());
    CHECK(to_json(from_file) == to_json(c));
}

TEST_CASE("config overrides, echo and rejection") {
    const Config c = parse_config(nlohmann::json::parse(
        R"({"env": {"channel": {"bandwidth": 30e6}, "bs_position": [1, 2, 3]}, "train": {"total_steps": 9e4},
            "experiment": {"variant": "ag-mappo", "seeds": [4, 5]}})"));
    CHECK(c.env.channel.bandwidth == 30e6);
    CHECK(c.env.bs_position.z == 3.0);
    CHECK(c.train.total_steps == 90000);
    CHECK(c.experiment.seeds == std::vector<std::uint64_t>{4, 5});
    const auto echoed = to_json(c);
    CHECK(echoed["env"]["channel"]["bandwidth"].get<double>() == 30e6);
    CHECK(to_json(parse_config(echoed)) == echoed);

    auto message = [](const char* text) -> std::string {
        try {
            parse_config(nlohmann::json::parse(text)).validate();
        } catch (const std::exception& e) {
            return e.what();
        }
        return "";
    };
    CHECK(message(R"({"env": {"channel": {"bandwidth": -1}}})").find("bandwidth") != std::string::npos);
    CHECK(message(R"({"env": {"bogus": 1}})").find("env.bogus") != std::string::npos);
    CHECK(message(R"({"train": {"hidden": "big"}})").find("train.hidden") != std::string::npos);
    CHECK(message(R"({"train": {"episode_length": 0}})").find("episode_length") != std::string::npos);
    CHECK(message(R"({"experiment": {"variant": "ppo"}})") != "");
    CHECK_THROWS(load_config("/nonexistent/uavmec.json"));
}

TEST_CASE("sweep axes") {
    Config c;
    apply_axis(c, "B", 70e6);
    CHECK(c.env.channel.bandwidth == 70e6);
    apply_axis(c, "K", 12);
    CHECK(c.env.num_mus == 12);
    apply_axis(c, "varpi", 0.009);
    CHECK(c.env.energy_weight == 0.009);
    apply_axis(c, "deviation_rate", 0.25);
    CHECK(c.env.deviation.enabled);
    CHECK(c.env.deviation.freq_rate == 0.25);
    CHECK(c.env.deviation.loc_rate == 0.25);
    apply_axis(c, "deviation_rate", 0.0);
    CHECK_FALSE(c.env.deviation.enabled);
    CHECK_THROWS(apply_axis(c, "nope", 1.0));
    CHECK(sweep_axes().size() == 8);
}

TEST_CASE("summary statistics") {
    CHECK(tail_length(1) == 1);
    CHECK(tail_length(9) == 1);
    CHECK(tail_length(10) == 1);
    CHECK(tail_length(11) == 2);
    CHECK(tail_length(300) == 30);
    std::vector<std::vector<mappo::EpisodeMetrics>> per(2, std::vector<mappo::EpisodeMetrics>(10));
    for (int s = 0; s < 2; ++s)
        for (int e = 0; e < 10; ++e) per[s][e].jain = s * 1.0 + (e == 9 ? 0.5 : 0.0);
    const auto st = summarize(per);
    const auto& j = find_stat(st, "jain");
    CHECK(j.mean == doctest::Approx(1.0));  // tail means 0.5 and 1.5
    CHECK(j.stddev == doctest::Approx(std::sqrt(0.5)));
    CHECK(j.seeds == 2);
    CHECK(format_double(0.009) == "0.009");
    CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("run writes reproducible outputs whose summary matches metrics.csv") {
    TempDir d("uavmec_run_test");
    Config c = small_config(d.path / "a");
    const RunResult res = run(c);
    for (const char* f : {"config.json", "summary.csv"}) CHECK(fs::exists(d.path / "a" / f));
    for (const char* f : {"metrics.csv", "timing.csv", "checkpoint.txt", "trace.jsonl", "evaluation.csv"})
        CHECK(fs::exists(d.path / "a" / "seed_1" / f));

    // recompute the summary from the CSVs
    const auto header = read_csv(d.path / "a" / "seed_1" / "metrics.csv").front();
    CHECK(header == metric_columns());
    const std::size_t col = static_cast<std::size_t>(std::find(header.begin(), header.end(), "weighted_energy") - header.begin());
    std::vector<double> tails;
    for (auto s : {1, 2}) {
        const auto rows = read_csv(d.path / "a" / ("seed_" + std::to_string(s)) / "metrics.csv");
        REQUIRE(rows.size() == 4);
        tails.push_back(std::stod(rows.back()[col]));  // tail of 3 episodes is the last one
    }
    const double mean = (tails[0] + tails[1]) / 2.0;
    const double sd = std::abs(tails[0] - tails[1]) / std::sqrt(2.0);
    std::map<std::string, std::pair<double, double>> summary;
    for (const auto& row : read_csv(d.path / "a" / "summary.csv"))
        if (row.size() >= 3 && row[0] != "metric") summary[row[0]] = {std::stod(row[1]), std::stod(row[2])};
    CHECK(std::abs(summary["weighted_energy"].first - mean) < 1e-9);
    CHECK(std::abs(summary["weighted_energy"].second - sd) < 1e-9);

    // trace has one line per slot
    std::ifstream trace(d.path / "a" / "seed_1" / "trace.jsonl");
    int lines = 0;
    for (std::string l; std::getline(trace, l); ++lines) CHECK(nlohmann::json::parse(l).contains("uavs"));
    CHECK(lines == 4);

    // rerun: byte-identical apart from wall-clock timing
    c.experiment.output_dir = (d.path / "b").string();
    run(c);
    for (const char* f : {"metrics.csv", "checkpoint.txt", "trace.jsonl", "evaluation.csv"})
        CHECK(slurp(d.path / "a" / "seed_2" / f) == slurp(d.path / "b" / "seed_2" / f));
    CHECK(slurp(d.path / "a" / "summary.csv") == slurp(d.path / "b" / "summary.csv"));

    // the checkpoint replays the same greedy episode
    const auto m = evaluate_checkpoint(c, (d.path / "a" / "seed_1" / "checkpoint.txt").string(),
                                       evaluation_seed(1), (d.path / "replay.jsonl").string());
    CHECK(m.weighted_energy == res.seeds[0].evaluation.weighted_energy);
    CHECK(slurp(d.path / "replay.jsonl") == slurp(d.path / "a" / "seed_1" / "trace.jsonl"));
}

TEST_CASE("sweeps write one row per value") {
    TempDir d("uavmec_sweep_test");
    Config c = small_config(d.path / "w", 1);
    c.experiment.seeds = {1};
    const auto rows = sweep(c, "varpi", {0.0, 0.009});
    CHECK(rows.size() == 2);
    const auto csv = read_csv(d.path / "w" / "sweep.csv");
    REQUIRE(csv.size() == 3);
    CHECK(std::find(csv[0].begin(), csv[0].end(), "mu_energy_mean") != csv[0].end());
    CHECK(std::find(csv[0].begin(), csv[0].end(), "uav_energy_mean") != csv[0].end());
    CHECK(fs::exists(d.path / "w" / "varpi_0.009" / "summary.csv"));

    c.experiment.output_dir = (d.path / "b").string();
    CHECK(read_csv(d.path / "b" / "sweep.csv").empty());
    sweep(c, "B", {30e6, 50e6, 70e6});
    CHECK(read_csv(d.path / "b" / "sweep.csv").size() == 4);

    c.experiment.output_dir = (d.path / "dev").string();
    sweep(c, "deviation_rate", {0.0, 0.25});
    CHECK(read_csv(d.path / "dev" / "sweep.csv").size() == 3);
    CHECK_THROWS(sweep(c, "B", {}));
}

TEST_CASE("random variant trains nothing") {
    TempDir d("uavmec_random_test");
    Config c = small_config(d.path / "r", 2);
    c.experiment.variant = mappo::Variant::random;
    c.experiment.seeds = {3};
    run(c);
    const nn::Checkpoint ck = nn::load_checkpoint((d.path / "r" / "seed_3" / "checkpoint.txt").string());
    CHECK(ck.meta_value("mu.actor_opt.steps") == "0");
    CHECK(ck.meta_value("uav.critic_opt.steps") == "0");
}
