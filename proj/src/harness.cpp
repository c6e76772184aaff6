#include "uavmec/harness.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "uavmec/random.hpp"

namespace uavmec::harness {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

using FieldRef = std::variant<double*, int*, std::int64_t*, bool*>;

// Dotted path (relative to the section) -> storage.
using FieldTable = std::map<std::string, FieldRef>;

FieldTable env_fields(EnvConfig& e) {
    return {
        {"num_mus", &e.num_mus},
        {"num_uavs", &e.num_uavs},
        {"width", &e.width},
        {"uav_altitude", &e.uav_altitude},
        {"bs_position.x", &e.bs_position.x},
        {"bs_position.y", &e.bs_position.y},
        {"bs_position.z", &e.bs_position.z},
        {"slot_duration", &e.slot_duration},
        {"slots_per_period", &e.slots_per_period},
        {"channel.los_a", &e.channel.los_a},
        {"channel.los_b", &e.channel.los_b},
        {"channel.ref_gain", &e.channel.ref_gain},
        {"channel.path_loss_exp", &e.channel.path_loss_exp},
        {"channel.nlos_atten", &e.channel.nlos_atten},
        {"channel.noise_density", &e.channel.noise_density},
        {"channel.bandwidth", &e.channel.bandwidth},
        {"channel.relay_bandwidth", &e.channel.relay_bandwidth},
        {"mobility.memory_speed", &e.mobility.memory_speed},
        {"mobility.memory_heading", &e.mobility.memory_heading},
        {"mobility.mean_speed", &e.mobility.mean_speed},
        {"mobility.mean_heading", &e.mobility.mean_heading},
        {"mobility.speed_noise_mean", &e.mobility.speed_noise_mean},
        {"mobility.speed_noise_var", &e.mobility.speed_noise_var},
        {"mobility.heading_noise_mean", &e.mobility.heading_noise_mean},
        {"mobility.heading_noise_var", &e.mobility.heading_noise_var},
        {"power.blade_power", &e.power.blade_power},
        {"power.induced_power", &e.power.induced_power},
        {"power.tip_speed", &e.power.tip_speed},
        {"power.rotor_velocity", &e.power.rotor_velocity},
        {"power.drag_ratio", &e.power.drag_ratio},
        {"power.solidity", &e.power.solidity},
        {"power.air_density", &e.power.air_density},
        {"power.disc_area", &e.power.disc_area},
        {"power.squared_blade_term", &e.power.squared_blade_term},
        {"tasks.bits_min", &e.tasks.bits_min},
        {"tasks.bits_max", &e.tasks.bits_max},
        {"tasks.cycles_min", &e.tasks.cycles_min},
        {"tasks.cycles_max", &e.tasks.cycles_max},
        {"deviation.freq_rate", &e.deviation.freq_rate},
        {"deviation.loc_rate", &e.deviation.loc_rate},
        {"deviation.enabled", &e.deviation.enabled},
        {"deviation.perturb_own_position", &e.deviation.perturb_own_position},
        {"mu_tx_power", &e.mu_tx_power},
        {"uav_tx_power", &e.uav_tx_power},
        {"capacitance", &e.capacitance},
        {"f_max_local", &e.f_max_local},
        {"f_max_edge", &e.f_max_edge},
        {"v_max", &e.v_max},
        {"a_max", &e.a_max},
        {"d_min", &e.d_min},
        {"d_th", &e.d_th},
        {"energy_weight", &e.energy_weight},
        {"penalty_latency", &e.penalty_latency},
        {"penalty_boundary", &e.penalty_boundary},
        {"penalty_collision", &e.penalty_collision},
    };
}

FieldTable train_fields(mappo::TrainConfig& t) {
    return {
        {"total_steps", &t.total_steps},
        {"episode_length", &t.episode_length},
        {"ppo_epochs", &t.ppo_epochs},
        {"minibatches", &t.minibatches},
        {"actor_lr", &t.actor_lr},
        {"critic_lr", &t.critic_lr},
        {"clip_eps", &t.clip_eps},
        {"gae_lambda", &t.gae_lambda},
        {"entropy_coef", &t.entropy_coef},
        {"max_grad_norm", &t.max_grad_norm},
        {"gamma_mu", &t.gamma_mu},
        {"gamma_uav", &t.gamma_uav},
        {"hidden", &t.hidden},
        {"feature_dim", &t.feature_dim},
        {"heads", &t.heads},
    };
}

void assign(const FieldRef& ref, const json& v, const std::string& path) {
    auto fail = [&](const char* want) { throw ConfigError(path + ": expected " + want + ", got " + v.dump()); };
    std::visit(
        [&](auto* p) {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) fail("a boolean");
                *p = v.get<bool>();
            } else if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) fail("a number");
                *p = v.get<double>();
            } else {
                if (v.is_number_integer()) {
                    *p = v.get<T>();
                } else if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>() &&
                           std::abs(v.get<double>()) < 9e15) {
                    *p = static_cast<T>(v.get<double>());  // accept 9e4 style integers
                } else {
                    fail("an integer");
                }
            }
        },
        ref);
}

void bind_object(const json& obj, const FieldTable& table, const std::string& section, const std::string& prefix) {
    if (!obj.is_object()) throw ConfigError(section + (prefix.empty() ? "" : "." + prefix) + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        const std::string path = prefix.empty() ? key : prefix + "." + key;
        if (auto it = table.find(path); it != table.end()) {
            assign(it->second, value, section + "." + path);
            continue;
        }
        // bs_position may also be given as [x, y, z].
        if (path == "bs_position" && value.is_array()) {
            if (value.size() != 3) throw ConfigError(section + ".bs_position: expected 3 coordinates");
            const char* axes[] = {"x", "y", "z"};
            for (int i = 0; i < 3; ++i)
                assign(table.at(path + "." + axes[i]), value[i], section + "." + path + "." + axes[i]);
            continue;
        }
        const bool is_group = std::any_of(table.begin(), table.end(),
                                          [&](const auto& f) { return f.first.rfind(path + ".", 0) == 0; });
        if (!is_group) throw ConfigError("unknown key: " + section + "." + path);
        bind_object(value, table, section, path);
    }
}

void emit(json& out, const FieldTable& table) {
    for (const auto& [path, ref] : table) {
        json* node = &out;
        std::size_t start = 0;
        for (std::size_t dot; (dot = path.find('.', start)) != std::string::npos; start = dot + 1)
            node = &(*node)[path.substr(start, dot - start)];
        std::visit([&](auto* p) { (*node)[path.substr(start)] = *p; }, ref);
    }
}

std::string seed_dir(const std::string& root, std::uint64_t seed) {
    return (fs::path(root) / ("seed_" + std::to_string(seed))).string();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    return f;
}

void write_metric_header(std::ostream& os) {
    const auto& cols = metric_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
}

void write_metric_row(std::ostream& os, const mappo::EpisodeMetrics& m) {
    os << m.episode << ',' << m.steps;
    const auto vals = metric_values(m);
    for (std::size_t i = 2; i < vals.size(); ++i) os << ',' << format_double(vals[i]);
    os << '\n';
}

std::string axis_label(const std::string& axis, double value) { return axis + "_" + format_double(value); }

}  // namespace

// Shortest text that parses back to the same double.
std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void ExperimentSpec::validate() const {
    if (seeds.empty()) throw ConfigError("experiment.seeds: at least one seed is required");
    std::vector<std::uint64_t> sorted = seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ConfigError("experiment.seeds: seeds must be distinct");
    if (output_dir.empty()) throw ConfigError("experiment.output_dir: must not be empty");
    if (checkpoint_every < 0) throw ConfigError("experiment.checkpoint_every: must be >= 0");
}

void Config::validate() const {
    try {
        env.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("env.") + e.what());
    }
    try {
        train.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("train.") + e.what());
    }
    experiment.validate();
}

Config parse_config(const json& doc) {
    Config cfg;
    if (doc.is_null()) return cfg;
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    for (const auto& [key, value] : doc.items()) {
        if (key == "env") {
            bind_object(value, env_fields(cfg.env), "env", "");
        } else if (key == "train") {
            bind_object(value, train_fields(cfg.train), "train", "");
        } else if (key == "experiment") {
            if (!value.is_object()) throw ConfigError("experiment: expected an object");
            for (const auto& [k, v] : value.items()) {
                const std::string path = "experiment." + k;
                if (k == "variant") {
                    if (!v.is_string()) throw ConfigError(path + ": expected a string");
                    try {
                        cfg.experiment.variant = mappo::parse_variant(v.get<std::string>());
                    } catch (const std::invalid_argument& e) {
                        throw ConfigError(path + ": " + e.what());
                    }
                } else if (k == "seeds") {
                    if (!v.is_array()) throw ConfigError(path + ": expected an array of integers");
                    cfg.experiment.seeds.clear();
                    for (const auto& s : v) {
                        if (!s.is_number_unsigned()) throw ConfigError(path + ": expected non-negative integers");
                        cfg.experiment.seeds.push_back(s.get<std::uint64_t>());
                    }
                } else if (k == "output_dir") {
                    if (!v.is_string()) throw ConfigError(path + ": expected a string");
                    cfg.experiment.output_dir = v.get<std::string>();
                } else if (k == "checkpoint_every") {
                    assign(FieldRef{&cfg.experiment.checkpoint_every}, v, path);
                } else {
                    throw ConfigError("unknown key: " + path);
                }
            }
        } else {
            throw ConfigError("unknown key: " + key);
        }
    }
    cfg.validate();
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string text = ss.str();
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }))
        return parse_config(json());
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(doc);
}

json to_json(const Config& cfg) {
    Config copy = cfg;  // the field tables need mutable storage
    json out;
    emit(out["env"], env_fields(copy.env));
    emit(out["train"], train_fields(copy.train));
    out["experiment"] = {{"variant", mappo::to_string(cfg.experiment.variant)},
                         {"seeds", cfg.experiment.seeds},
                         {"output_dir", cfg.experiment.output_dir},
                         {"checkpoint_every", cfg.experiment.checkpoint_every}};
    return out;
}

const std::vector<std::string>& sweep_axes() {
    static const std::vector<std::string> axes{"K", "M", "B", "varpi", "deviation_rate", "f_max_loc", "f_max_edge",
                                               "L_max"};
    return axes;
}

void apply_axis(Config& cfg, const std::string& axis, double value) {
    auto as_count = [&](const char* name) {
        if (value < 1 || std::floor(value) != value) throw ConfigError(std::string(name) + ": sweep value must be a positive integer");
        return static_cast<int>(value);
    };
    if (axis == "K") {
        cfg.env.num_mus = as_count("K");
    } else if (axis == "M") {
        cfg.env.num_uavs = as_count("M");
    } else if (axis == "B") {
        cfg.env.channel.bandwidth = value;
    } else if (axis == "varpi") {
        cfg.env.energy_weight = value;
    } else if (axis == "deviation_rate") {
        cfg.env.deviation.freq_rate = value;
        cfg.env.deviation.loc_rate = value;
        cfg.env.deviation.enabled = value > 0.0;
    } else if (axis == "f_max_loc") {
        cfg.env.f_max_local = value;
    } else if (axis == "f_max_edge") {
        cfg.env.f_max_edge = value;
    } else if (axis == "L_max") {
        cfg.env.tasks.bits_max = value;
    } else {
        throw ConfigError("unknown sweep axis '" + axis + "'");
    }
}

const std::vector<std::string>& metric_columns() {
    static const std::vector<std::string> cols{
        "episode",          "steps",           "mean_mu_reward",    "mean_uav_reward",  "weighted_energy",
        "mu_energy",        "uav_energy",      "jain",              "penalty_latency",  "penalty_boundary",
        "penalty_collision", "penalty_distance"};
    return cols;
}

std::vector<double> metric_values(const mappo::EpisodeMetrics& m) {
    return {static_cast<double>(m.episode), static_cast<double>(m.steps), m.mean_mu_reward, m.mean_uav_reward,
            m.weighted_energy, m.mu_energy, m.uav_energy, m.jain, m.penalty_latency, m.penalty_boundary,
            m.penalty_collision, m.penalty_distance};
}

std::size_t tail_length(std::size_t episodes) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(episodes))));
}

std::vector<SummaryStat> summarize(const std::vector<std::vector<mappo::EpisodeMetrics>>& per_seed) {
    const auto& cols = metric_columns();
    std::vector<SummaryStat> out;
    for (std::size_t c = 2; c < cols.size(); ++c) {
        std::vector<double> seed_means;
        for (const auto& rows : per_seed) {
            if (rows.empty()) continue;
            const std::size_t tail = tail_length(rows.size());
            double s = 0.0;
            for (std::size_t i = rows.size() - tail; i < rows.size(); ++i) s += metric_values(rows[i])[c];
            seed_means.push_back(s / static_cast<double>(tail));
        }
        SummaryStat st;
        st.metric = cols[c];
        st.seeds = seed_means.size();
        if (!seed_means.empty()) {
            st.mean = std::accumulate(seed_means.begin(), seed_means.end(), 0.0) / static_cast<double>(st.seeds);
            if (st.seeds > 1) {
                double ss = 0.0;
                for (double v : seed_means) ss += (v - st.mean) * (v - st.mean);
                st.stddev = std::sqrt(ss / static_cast<double>(st.seeds - 1));
            }
        }
        out.push_back(st);
    }
    return out;
}

const SummaryStat& find_stat(const std::vector<SummaryStat>& stats, const std::string& metric) {
    for (const auto& s : stats)
        if (s.metric == metric) return s;
    throw std::out_of_range("no summary statistic " + metric);
}

std::uint64_t evaluation_seed(std::uint64_t seed) { return keyed_stream(seed, {0xe7a1ULL})(); }

void write_trace(const std::string& path, const mappo::Rollout& rollout) {
    auto f = open_out(path);
    for (const auto& rep : rollout.reports) {
        json row;
        row["slot"] = rep.slot;
        json mus = json::array();
        for (std::size_t k = 0; k < rep.mu_positions.size(); ++k) {
            const auto& a = rep.mu_actions[k];
            mus.push_back({{"x", rep.mu_positions[k].x},
                           {"y", rep.mu_positions[k].y},
                           {"assoc", a.assoc},
                           {"relay", a.relay_to_bs},
                           {"rho", a.rho},
                           {"energy", rep.mu_energy[k]}});
        }
        json uavs = json::array();
        for (std::size_t m = 0; m < rep.uav_positions.size(); ++m)
            uavs.push_back({{"x", rep.uav_positions[m].x},
                            {"y", rep.uav_positions[m].y},
                            {"z", rep.uav_positions[m].z},
                            {"energy", rep.uav_energy[m]}});
        row["mus"] = std::move(mus);
        row["uavs"] = std::move(uavs);
        row["objective"] = rep.objective;
        row["jain"] = rep.jain;
        f << row.dump() << '\n';
    }
}

RunResult run(const Config& cfg, const Progress& progress) {
    cfg.validate();
    const auto& spec = cfg.experiment;
    fs::create_directories(spec.output_dir);
    open_out((fs::path(spec.output_dir) / "config.json").string()) << to_json(cfg).dump(2) << '\n';

    RunResult result;
    for (std::uint64_t seed : spec.seeds) {
        SeedRun sr;
        sr.seed = seed;
        sr.dir = seed_dir(spec.output_dir, seed);
        fs::create_directories(sr.dir);
        auto metrics = open_out((fs::path(sr.dir) / "metrics.csv").string());
        auto timing = open_out((fs::path(sr.dir) / "timing.csv").string());
        write_metric_header(metrics);
        timing << "episode,wall_seconds\n";

        mappo::Trainer trainer(cfg.env, cfg.train, spec.variant, seed);
        const int episodes = cfg.train.episodes();
        const std::string ckpt_path = (fs::path(sr.dir) / "checkpoint.txt").string();
        for (int e = 0; e < episodes; ++e) {
            const auto t0 = std::chrono::steady_clock::now();
            mappo::EpisodeMetrics m = trainer.run_episode();
            const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            write_metric_row(metrics, m);
            timing << m.episode << ',' << format_double(wall) << '\n';
            if (spec.checkpoint_every > 0 && (e + 1) % spec.checkpoint_every == 0 && e + 1 < episodes)
                nn::save_checkpoint(ckpt_path, trainer.checkpoint());
            if (progress) progress(seed, m);
            sr.metrics.push_back(m);
        }
        metrics.flush();
        nn::save_checkpoint(ckpt_path, trainer.checkpoint());

        const mappo::Rollout eval = trainer.evaluate(evaluation_seed(seed));
        sr.evaluation = mappo::summarize_episode(eval, trainer.episodes_done(), trainer.steps_done());
        write_trace((fs::path(sr.dir) / "trace.jsonl").string(), eval);
        auto ev = open_out((fs::path(sr.dir) / "evaluation.csv").string());
        write_metric_header(ev);
        write_metric_row(ev, sr.evaluation);
        result.seeds.push_back(std::move(sr));
    }

    std::vector<std::vector<mappo::EpisodeMetrics>> per_seed;
    for (const auto& s : result.seeds) per_seed.push_back(s.metrics);
    result.summary = summarize(per_seed);
    auto summary = open_out((fs::path(spec.output_dir) / "summary.csv").string());
    summary << "metric,mean,std,seeds\n";
    for (const auto& s : result.summary)
        summary << s.metric << ',' << format_double(s.mean) << ',' << format_double(s.stddev) << ',' << s.seeds << '\n';
    return result;
}

std::vector<SweepRow> sweep(const Config& cfg, const std::string& axis, const std::vector<double>& values,
                            const Progress& progress) {
    if (std::find(sweep_axes().begin(), sweep_axes().end(), axis) == sweep_axes().end())
        throw ConfigError("unknown sweep axis '" + axis + "'");
    if (values.empty()) throw ConfigError("sweep: at least one value is required");
    std::vector<SweepRow> rows;
    for (double v : values) {
        Config c = cfg;
        apply_axis(c, axis, v);
        c.experiment.output_dir = (fs::path(cfg.experiment.output_dir) / axis_label(axis, v)).string();
        rows.push_back({v, run(c, progress)});
    }
    fs::create_directories(cfg.experiment.output_dir);
    auto f = open_out((fs::path(cfg.experiment.output_dir) / "sweep.csv").string());
    const std::vector<std::string> reported{"weighted_energy", "mu_energy",       "uav_energy",
                                            "mean_mu_reward",  "mean_uav_reward", "jain"};
    f << "axis,value";
    for (const auto& r : reported) f << ',' << r << "_mean," << r << "_std";
    f << ",seeds\n";
    for (const auto& row : rows) {
        f << axis << ',' << format_double(row.value);
        for (const auto& r : reported) {
            const auto& s = find_stat(row.result.summary, r);
            f << ',' << format_double(s.mean) << ',' << format_double(s.stddev);
        }
        f << ',' << row.result.seeds.size() << '\n';
    }
    return rows;
}

mappo::EpisodeMetrics evaluate_checkpoint(const Config& cfg, const std::string& checkpoint_path,
                                          std::uint64_t env_seed, const std::string& trace_path) {
    const nn::Checkpoint ckpt = nn::load_checkpoint(checkpoint_path);
    const mappo::Variant variant = mappo::parse_variant(ckpt.meta_value("variant"));
    mappo::Trainer trainer(cfg.env, cfg.train, variant, std::stoull(ckpt.meta_value("seed")));
    trainer.restore(ckpt);
    const mappo::Rollout r = trainer.evaluate(env_seed);
    if (!trace_path.empty()) write_trace(trace_path, r);
    return mappo::summarize_episode(r, trainer.episodes_done(), trainer.steps_done());
}

}  // namespace uavmec::harness
