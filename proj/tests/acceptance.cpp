// Acceptance run: one PASS/FAIL line per criterion. Closed-form and oracle
// checks come first, then the desk-profile training runs.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavmec/distributions.hpp"
#include "uavmec/env.hpp"
#include "uavmec/harness.hpp"
#include "uavmec/mappo.hpp"
#include "uavmec/physics.hpp"
#include "uavmec/tasking.hpp"

using namespace uavmec;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += pass ? 0 : 1;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---------------------------------------------------------------- analytic

void hover_energy() {
    const tasking::UavPowerParams pp;
    const double e = tasking::propulsion_energy(0.0, pp, 1.0);
    report(1, std::abs(e - (39.04 + 79.07)) < 1e-9, fmt("E(0) = %.12f J, expected 118.11", e));
}

void los_anchor() {
    double worst = 0.0;
    for (double b : {0.01, 0.1, 0.5, 1.0, 2.0, 7.5}) worst = std::max(worst, std::abs(physics::los_probability(15.0, 15.0, b) - 0.0625));
    report(2, worst <= 1e-12, fmt("max |P_LoS - 1/16| = %.3g over 6 values of b", worst));
}

void dvfs_identity() {
    SplitMix64 rng(101);
    const tasking::TaskRanges ranges;
    const double dt = 1.0;
    int feasible = 0, wrong = 0;
    for (int i = 0; i < 1000; ++i) {
        const tasking::TaskSpec t = tasking::generate_task(rng, ranges, dt);
        const double rho = rng.uniform() < 0.5 ? 0.0 : rng.uniform();
        const double y = (1.0 - rho) * t.cycles();
        const double f_max = 1e8 + rng.uniform() * 1.5e9;
        const double f = tasking::required_local_frequency(t, rho, dt, f_max);
        const double time = tasking::local_compute(t, rho, f, 0.0, 1e-27).time;
        if (y / dt <= f_max) {
            ++feasible;
            wrong += std::abs(time - dt) > 1e-9;
        } else {
            wrong += time <= dt;  // at the cap the deadline must be missed
        }
    }
    report(3, wrong == 0, fmt("%d feasible / %d infeasible tasks, %d mismatches", feasible, 1000 - feasible, wrong));
}

void latency_gap_identity() {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double y = 5e5 * (1.0 + u(rng)) * (500.0 + 500.0 * u(rng));
        const double fe = std::pow(10.0, 8.0 + 2.0 * u(rng));
        const double fd = (u(rng) - 0.5) * fe;  // actual frequency stays positive
        const double exact = y / (fe + fd);
        worst = std::max(worst, std::abs(y / fe + tasking::latency_gap(y, fe, fd) - exact) / exact);
    }
    report(4, worst <= 1e-12, fmt("max relative error %.3g over 10^4 cases", worst));
}

void gae_oracle() {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
        const int T = 10;
        std::vector<double> r(T), v(T);
        for (auto& x : r) x = u(rng);
        for (auto& x : v) x = u(rng);
        const double boot = u(rng);
        const double g = 0.5 + 0.25 * (u(rng) + 1.0);
        const double l = 0.5 * (u(rng) + 1.0);
        const auto res = mappo::compute_gae(r, v, boot, g, l);
        for (int t = 0; t < T; ++t) {
            double adv = 0.0;
            for (int j = t; j < T; ++j) {
                const double next = j + 1 < T ? v[j + 1] : boot;
                adv += std::pow(g * l, j - t) * (r[j] + g * next - v[j]);
            }
            worst = std::max(worst, std::abs(adv - res.advantages[t]));
        }
    }
    report(5, worst <= 1e-12, fmt("max |GAE - double sum| = %.3g over 100 sequences", worst));
}

// Central differences, written out here rather than borrowed from the library.
double fd_rel_error(const std::function<double()>& loss, const std::vector<nn::Matrix*>& params,
                    const nn::Grads& analytic) {
    double worst = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p)
        for (std::size_t i = 0; i < params[p]->size(); ++i) {
            double& w = params[p]->data()[i];
            const double saved = w;
            const double h = 1e-5 * std::max(1.0, std::abs(saved));
            w = saved + h;
            const double up = loss();
            w = saved - h;
            const double down = loss();
            w = saved;
            const double num = (up - down) / (2.0 * h);
            const double ana = analytic[p].data()[i];
            worst = std::max(worst, std::abs(num - ana) / std::max({std::abs(num), std::abs(ana), 1e-6}));
        }
    return worst;
}

void gradient_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    nn::Rng rng(404);
    std::normal_distribution<double> nd(0.0, 1.0);
    EnvConfig env;
    env.num_mus = 3;
    env.num_uavs = 2;
    std::vector<std::string> parts;
    bool ok = true;

    for (nn::HeadKind kind : {nn::HeadKind::beta, nn::HeadKind::gaussian}) {
        for (int type = 0; type < 2; ++type) {
            const std::size_t obs_dim = static_cast<std::size_t>(type == 0 ? env.mu_obs_dim() : env.uav_obs_dim());
            const std::size_t act_dim = static_cast<std::size_t>(type == 0 ? env.mu_action_dim() : env.uav_action_dim());
            const std::size_t rows = type == 0 ? 3 * 4 : 2 * 4;
            nn::Actor actor(obs_dim, act_dim, 16, kind);
            actor.init(rng);
            for (nn::Matrix* p : actor.parameters())
                for (double& v : p->values()) v += 0.3 * nd(rng);
            nn::Matrix obs(rows, obs_dim);
            for (double& v : obs.values()) v = nd(rng);
            const auto s = actor.act(obs, rng);
            std::vector<double> old(rows), adv(rows);
            for (std::size_t i = 0; i < rows; ++i) {
                old[i] = s.log_prob[i] + 0.05 * nd(rng);
                adv[i] = nd(rng);
            }
            nn::Grads g;
            mappo::actor_loss(actor, obs, s.raw, old, adv, 0.2, 0.01, &g);
            const double err = fd_rel_error(
                [&] { return mappo::actor_loss(actor, obs, s.raw, old, adv, 0.2, 0.01, nullptr).loss; },
                actor.parameters(), g);
            ok &= err < 1e-4;
            parts.push_back(fmt("%s %s actor %.2g", kind == nn::HeadKind::beta ? "beta" : "gauss", type == 0 ? "mu" : "uav", err));
        }
    }

    for (nn::AgentType owner : {nn::AgentType::mu, nn::AgentType::uav}) {
        nn::CriticShape shape;
        shape.num_mus = 3;
        shape.num_uavs = 2;
        shape.mu_obs_dim = static_cast<std::size_t>(env.mu_obs_dim());
        shape.uav_obs_dim = static_cast<std::size_t>(env.uav_obs_dim());
        shape.hidden = 16;
        shape.feature_dim = 8;
        shape.heads = 4;
        nn::CentralCritic critic(owner, shape);
        critic.init(rng);
        nn::GlobalStates st;
        st.num_mus = 3;
        st.num_uavs = 2;
        st.mu_obs = nn::Matrix(3 * 3, shape.mu_obs_dim);
        st.uav_obs = nn::Matrix(3 * 2, shape.uav_obs_dim);
        for (double& v : st.mu_obs.values()) v = nd(rng);
        for (double& v : st.uav_obs.values()) v = nd(rng);
        std::vector<double> targets(3 * critic.agents_per_state());
        for (double& t : targets) t = nd(rng);
        nn::Grads g;
        mappo::critic_loss(critic, st, targets, &g);
        const double err =
            fd_rel_error([&] { return mappo::critic_loss(critic, st, targets, nullptr); }, critic.parameters(), g);
        ok &= err < 1e-4;
        parts.push_back(fmt("%s critic %.2g", owner == nn::AgentType::mu ? "mu" : "uav", err));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok &= secs < 60.0;
    std::string detail;
    for (const auto& p : parts) detail += p + "; ";
    report(6, ok, detail + fmt("%.1f s", secs));
}

void beta_checks() {
    const std::vector<double> grid{1.0, 1.5, 2.5, 4.0, 9.0};
    double worst_q = 0.0;
    double worst_z = 0.0;
    std::mt19937_64 rng(505);
    for (double a : grid)
        for (double b : grid) {
            const int n = 20000;  // composite Simpson
            double s = 0.0;
            for (int i = 0; i <= n; ++i) {
                const double x = static_cast<double>(i) / n;
                const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
                s += w * std::exp(nn::beta_log_prob({a, b}, x));  // endpoints are clamped inside
            }
            worst_q = std::max(worst_q, std::abs(s / (3.0 * n) - 1.0));

            const int draws = 100000;
            double sum = 0.0;
            for (int i = 0; i < draws; ++i) sum += nn::beta_sample({a, b}, rng);
            const double mean = a / (a + b);
            const double se = std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1.0)) / draws);
            worst_z = std::max(worst_z, std::abs(sum / draws - mean) / se);
        }
    report(7, worst_q <= 1e-6 && worst_z <= 3.0,
           fmt("max |integral - 1| = %.3g, max |sample mean - a/(a+b)| = %.2f SE (5x5 grid)", worst_q, worst_z));
}

// Independent reading of the decision constraints.
std::size_t violations(const EnvConfig& c, const std::vector<MuAction>& mu, const std::vector<UavAction>& uav) {
    std::size_t bad = 0;
    const int K = c.num_mus, M = c.num_uavs;
    for (const auto& a : mu) {
        int chosen = 0;  // one-hot association over {local, UAV 1..M}
        for (int m = 0; m <= M; ++m) chosen += a.assoc == m;
        bad += chosen != 1;
        bad += (a.rho > 0.0 ? 1 : 0) != (a.assoc != 0 ? 1 : 0);
        bad += a.rho < 0.0 || a.rho > 1.0;
        bad += a.relay_to_bs && a.assoc == 0;
    }
    double total = 0.0;
    for (int m = 0; m < M; ++m) {
        double freq = 0.0;
        for (int k = 0; k < K; ++k) {
            const bool served = mu[k].assoc == m + 1;
            const bool computes = served && !mu[k].relay_to_bs;
            bad += (uav[m].bandwidth[k] > 0.0) != served;
            bad += (uav[m].freq[k] > 0.0) != computes;
            bad += uav[m].bandwidth[k] < 0.0 || uav[m].freq[k] < 0.0;
            total += uav[m].bandwidth[k];  // UAV-major, the order the budget is enforced in
            freq += uav[m].freq[k];
        }
        bad += freq > c.f_max_edge;
        bad += std::hypot(uav[m].accel.x, uav[m].accel.y) > c.a_max * (1.0 + 4e-16);
    }
    bad += total > c.channel.bandwidth;
    return bad;
}

EnvConfig desk_env() {
    EnvConfig e;
    e.num_mus = 6;
    e.num_uavs = 2;
    e.width = 500.0;
    return e;
}

void constraint_fuzz() {
    std::mt19937_64 rng(606);
    std::size_t bad = 0;
    int n = 0;
    for (const EnvConfig& c : {desk_env(), EnvConfig{}}) {
        for (int i = 0; i < 5000; ++i, ++n) {
            // half in the policy range, half well outside it
            std::uniform_real_distribution<double> u(i % 2 ? -1.0 : 0.0, i % 2 ? 2.0 : 1.0);
            std::vector<MuAction> mu;
            for (int k = 0; k < c.num_mus; ++k) {
                std::vector<double> raw(static_cast<std::size_t>(c.mu_action_dim()));
                for (auto& x : raw) x = u(rng);
                mu.push_back(remap_mu_action(raw, c.num_uavs));
            }
            std::vector<std::vector<double>> raw(static_cast<std::size_t>(c.num_uavs),
                                                 std::vector<double>(static_cast<std::size_t>(c.uav_action_dim())));
            for (auto& v : raw)
                for (auto& x : v) x = u(rng);
            bad += violations(c, mu, remap_uav_actions(raw, mu, c));
        }
    }
    report(8, bad == 0, fmt("%d random joint actions (desk and full scale), %zu violations", n, bad));
}

void kinematics() {
    std::size_t bad = 0;
    double vmax_seen = 0.0;
    for (const EnvConfig& c : {desk_env(), EnvConfig{}}) {
        MecEnv env(c);
        env.reset(707);
        std::mt19937_64 rng(708);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int t = 0; t < 1000; ++t) {
            // random phases interleaved with full-thrust pushes into a wall
            const bool push = (t / 50) % 3 == 2;
            std::vector<MuAction> mu;
            for (int k = 0; k < c.num_mus; ++k) {
                std::vector<double> raw(static_cast<std::size_t>(c.mu_action_dim()));
                for (auto& x : raw) x = u(rng);
                mu.push_back(remap_mu_action(raw, c.num_uavs));
            }
            std::vector<std::vector<double>> raw(static_cast<std::size_t>(c.num_uavs),
                                                 std::vector<double>(static_cast<std::size_t>(c.uav_action_dim())));
            for (auto& v : raw) {
                for (auto& x : v) x = u(rng);
                if (push) v[0] = v[1] = 1.0;
            }
            env.step(mu, remap_uav_actions(raw, mu, c));
            const double W = c.width;
            for (const auto& s : env.state().uavs) {
                vmax_seen = std::max(vmax_seen, s.velocity.norm());
                bad += s.velocity.norm() > c.v_max + 1e-9;
                bad += s.position.x < 0.0 || s.position.x > W || s.position.y < 0.0 || s.position.y > W;
            }
            for (const auto& m : env.state().mus)
                bad += m.kin.position.x < 0.0 || m.kin.position.x > W || m.kin.position.y < 0.0 || m.kin.position.y > W;
        }
    }
    report(9, bad == 0, fmt("2 x 1000-step rollouts, max UAV speed %.6f m/s, %zu violations", vmax_seen, bad));
}

// ---------------------------------------------------------------- training runs

struct Runs {
    fs::path root;
    harness::Config base;
    std::map<std::string, harness::RunResult> done;

    const harness::RunResult& get(const std::string& name, const std::function<void(harness::Config&)>& edit) {
        auto it = done.find(name);
        if (it != done.end()) return it->second;
        harness::Config c = base;
        edit(c);
        c.experiment.output_dir = (root / name).string();
        const int episodes = c.train.episodes();
        const auto t0 = std::chrono::steady_clock::now();
        auto res = harness::run(c, [&](std::uint64_t seed, const mappo::EpisodeMetrics& m) {
            if ((m.episode + 1) % 100 == 0)
                std::fprintf(stderr, "[%s] seed %llu episode %d/%d energy %.4f\n", name.c_str(),
                             static_cast<unsigned long long>(seed), m.episode + 1, episodes, m.weighted_energy);
        });
        std::fprintf(stderr, "[%s] done in %.0f s\n", name.c_str(),
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        return done.emplace(name, std::move(res)).first->second;
    }
};

// Per-seed mean of `metric` over episodes [lo, hi).
double window_mean(const harness::SeedRun& s, double mappo::EpisodeMetrics::*metric, std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += s.metrics[i].*metric;
    return acc / static_cast<double>(hi - lo);
}

struct Stat {
    double mean = 0.0;
    double sd = 0.0;
};

// Mean and sample std over seeds of the final-10% average, recomputed here.
Stat final_stat(const harness::RunResult& r, double mappo::EpisodeMetrics::*metric) {
    std::vector<double> v;
    for (const auto& s : r.seeds) {
        const std::size_t n = s.metrics.size();
        const std::size_t tail = std::max<std::size_t>(1, (n + 9) / 10);
        v.push_back(window_mean(s, metric, n - tail, n));
    }
    Stat st;
    st.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - st.mean) * (x - st.mean);
        st.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return st;
}

void learning(Runs& runs) {
    const auto& ab = runs.get("ab-mappo", [](harness::Config&) {});
    const auto& rnd = runs.get("random", [](harness::Config& c) { c.experiment.variant = mappo::Variant::random; });

    bool improved = true;
    std::string detail;
    for (const auto& s : ab.seeds) {
        const std::size_t n = s.metrics.size();
        const std::size_t w = std::max<std::size_t>(1, (n + 9) / 10);
        const double mu0 = window_mean(s, &mappo::EpisodeMetrics::mean_mu_reward, 0, w);
        const double mu1 = window_mean(s, &mappo::EpisodeMetrics::mean_mu_reward, n - w, n);
        const double u0 = window_mean(s, &mappo::EpisodeMetrics::mean_uav_reward, 0, w);
        const double u1 = window_mean(s, &mappo::EpisodeMetrics::mean_uav_reward, n - w, n);
        improved &= mu1 > mu0 && u1 > u0;
        detail += fmt("seed %llu MU %.1f->%.1f UAV %.1f->%.1f; ", static_cast<unsigned long long>(s.seed), mu0, mu1, u0, u1);
    }
    const Stat e_ab = final_stat(ab, &mappo::EpisodeMetrics::weighted_energy);
    const Stat e_rnd = final_stat(rnd, &mappo::EpisodeMetrics::weighted_energy);
    const double ratio = e_ab.mean / e_rnd.mean;
    report(10, improved && ratio <= 0.85,
           detail + fmt("final weighted energy AB %.4f vs random %.4f (ratio %.3f, need <= 0.85)", e_ab.mean,
                        e_rnd.mean, ratio));
}

void ablation(Runs& runs) {
    const auto& ab = runs.get("ab-mappo", [](harness::Config&) {});
    const auto& ag = runs.get("ag-mappo", [](harness::Config& c) { c.experiment.variant = mappo::Variant::ag_mappo; });
    bool pass = true;
    bool overlap_only = false;
    std::string detail;
    for (auto [label, metric] : {std::pair{"MU", &mappo::EpisodeMetrics::mean_mu_reward},
                                 std::pair{"UAV", &mappo::EpisodeMetrics::mean_uav_reward}}) {
        const Stat a = final_stat(ab, metric);
        const Stat g = final_stat(ag, metric);
        detail += fmt("%s reward AB %.2f +- %.2f vs AG %.2f +- %.2f; ", label, a.mean, a.sd, g.mean, g.sd);
        if (a.mean >= g.mean) continue;
        if (g.mean - a.mean <= std::max(a.sd, g.sd)) overlap_only = true;
        else pass = false;
    }
    if (pass && overlap_only) detail += "AB below AG but within 1 std overlap (reported, not failed)";
    report(11, pass, detail);
}

void bandwidth_trend(Runs& runs) {
    const auto& b30 = runs.get("B_30e6", [](harness::Config& c) { harness::apply_axis(c, "B", 30e6); });
    const auto& b50 = runs.get("ab-mappo", [](harness::Config&) {});
    const auto& b70 = runs.get("B_70e6", [](harness::Config& c) { harness::apply_axis(c, "B", 70e6); });
    const Stat s[3] = {final_stat(b30, &mappo::EpisodeMetrics::mu_energy), final_stat(b50, &mappo::EpisodeMetrics::mu_energy),
                       final_stat(b70, &mappo::EpisodeMetrics::mu_energy)};
    bool ok = true;
    for (int i = 0; i + 1 < 3; ++i) {
        const double pooled = std::sqrt(0.5 * (s[i].sd * s[i].sd + s[i + 1].sd * s[i + 1].sd));
        ok &= s[i + 1].mean <= s[i].mean + pooled;
    }
    report(12, ok,
           fmt("final MU energy per slot: 30 MHz %.4f +- %.4f, 50 MHz %.4f +- %.4f, 70 MHz %.4f +- %.4f", s[0].mean,
               s[0].sd, s[1].mean, s[1].sd, s[2].mean, s[2].sd));
}

void deviation_trend(Runs& runs) {
    const auto& d0 = runs.get("ab-mappo", [](harness::Config&) {});
    const auto& d25 = runs.get("deviation_0.25", [](harness::Config& c) { harness::apply_axis(c, "deviation_rate", 0.25); });
    const Stat a = final_stat(d0, &mappo::EpisodeMetrics::weighted_energy);
    const Stat b = final_stat(d25, &mappo::EpisodeMetrics::weighted_energy);
    const double factor = b.mean / a.mean;
    report(13, factor <= 1.35, fmt("weighted energy %.4f -> %.4f (factor %.3f, need <= 1.35)", a.mean, b.mean, factor));
}

void jain_check(Runs& runs) {
    const auto& ab = runs.get("ab-mappo", [](harness::Config&) {});
    const auto& rnd = runs.get("random", [](harness::Config& c) { c.experiment.variant = mappo::Variant::random; });
    const double K = runs.base.env.num_mus;
    std::size_t out_of_range = 0, checked = 0;
    for (const auto& [name, res] : runs.done)
        for (const auto& s : res.seeds) {
            for (const auto& m : s.metrics) {
                ++checked;
                out_of_range += m.jain < 1.0 / K - 1e-12 || m.jain > 1.0 + 1e-12;
            }
            std::ifstream trace(fs::path(s.dir) / "trace.jsonl");
            for (std::string line; std::getline(trace, line);) {
                const double j = nlohmann::json::parse(line).at("jain").get<double>();
                ++checked;
                out_of_range += j < 1.0 / K - 1e-12 || j > 1.0 + 1e-12;
            }
        }
    const Stat a = final_stat(ab, &mappo::EpisodeMetrics::jain);
    const Stat r = final_stat(rnd, &mappo::EpisodeMetrics::jain);
    report(14, a.mean >= r.mean && out_of_range == 0,
           fmt("final Jain AB %.4f vs random %.4f; %zu of %zu indices outside [1/K, 1]", a.mean, r.mean, out_of_range,
               checked));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void determinism(const Runs& runs) {
    harness::Config c = runs.base;
    c.train.total_steps = 5 * c.train.episode_length;
    c.experiment.seeds = {7};
    std::vector<std::string> files{"metrics.csv", "checkpoint.txt", "trace.jsonl", "evaluation.csv"};
    std::vector<std::string> outputs[2];
    for (int i = 0; i < 2; ++i) {
        c.experiment.output_dir = (runs.root / ("determinism_" + std::to_string(i))).string();
        harness::run(c);
        for (const auto& f : files) outputs[i].push_back(slurp(fs::path(c.experiment.output_dir) / "seed_7" / f));
        outputs[i].push_back(slurp(fs::path(c.experiment.output_dir) / "summary.csv"));
    }
    std::size_t differ = 0;
    std::size_t bytes = 0;
    for (std::size_t i = 0; i < outputs[0].size(); ++i) {
        differ += outputs[0][i] != outputs[1][i] || outputs[0][i].empty();
        bytes += outputs[0][i].size();
    }
    report(15, differ == 0, fmt("two 5-episode runs, %zu output files (%zu bytes), %zu differ", outputs[0].size(), bytes, differ));
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path config = argc > 1 ? argv[1] : fs::path(UAVMEC_SOURCE_DIR) / "configs" / "desk.json";
    const fs::path root = argc > 2 ? argv[2] : fs::current_path() / "acceptance_runs";
    fs::create_directories(root);

    hover_energy();
    los_anchor();
    dvfs_identity();
    latency_gap_identity();
    gae_oracle();
    gradient_suite();
    beta_checks();
    constraint_fuzz();
    kinematics();

    Runs runs{root, harness::load_config(config.string()), {}};
    std::fprintf(stderr, "desk profile: K=%d M=%d W=%g, %d episodes x %zu seeds\n", runs.base.env.num_mus,
                 runs.base.env.num_uavs, runs.base.env.width, runs.base.train.episodes(), runs.base.experiment.seeds.size());
    learning(runs);
    ablation(runs);
    bandwidth_trend(runs);
    deviation_trend(runs);
    jain_check(runs);
    determinism(runs);

    std::printf("%d of 15 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
