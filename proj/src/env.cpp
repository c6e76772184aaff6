#include "uavmec/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace uavmec {

namespace {

constexpr double kMinShare = 1e-6;

void require(bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(std::string(field) + ": " + what);
}

double unit(double v) { return std::clamp(v, 0.0, 1.0); }

double relu(double v) { return v > 0.0 ? v : 0.0; }

/// Scales `values` so their sum does not exceed `budget`, exactly.
void scale_to_budget(std::span<double> values, double budget) {
    double sum = 0.0;
    for (double v : values) sum += v;
    if (sum <= budget) return;
    double scale = budget / sum;
    for (;;) {
        double check = 0.0;
        for (double v : values) check += v * scale;
        if (check <= budget) break;
        scale = std::nextafter(scale, 0.0) * (1.0 - 1e-15);
    }
    for (double& v : values) v *= scale;
}

}  // namespace

void EnvConfig::validate() const {
    require(num_mus >= 1, "num_mus", "must be >= 1");
    require(num_uavs >= 1, "num_uavs", "must be >= 1");
    require(width > 0.0, "width", "must be positive");
    require(uav_altitude > 0.0, "uav_altitude", "must be positive");
    require(slot_duration > 0.0, "slot_duration", "must be positive");
    require(slots_per_period >= 1, "slots_per_period", "must be >= 1");
    require(bs_position.finite(), "bs_position", "must be finite");

    require(channel.los_a > 0.0, "channel.los_a", "must be positive");
    require(channel.los_b > 0.0, "channel.los_b", "must be positive");
    require(channel.ref_gain > 0.0, "channel.ref_gain", "must be positive");
    require(channel.path_loss_exp >= 2.0, "channel.path_loss_exp", "must be >= 2");
    require(channel.nlos_atten > 0.0 && channel.nlos_atten <= 1.0, "channel.nlos_atten", "must be in (0, 1]");
    require(channel.noise_density > 0.0, "channel.noise_density", "must be positive");
    require(channel.bandwidth > 0.0, "channel.bandwidth", "must be positive");
    require(channel.relay_bandwidth > 0.0, "channel.relay_bandwidth", "must be positive");

    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    require(in01(mobility.memory_speed), "mobility.memory_speed", "must be in [0, 1]");
    require(in01(mobility.memory_heading), "mobility.memory_heading", "must be in [0, 1]");
    require(mobility.mean_speed >= 0.0, "mobility.mean_speed", "must be >= 0");
    require(mobility.speed_noise_var >= 0.0, "mobility.speed_noise_var", "must be >= 0");
    require(mobility.heading_noise_var >= 0.0, "mobility.heading_noise_var", "must be >= 0");

    require(power.blade_power > 0.0, "power.blade_power", "must be positive");
    require(power.induced_power > 0.0, "power.induced_power", "must be positive");
    require(power.tip_speed > 0.0, "power.tip_speed", "must be positive");
    require(power.rotor_velocity > 0.0, "power.rotor_velocity", "must be positive");
    require(power.drag_ratio > 0.0, "power.drag_ratio", "must be positive");
    require(power.solidity > 0.0, "power.solidity", "must be positive");
    require(power.air_density > 0.0, "power.air_density", "must be positive");
    require(power.disc_area > 0.0, "power.disc_area", "must be positive");

    require(tasks.bits_min > 0.0, "tasks.bits_min", "must be positive");
    require(tasks.bits_max >= tasks.bits_min, "tasks.bits_max", "must be >= tasks.bits_min");
    require(tasks.cycles_min > 0.0, "tasks.cycles_min", "must be positive");
    require(tasks.cycles_max >= tasks.cycles_min, "tasks.cycles_max", "must be >= tasks.cycles_min");

    require(deviation.freq_rate >= 0.0 && deviation.freq_rate < 1.0, "deviation.freq_rate", "must be in [0, 1)");
    require(deviation.loc_rate >= 0.0 && deviation.loc_rate < 1.0, "deviation.loc_rate", "must be in [0, 1)");

    require(mu_tx_power > 0.0, "mu_tx_power", "must be positive");
    require(uav_tx_power > 0.0, "uav_tx_power", "must be positive");
    require(capacitance > 0.0, "capacitance", "must be positive");
    require(f_max_local > 0.0, "f_max_local", "must be positive");
    require(f_max_edge > 0.0, "f_max_edge", "must be positive");
    require(v_max > 0.0, "v_max", "must be positive");
    require(a_max > 0.0, "a_max", "must be positive");
    require(d_min > 0.0, "d_min", "must be positive");
    require(d_min < d_th, "d_min", "must be below d_th");
    require(d_th <= width, "d_th", "must not exceed width");
    require(energy_weight >= 0.0, "energy_weight", "must be >= 0");
    require(penalty_latency >= 0.0, "penalty_latency", "must be >= 0");
    require(penalty_boundary >= 0.0, "penalty_boundary", "must be >= 0");
    require(penalty_collision >= 0.0, "penalty_collision", "must be >= 0");
}

MuAction remap_mu_action(std::span<const double> raw, int num_uavs) {
    if (static_cast<int>(raw.size()) != num_uavs + 3)
        throw std::invalid_argument("remap_mu_action: expected M + 3 entries");
    MuAction a;
    double best = unit(raw[0]);
    for (int m = 1; m <= num_uavs; ++m) {
        const double v = unit(raw[m]);
        if (v > best) {
            best = v;
            a.assoc = m;
        }
    }
    if (a.assoc != 0) {
        a.relay_to_bs = std::round(unit(raw[num_uavs + 1])) >= 1.0;
        a.rho = std::max(unit(raw[num_uavs + 2]), kMinShare);
    }
    return a;
}

UavAction remap_uav_action(std::span<const double> raw, int uav_index, std::span<const MuAction> mu_actions,
                           const EnvConfig& cfg) {
    const int K = cfg.num_mus;
    if (static_cast<int>(raw.size()) != 2 * K + 2)
        throw std::invalid_argument("remap_uav_action: expected 2K + 2 entries");
    if (static_cast<int>(mu_actions.size()) != K)
        throw std::invalid_argument("remap_uav_action: one MU action per MU required");
    const int self = uav_index + 1;

    UavAction a;
    a.bandwidth.assign(K, 0.0);
    a.freq.assign(K, 0.0);
    for (int k = 0; k < K; ++k) {
        if (mu_actions[k].assoc != self) continue;
        a.bandwidth[k] = std::max(unit(raw[k]), kMinShare);
        if (!mu_actions[k].relay_to_bs) a.freq[k] = std::max(unit(raw[K + k]), kMinShare);
    }
    scale_to_budget(a.bandwidth, 1.0);
    scale_to_budget(a.freq, 1.0);
    for (double& b : a.bandwidth) b *= cfg.channel.bandwidth;
    for (double& f : a.freq) f *= cfg.f_max_edge;
    scale_to_budget(a.freq, cfg.f_max_edge);

    const Vec2 accel{(2.0 * unit(raw[2 * K]) - 1.0) * cfg.a_max, (2.0 * unit(raw[2 * K + 1]) - 1.0) * cfg.a_max};
    a.accel = clip_norm(accel, cfg.a_max);
    return a;
}

void resolve_bandwidth(std::vector<UavAction>& actions, double total_bandwidth) {
    std::vector<double> all;
    for (const auto& a : actions) all.insert(all.end(), a.bandwidth.begin(), a.bandwidth.end());
    scale_to_budget(all, total_bandwidth);
    std::size_t i = 0;
    for (auto& a : actions)
        for (double& b : a.bandwidth) b = all[i++];
}

std::vector<UavAction> remap_uav_actions(const std::vector<std::vector<double>>& raw,
                                         std::span<const MuAction> mu_actions, const EnvConfig& cfg) {
    if (static_cast<int>(raw.size()) != cfg.num_uavs)
        throw std::invalid_argument("remap_uav_actions: one raw vector per UAV required");
    std::vector<UavAction> out;
    out.reserve(raw.size());
    for (int m = 0; m < cfg.num_uavs; ++m) out.push_back(remap_uav_action(raw[m], m, mu_actions, cfg));
    resolve_bandwidth(out, cfg.channel.bandwidth);
    return out;
}

double penalty_distance(const Vec3& uav, std::span<const Vec3> associates, double d_th, double width) {
    if (associates.empty()) return 0.0;
    double cx = 0.0;
    double cy = 0.0;
    for (const Vec3& p : associates) {
        cx += p.x;
        cy += p.y;
    }
    cx /= static_cast<double>(associates.size());
    cy /= static_cast<double>(associates.size());
    // Horizontal offset only: the UAV altitude is fixed.
    return (std::hypot(uav.x - cx, uav.y - cy) - d_th) / width;
}

double penalty_collision(std::span<const Vec3> uavs, int m, double d_min, double factor) {
    double sum = 0.0;
    for (int j = 0; j < static_cast<int>(uavs.size()); ++j) {
        if (j == m) continue;
        sum += relu((d_min - distance(uavs[m], uavs[j])) / d_min);
    }
    return factor * sum;
}

double jain_index(std::span<const double> energy) {
    double sum = 0.0;
    double sq = 0.0;
    for (double e : energy) {
        sum += e;
        sq += e * e;
    }
    if (sq <= 0.0) return 1.0;
    return sum * sum / (static_cast<double>(energy.size()) * sq);
}

MecEnv::MecEnv(EnvConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

const EnvState& MecEnv::reset(std::uint64_t seed) {
    state_ = EnvState{};
    state_.seed = seed;
    state_.slot = 0;
    const double W = cfg_.width;

    state_.mus.resize(cfg_.num_mus);
    for (int k = 0; k < cfg_.num_mus; ++k) {
        auto rng = keyed_stream(seed, {tag(StreamTag::reset), 0, static_cast<std::uint64_t>(k)});
        MuState& mu = state_.mus[k];
        mu.kin.position = {W * rng.uniform(), W * rng.uniform(), 0.0};
        mu.kin.speed = cfg_.mobility.mean_speed;
        mu.mean_heading = 2.0 * std::numbers::pi * rng.uniform();
        mu.kin.heading = mu.mean_heading;
        auto task_rng = keyed_stream(seed, {0, tag(StreamTag::task), static_cast<std::uint64_t>(k)});
        mu.task = tasking::generate_task(task_rng, cfg_.tasks, cfg_.slot_duration);
    }
    state_.uavs.resize(cfg_.num_uavs);
    for (int m = 0; m < cfg_.num_uavs; ++m) {
        auto rng = keyed_stream(seed, {tag(StreamTag::reset), 1, static_cast<std::uint64_t>(m)});
        state_.uavs[m].position = {W * rng.uniform(), W * rng.uniform(), cfg_.uav_altitude};
        state_.uavs[m].velocity = {};
    }
    state_.prev_loads.assign(cfg_.num_uavs, 0.0);
    sync_twins({}, {}, {});
    return state_;
}

void MecEnv::load_state(const EnvState& state) {
    if (static_cast<int>(state.mus.size()) != cfg_.num_mus || static_cast<int>(state.uavs.size()) != cfg_.num_uavs)
        throw std::invalid_argument("MecEnv::load_state: entity counts do not match the config");
    state_ = state;
    if (static_cast<int>(state_.prev_loads.size()) != cfg_.num_uavs) state_.prev_loads.assign(cfg_.num_uavs, 0.0);
    sync_twins({}, {}, {});
}

std::vector<double> MecEnv::observe_mu(int k, bool with_deviation) const {
    const int M = cfg_.num_uavs;
    const double W = cfg_.width;
    std::vector<double> obs;
    obs.reserve(cfg_.mu_obs_dim());
    const auto& dev = cfg_.deviation;
    const Vec3 own = (with_deviation && dev.perturb_own_position) ? state_.twins.mus[k].position
                                                                    : state_.mus[k].kin.position;
    obs.push_back(unit(own.x / W));
    obs.push_back(unit(own.y / W));
    for (int m = 0; m < M; ++m) {
        const Vec3 q = with_deviation ? state_.twins.uavs[m].position : state_.uavs[m].position;
        obs.push_back(unit(q.x / W));
        obs.push_back(unit(q.y / W));
    }
    const auto& task = state_.twins.mus[k].task;
    obs.push_back(unit(task.bits / cfg_.tasks.bits_max));
    obs.push_back(unit(task.cycles_per_bit / cfg_.tasks.cycles_max));
    const double load_scale = cfg_.f_max_edge * cfg_.slot_duration;
    for (int m = 0; m < M; ++m) obs.push_back(unit(state_.prev_loads[m] / load_scale));
    return obs;
}

std::vector<double> MecEnv::observe_uav(int m, std::span<const MuAction> mu_actions, bool with_deviation) const {
    const int K = cfg_.num_mus;
    const int M = cfg_.num_uavs;
    const double W = cfg_.width;
    if (static_cast<int>(mu_actions.size()) != K)
        throw std::invalid_argument("observe_uav: one MU action per MU required");
    std::vector<double> obs;
    obs.reserve(cfg_.uav_obs_dim());
    for (int k = 0; k < K; ++k) {
        const auto& twin = state_.twins.mus[k];
        const Vec3 p = with_deviation ? twin.position : state_.mus[k].kin.position;
        obs.push_back(mu_actions[k].assoc == m + 1 ? unit(mu_actions[k].rho) : 0.0);
        obs.push_back(unit(twin.task.bits / cfg_.tasks.bits_max));
        obs.push_back(unit(twin.task.cycles_per_bit / cfg_.tasks.cycles_max));
        obs.push_back(unit(p.x / W));
        obs.push_back(unit(p.y / W));
    }
    const auto& dev = cfg_.deviation;
    const Vec3 own = (with_deviation && dev.perturb_own_position) ? state_.twins.uavs[m].position
                                                                    : state_.uavs[m].position;
    obs.push_back(unit(own.x / W));
    obs.push_back(unit(own.y / W));
    for (int j = 0; j < M; ++j) {
        if (j == m) continue;
        const Vec3 q = with_deviation ? state_.twins.uavs[j].position : state_.uavs[j].position;
        obs.push_back(unit(q.x / W));
        obs.push_back(unit(q.y / W));
    }
    return obs;
}

StepReport MecEnv::step(std::span<const MuAction> mu_actions, std::span<const UavAction> uav_actions) {
    const int K = cfg_.num_mus;
    const int M = cfg_.num_uavs;
    const double dt = cfg_.slot_duration;
    const double W = cfg_.width;
    if (static_cast<int>(mu_actions.size()) != K || static_cast<int>(uav_actions.size()) != M)
        throw std::invalid_argument("MecEnv::step: action counts do not match K and M");
    const std::uint64_t seed = state_.seed;
    const std::uint64_t slot = state_.slot;
    const double freq_rate = cfg_.deviation.active_freq_rate();

    StepReport r;
    r.slot = slot;
    r.mu_actions.assign(mu_actions.begin(), mu_actions.end());
    r.mu_rewards.assign(K, 0.0);
    r.uav_rewards.assign(M, 0.0);
    r.mu_energy.assign(K, 0.0);
    r.mu_local_energy.assign(K, 0.0);
    r.mu_offload_energy.assign(K, 0.0);
    r.uav_energy.assign(M, 0.0);
    r.uav_fly_energy.assign(M, 0.0);
    r.uav_compute_energy.assign(M, 0.0);
    r.local_time.assign(K, 0.0);
    r.edge_time.assign(K, 0.0);
    r.latency_violation.assign(K, 0.0);
    r.penalty_latency.assign(K, 0.0);
    r.penalty_boundary.assign(M, 0.0);
    r.penalty_collision.assign(M, 0.0);
    r.penalty_distance.assign(M, 0.0);

    std::vector<double> local_freq(K, 0.0);
    std::vector<double> loads(M, 0.0);

    // Communication and computation at the decision-time positions.
    for (int k = 0; k < K; ++k) {
        const MuState& mu = state_.mus[k];
        r.mu_positions.push_back(mu.kin.position);
        const MuAction& act = mu_actions[k];
        const double rho = act.assoc == 0 ? 0.0 : act.rho;

        const double f_est = tasking::required_local_frequency(mu.task, rho, dt, cfg_.f_max_local);
        local_freq[k] = f_est;
        if (f_est > 0.0) {
            auto rng = keyed_stream(seed, {slot, tag(StreamTag::local_freq_dev), static_cast<std::uint64_t>(k)});
            const double f_dev = dt::draw_freq_deviation(f_est, freq_rate, rng);
            const auto local = tasking::local_compute(mu.task, rho, f_est, f_dev, cfg_.capacitance);
            r.local_time[k] = local.time;
            r.mu_local_energy[k] = local.energy;
        }

        if (act.assoc > 0) {
            const int m = act.assoc - 1;
            const UavState& uav = state_.uavs[m];
            tasking::EdgeInputs in;
            in.mode = act.relay_to_bs ? tasking::EdgeMode::bs_relay : tasking::EdgeMode::uav_compute;
            in.mu_tx_power = cfg_.mu_tx_power;
            in.capacitance = cfg_.capacitance;
            const double gain = physics::air_ground_gain(mu.kin.position, uav.position, cfg_.channel);
            in.uplink_rate = physics::uplink_rate(uav_actions[m].bandwidth.at(k), cfg_.mu_tx_power, gain,
                                                  cfg_.channel.noise_density);
            if (act.relay_to_bs) {
                const double g_rel = physics::relay_gain(uav.position, cfg_.bs_position, cfg_.channel.ref_gain);
                in.relay_rate = physics::relay_rate(cfg_.channel.relay_bandwidth, cfg_.uav_tx_power, g_rel,
                                                    cfg_.channel.noise_density);
            } else {
                in.est_freq = uav_actions[m].freq.at(k);
                if (in.est_freq > 0.0) {
                    auto rng = keyed_stream(seed, {slot, tag(StreamTag::edge_freq_dev), static_cast<std::uint64_t>(k),
                                                   static_cast<std::uint64_t>(m)});
                    in.freq_dev = dt::draw_freq_deviation(in.est_freq, freq_rate, rng);
                }
            }
            const auto edge = tasking::edge_pipeline(mu.task, rho, in);
            r.edge_time[k] = edge.edge_time;
            r.mu_offload_energy[k] = edge.mu_offload_energy;
            r.uav_compute_energy[m] += edge.uav_compute_energy;
            loads[m] += edge.edge_cycles;
        }
        r.mu_energy[k] = r.mu_local_energy[k] + r.mu_offload_energy[k];
        r.latency_violation[k] = relu(r.local_time[k] - dt) + relu(r.edge_time[k] - dt);
        r.penalty_latency[k] = cfg_.penalty_latency / dt * r.latency_violation[k];
    }

    // Flight: energy at the slot's starting speed, then the kinematic update.
    std::vector<Vec3> commanded(M);
    for (int m = 0; m < M; ++m) {
        UavState& uav = state_.uavs[m];
        r.uav_fly_energy[m] = tasking::propulsion_energy(uav.velocity.norm(), cfg_.power, dt);
        r.uav_energy[m] = r.uav_fly_energy[m] + r.uav_compute_energy[m];

        const Vec2 a = clip_norm(uav_actions[m].accel, cfg_.a_max);
        const Vec2 disp = dt * uav.velocity + (0.5 * dt * dt) * a;
        commanded[m] = {uav.position.x + disp.x, uav.position.y + disp.y, uav.position.z};
        const Vec3 clipped = clamp_to_region(commanded[m], W);
        Vec2 v_next = clip_norm(uav.velocity + dt * a, cfg_.v_max);
        if (clipped.x != commanded[m].x) v_next.x = 0.0;
        if (clipped.y != commanded[m].y) v_next.y = 0.0;
        r.penalty_boundary[m] = cfg_.penalty_boundary * distance(commanded[m], clipped);
        uav.position = clipped;
        uav.velocity = v_next;
    }
    for (int m = 0; m < M; ++m) r.uav_positions.push_back(state_.uavs[m].position);

    for (int m = 0; m < M; ++m) {
        std::vector<Vec3> associates;
        for (int k = 0; k < K; ++k)
            if (mu_actions[k].assoc == m + 1) associates.push_back(r.mu_positions[k]);
        r.penalty_distance[m] = penalty_distance(r.uav_positions[m], associates, cfg_.d_th, W);
        r.penalty_collision[m] = penalty_collision(r.uav_positions, m, cfg_.d_min, cfg_.penalty_collision);
    }

    const double w = cfg_.energy_weight;
    for (int k = 0; k < K; ++k) {
        double rew = -r.mu_energy[k];
        const int assoc = mu_actions[k].assoc;
        if (assoc > 0) rew -= w * r.uav_energy[assoc - 1] + r.penalty_latency[k];
        r.mu_rewards[k] = rew;
    }
    for (int m = 0; m < M; ++m) {
        double rew = -w * r.uav_energy[m];
        for (int k = 0; k < K; ++k)
            if (mu_actions[k].assoc == m + 1) rew -= r.mu_energy[k] + r.penalty_latency[k];
        rew -= r.penalty_boundary[m] + r.penalty_collision[m] + r.penalty_distance[m];
        r.uav_rewards[m] = rew;
    }
    r.jain = jain_index(r.mu_energy);
    r.objective = tasking::weighted_objective(r.uav_energy, r.mu_energy, w);

    // Advance the ground users and draw the next tasks.
    for (int k = 0; k < K; ++k) {
        MuState& mu = state_.mus[k];
        physics::MobilityParams mp = cfg_.mobility;
        mp.mean_heading = mu.mean_heading;
        auto rng = keyed_stream(seed, {slot, tag(StreamTag::mobility), static_cast<std::uint64_t>(k)});
        mu.kin = physics::step_mobility(mu.kin, mp, dt, W, rng);
        auto task_rng = keyed_stream(seed, {slot + 1, tag(StreamTag::task), static_cast<std::uint64_t>(k)});
        mu.task = tasking::generate_task(task_rng, cfg_.tasks, dt);
    }
    state_.prev_loads = loads;
    state_.slot = slot + 1;
    sync_twins(local_freq, mu_actions, uav_actions);
    return r;
}

void MecEnv::sync_twins(const std::vector<double>& local_freq, std::span<const MuAction> mu_actions,
                        std::span<const UavAction> uav_actions) {
    dt::PhysicalSnapshot snap;
    for (const auto& mu : state_.mus) {
        snap.mu_positions.push_back(mu.kin.position);
        snap.mu_tasks.push_back(mu.task);
    }
    snap.mu_est_local_freq = local_freq;
    for (int m = 0; m < cfg_.num_uavs; ++m) {
        snap.uav_positions.push_back(state_.uavs[m].position);
        if (!mu_actions.empty()) {
            std::vector<int> row(cfg_.num_mus, 0);
            for (int k = 0; k < cfg_.num_mus; ++k) row[k] = mu_actions[k].assoc == m + 1 ? 1 : 0;
            snap.association.push_back(std::move(row));
        }
        if (!uav_actions.empty()) snap.est_edge_freq.push_back(uav_actions[m].freq);
    }
    state_.twins = dt::sync(snap, cfg_.deviation, cfg_.width, state_.seed, state_.slot);
}

}  // namespace uavmec
