#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavmec/dt_layer.hpp"
#include "uavmec/geometry.hpp"
#include "uavmec/physics.hpp"
#include "uavmec/tasking.hpp"

namespace uavmec {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Every physical constant of the network. Defaults are the full-scale
/// scenario (60 MUs, 10 UAVs, 1 km square).
struct EnvConfig {
    int num_mus = 60;
    int num_uavs = 10;
    double width = 1000.0;          // m
    double uav_altitude = 200.0;    // m
    Vec3 bs_position{-500.0, 0.0, 10.0};
    double slot_duration = 1.0;     // s
    int slots_per_period = 60;

    physics::ChannelParams channel;
    physics::MobilityParams mobility;
    tasking::UavPowerParams power;
    tasking::TaskRanges tasks;
    dt::DeviationModel deviation;

    double mu_tx_power = 0.2;    // W
    double uav_tx_power = 0.5;   // W
    double capacitance = 1e-27;
    double f_max_local = 1e9;    // Hz
    double f_max_edge = 10e9;    // Hz
    double v_max = 30.0;         // m/s
    double a_max = 5.0;          // m/s^2
    double d_min = 50.0;         // m
    double d_th = 300.0;         // m
    double energy_weight = 0.001;
    double penalty_latency = 0.1;
    double penalty_boundary = 0.1;
    double penalty_collision = 0.1;

    /// Throws ConfigError naming the first offending field.
    void validate() const;

    int mu_obs_dim() const { return 2 + 2 * num_uavs + 2 + num_uavs; }
    int uav_obs_dim() const { return 5 * num_mus + 2 + 2 * (num_uavs - 1); }
    int mu_action_dim() const { return num_uavs + 3; }
    int uav_action_dim() const { return 2 * num_mus + 2; }
};

/// Remapped MU decision. assoc == 0 means local execution.
struct MuAction {
    int assoc = 0;
    bool relay_to_bs = false;
    double rho = 0.0;
};

/// Remapped UAV decision; one bandwidth and frequency entry per MU.
struct UavAction {
    std::vector<double> bandwidth;  // Hz
    std::vector<double> freq;       // Hz
    Vec2 accel;                     // m/s^2
};

struct MuState {
    physics::MuKinematics kin;
    double mean_heading = 0.0;
    tasking::TaskSpec task;
};

struct UavState {
    Vec3 position;
    Vec2 velocity;
};

struct EnvState {
    std::uint64_t seed = 0;
    std::uint64_t slot = 0;
    std::vector<MuState> mus;
    std::vector<UavState> uavs;
    std::vector<double> prev_loads;  // edge cycles per UAV in the previous slot
    dt::TwinStore twins;
};

/// Everything a slot produced, for rewards, metrics and traces.
struct StepReport {
    std::uint64_t slot = 0;
    std::vector<double> mu_rewards;
    std::vector<double> uav_rewards;
    std::vector<double> mu_energy;
    std::vector<double> mu_local_energy;
    std::vector<double> mu_offload_energy;
    std::vector<double> uav_energy;
    std::vector<double> uav_fly_energy;
    std::vector<double> uav_compute_energy;
    std::vector<double> local_time;
    std::vector<double> edge_time;
    std::vector<double> latency_violation;  // relu(T_loc - dt) + relu(T_edge - dt)
    std::vector<double> penalty_latency;    // P^t per MU
    std::vector<double> penalty_boundary;   // P^o per UAV
    std::vector<double> penalty_collision;  // P^c per UAV
    std::vector<double> penalty_distance;   // P^d per UAV (signed)
    std::vector<MuAction> mu_actions;
    std::vector<Vec3> mu_positions;   // at decision time
    std::vector<Vec3> uav_positions;  // after the move
    double jain = 1.0;
    double objective = 0.0;
};

MuAction remap_mu_action(std::span<const double> raw, int num_uavs);

/// Local part of the UAV remap: masks, per-UAV normalization, acceleration.
/// Bandwidth is still the per-UAV request and must go through
/// `resolve_bandwidth` before use.
UavAction remap_uav_action(std::span<const double> raw, int uav_index, std::span<const MuAction> mu_actions,
                           const EnvConfig& cfg);

/// Scales every UAV's bandwidth so the network total stays within B.
void resolve_bandwidth(std::vector<UavAction>& actions, double total_bandwidth);

std::vector<UavAction> remap_uav_actions(const std::vector<std::vector<double>>& raw,
                                         std::span<const MuAction> mu_actions, const EnvConfig& cfg);

/// (1/W)(|q - centroid| - d_th); 0 without associates.
double penalty_distance(const Vec3& uav, std::span<const Vec3> associates, double d_th, double width);

/// mu_c * sum_j max((d_min - |q_m - q_j|) / d_min, 0)
double penalty_collision(std::span<const Vec3> uavs, int m, double d_min, double factor);

/// (sum E)^2 / (K sum E^2); 1 when every entry is zero.
double jain_index(std::span<const double> energy);

/// Multi-UAV MEC environment. MUs act first, UAVs second, then `step`.
class MecEnv {
public:
    explicit MecEnv(EnvConfig cfg);

    const EnvConfig& config() const { return cfg_; }
    const EnvState& state() const { return state_; }

    const EnvState& reset(std::uint64_t seed);
    /// Replaces the world state, e.g. to replay a recorded slot. Twins are
    /// re-synced from the new physical state.
    void load_state(const EnvState& state);

    /// Normalized MU observation. With `with_deviation` false the twin
    /// noise is bypassed (the centralized-critic view).
    std::vector<double> observe_mu(int k, bool with_deviation = true) const;
    std::vector<double> observe_uav(int m, std::span<const MuAction> mu_actions, bool with_deviation = true) const;

    StepReport step(std::span<const MuAction> mu_actions, std::span<const UavAction> uav_actions);

private:
    void sync_twins(const std::vector<double>& local_freq, std::span<const MuAction> mu_actions,
                    std::span<const UavAction> uav_actions);

    EnvConfig cfg_;
    EnvState state_;
};

}  // namespace uavmec
