#pragma once

#include <span>

#include "uavmec/random.hpp"

namespace uavmec::tasking {

/// One MU task: input size and processing density, due within one slot.
struct TaskSpec {
    double bits = 0.0;            // L
    double cycles_per_bit = 0.0;  // C
    double deadline = 1.0;        // s

    double cycles() const { return bits * cycles_per_bit; }
    friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct TaskRanges {
    double bits_min = 5e5;
    double bits_max = 1.5e6;
    double cycles_min = 500.0;
    double cycles_max = 1500.0;
};

/// Rotary-wing propulsion constants.
struct UavPowerParams {
    double blade_power = 39.04;    // P0, W
    double induced_power = 79.07;  // Pi, W
    double tip_speed = 120.0;      // U_tip, m/s
    double rotor_velocity = 3.6;   // v0, m/s
    double drag_ratio = 0.6;       // d0
    double solidity = 0.05;        // s
    double air_density = 1.225;    // kg/m^3
    double disc_area = 0.503;      // A, m^2
    bool squared_blade_term = false;  // use 3 v^2 / U_tip^2 instead of 3 v^3 / U_tip^2
};

struct LocalResult {
    double time = 0.0;    // s
    double energy = 0.0;  // J
};

/// Per-MU edge outcome. Times in s, energies in J.
struct EdgeResult {
    double offload_time = 0.0;
    double relay_time = 0.0;
    double compute_time = 0.0;
    double edge_time = 0.0;
    double mu_offload_energy = 0.0;
    double uav_compute_energy = 0.0;
    double edge_cycles = 0.0;
    bool infeasible = false;
};

enum class EdgeMode { uav_compute, bs_relay };

/// Inputs to the edge pipeline of one MU. Rates are bits/s, frequencies Hz.
struct EdgeInputs {
    EdgeMode mode = EdgeMode::uav_compute;
    double uplink_rate = 0.0;
    double relay_rate = 0.0;
    double est_freq = 0.0;  // f~ allocated by the serving UAV
    double freq_dev = 0.0;  // f^
    double mu_tx_power = 0.2;
    double capacitance = 1e-27;
};

TaskSpec generate_task(SplitMix64& rng, const TaskRanges& ranges, double deadline);

/// DVFS frequency min((1 - rho) L C / dt, f_max).
double required_local_frequency(const TaskSpec& task, double rho, double dt, double f_max);

/// Y / (f~ + f^) - Y / f~. Throws when the actual frequency is not positive.
double latency_gap(double cycles, double est_freq, double freq_dev);

LocalResult local_compute(const TaskSpec& task, double rho, double est_freq, double freq_dev,
                          double capacitance);

EdgeResult edge_pipeline(const TaskSpec& task, double rho, const EdgeInputs& in);

double propulsion_power(double speed, const UavPowerParams& pp);

inline double propulsion_energy(double speed, const UavPowerParams& pp, double dt) {
    return propulsion_power(speed, pp) * dt;
}

/// varpi * sum(E_uav) + sum(E_mu)
double weighted_objective(std::span<const double> uav_energy, std::span<const double> mu_energy, double weight);

}  // namespace uavmec::tasking
