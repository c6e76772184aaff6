#include "uavmec/tasking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uavmec::tasking {

TaskSpec generate_task(SplitMix64& rng, const TaskRanges& ranges, double deadline) {
    TaskSpec t;
    t.bits = ranges.bits_min + (ranges.bits_max - ranges.bits_min) * rng.uniform();
    t.cycles_per_bit = ranges.cycles_min + (ranges.cycles_max - ranges.cycles_min) * rng.uniform();
    t.deadline = deadline;
    return t;
}

double required_local_frequency(const TaskSpec& task, double rho, double dt, double f_max) {
    if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("required_local_frequency: rho outside [0, 1]");
    const double cycles = (1.0 - rho) * task.cycles();
    return std::min(cycles / dt, f_max);
}

double latency_gap(double cycles, double est_freq, double freq_dev) {
    if (!(est_freq > 0.0)) throw std::invalid_argument("latency_gap: estimated frequency must be positive");
    if (!(est_freq + freq_dev > 0.0)) throw std::invalid_argument("latency_gap: actual frequency must be positive");
    return -cycles * freq_dev / (est_freq * (est_freq + freq_dev));
}

LocalResult local_compute(const TaskSpec& task, double rho, double est_freq, double freq_dev,
                          double capacitance) {
    const double cycles = (1.0 - rho) * task.cycles();
    if (cycles <= 0.0) return {};
    LocalResult r;
    r.time = cycles / est_freq + latency_gap(cycles, est_freq, freq_dev);
    const double actual = est_freq + freq_dev;
    r.energy = capacitance * actual * actual * cycles;
    return r;
}

EdgeResult edge_pipeline(const TaskSpec& task, double rho, const EdgeInputs& in) {
    EdgeResult r;
    if (rho <= 0.0) return r;
    const double bits = rho * task.bits;
    const double dt = task.deadline;

    // An offload over an empty link costs a full extra slot instead of infinity.
    if (in.uplink_rate > 0.0) {
        r.offload_time = bits / in.uplink_rate;
    } else {
        r.offload_time = 2.0 * dt;
        r.infeasible = true;
    }
    r.mu_offload_energy = in.mu_tx_power * r.offload_time;

    if (in.mode == EdgeMode::bs_relay) {
        if (in.relay_rate > 0.0) {
            r.relay_time = bits / in.relay_rate;
        } else {
            r.relay_time = 2.0 * dt;
            r.infeasible = true;
        }
        r.edge_time = r.offload_time + r.relay_time;
        return r;
    }

    r.edge_cycles = bits * task.cycles_per_bit;
    if (in.est_freq > 0.0) {
        r.compute_time = r.edge_cycles / in.est_freq + latency_gap(r.edge_cycles, in.est_freq, in.freq_dev);
        const double actual = in.est_freq + in.freq_dev;
        r.uav_compute_energy = in.capacitance * actual * actual * r.edge_cycles;
    } else {
        r.compute_time = 2.0 * dt;
        r.infeasible = true;
    }
    r.edge_time = r.offload_time + r.compute_time;
    return r;
}

double propulsion_power(double speed, const UavPowerParams& pp) {
    if (speed < 0.0) throw std::invalid_argument("propulsion_power: negative speed");
    const double v2 = speed * speed;
    const double v3 = v2 * speed;
    const double v4 = v2 * v2;
    const double v0_2 = pp.rotor_velocity * pp.rotor_velocity;
    const double parasite = 0.5 * pp.drag_ratio * pp.air_density * pp.solidity * pp.disc_area * v3;
    const double blade_arg = pp.squared_blade_term ? v2 : v3;
    const double blade = pp.blade_power * (1.0 + 3.0 * blade_arg / (pp.tip_speed * pp.tip_speed));
    const double induced = pp.induced_power * (std::sqrt(1.0 + v4 / (4.0 * v0_2 * v0_2)) - v2 / (2.0 * v0_2));
    return parasite + blade + induced;
}

double weighted_objective(std::span<const double> uav_energy, std::span<const double> mu_energy, double weight) {
    const double uav = std::accumulate(uav_energy.begin(), uav_energy.end(), 0.0);
    const double mu = std::accumulate(mu_energy.begin(), mu_energy.end(), 0.0);
    return weight * uav + mu;
}

}  // namespace uavmec::tasking
