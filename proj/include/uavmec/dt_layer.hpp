#pragma once

#include <cstdint>
#include <vector>

#include "uavmec/geometry.hpp"
#include "uavmec/random.hpp"
#include "uavmec/tasking.hpp"

namespace uavmec::dt {

/// Estimation error between the physical network and its twins.
struct DeviationModel {
    double freq_rate = 0.0;  // r_f, multiplicative on CPU frequency
    double loc_rate = 0.0;   // r_u, fraction of region width
    bool enabled = false;
    bool perturb_own_position = false;

    double active_freq_rate() const { return enabled ? freq_rate : 0.0; }
    double active_loc_rate() const { return enabled ? loc_rate : 0.0; }
};

struct MuTwin {
    Vec3 position;
    tasking::TaskSpec task;
    double est_local_freq = 0.0;  // Hz
};

struct UavTwin {
    Vec3 position;
    std::vector<int> association;    // alpha_{k,m}, one entry per MU
    std::vector<double> est_freq;    // f~_{k,m}, Hz per MU
};

struct TwinStore {
    std::vector<MuTwin> mus;
    std::vector<UavTwin> uavs;
};

/// Physical truth handed to `sync`.
struct PhysicalSnapshot {
    std::vector<Vec3> mu_positions;
    std::vector<tasking::TaskSpec> mu_tasks;
    std::vector<double> mu_est_local_freq;
    std::vector<Vec3> uav_positions;
    std::vector<std::vector<int>> association;  // [m][k]
    std::vector<std::vector<double>> est_edge_freq;  // [m][k]
};

/// f^ = f~ u, u ~ U[-r_f, r_f].
double draw_freq_deviation(double est_freq, double rate, SplitMix64& rng);

/// Horizontal offsets ~ U[-r_u W, r_u W], clamped to [0, W]^2.
Vec3 noisy_position(const Vec3& p, double rate, double width, SplitMix64& rng);

/// Refreshes the twins from physical truth for `slot`. Each entity draws from
/// its own keyed stream so update order does not matter.
TwinStore sync(const PhysicalSnapshot& world, const DeviationModel& dev, double width, std::uint64_t seed,
               std::uint64_t slot);

}  // namespace uavmec::dt
