#include "uavmec/dt_layer.hpp"

#include <stdexcept>

namespace uavmec::dt {

double draw_freq_deviation(double est_freq, double rate, SplitMix64& rng) {
    if (est_freq < 0.0) throw std::invalid_argument("draw_freq_deviation: negative frequency");
    if (rate <= 0.0) return 0.0;
    const double u = -rate + 2.0 * rate * rng.uniform();
    return est_freq * u;
}

Vec3 noisy_position(const Vec3& p, double rate, double width, SplitMix64& rng) {
    if (rate <= 0.0) return p;
    const double span = rate * width;
    const double dx = -span + 2.0 * span * rng.uniform();
    const double dy = -span + 2.0 * span * rng.uniform();
    return clamp_to_region({p.x + dx, p.y + dy, p.z}, width);
}

TwinStore sync(const PhysicalSnapshot& world, const DeviationModel& dev, double width, std::uint64_t seed,
               std::uint64_t slot) {
    const double rate = dev.active_loc_rate();
    TwinStore twins;
    twins.mus.resize(world.mu_positions.size());
    for (std::size_t k = 0; k < world.mu_positions.size(); ++k) {
        auto rng = keyed_stream(seed, {slot, tag(StreamTag::mu_position_dev), k});
        MuTwin& t = twins.mus[k];
        t.position = noisy_position(world.mu_positions[k], rate, width, rng);
        t.task = world.mu_tasks.at(k);
        t.est_local_freq = world.mu_est_local_freq.empty() ? 0.0 : world.mu_est_local_freq.at(k);
    }
    twins.uavs.resize(world.uav_positions.size());
    for (std::size_t m = 0; m < world.uav_positions.size(); ++m) {
        auto rng = keyed_stream(seed, {slot, tag(StreamTag::uav_position_dev), m});
        UavTwin& t = twins.uavs[m];
        t.position = noisy_position(world.uav_positions[m], rate, width, rng);
        if (!world.association.empty()) t.association = world.association.at(m);
        if (!world.est_edge_freq.empty()) t.est_freq = world.est_edge_freq.at(m);
    }
    return twins;
}

}  // namespace uavmec::dt
