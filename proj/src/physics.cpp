#include "uavmec/physics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace uavmec::physics {

MobilityNoise draw_mobility_noise(const MobilityParams& p, SplitMix64& rng) {
    std::normal_distribution<double> speed(p.speed_noise_mean, std::sqrt(p.speed_noise_var));
    std::normal_distribution<double> heading(p.heading_noise_mean, std::sqrt(p.heading_noise_var));
    MobilityNoise n;
    n.speed = speed(rng);
    n.heading = heading(rng);
    return n;
}

MuKinematics step_mobility(const MuKinematics& state, const MobilityParams& p, double dt, double width,
                           const MobilityNoise& noise) {
    MuKinematics next;
    const double mu1 = p.memory_speed;
    const double mu2 = p.memory_heading;
    next.speed = mu1 * state.speed + (1.0 - mu1) * p.mean_speed + std::sqrt(1.0 - mu1 * mu1) * noise.speed;
    next.speed = std::max(next.speed, 0.0);
    next.heading =
        mu2 * state.heading + (1.0 - mu2) * p.mean_heading + std::sqrt(1.0 - mu2 * mu2) * noise.heading;
    const Vec3 moved{state.position.x + state.speed * std::cos(state.heading) * dt,
                     state.position.y + state.speed * std::sin(state.heading) * dt, 0.0};
    next.position = clamp_to_region(moved, width);
    return next;
}

MuKinematics step_mobility(const MuKinematics& state, const MobilityParams& p, double dt, double width,
                           SplitMix64& rng) {
    return step_mobility(state, p, dt, width, draw_mobility_noise(p, rng));
}

double elevation_angle_deg(const Vec3& u, const Vec3& q) {
    const double height = q.z - u.z;
    const double horiz = horizontal_distance(u, q);
    if (horiz == 0.0) return 90.0;
    return 180.0 / std::numbers::pi * std::atan(height / horiz);
}

double los_probability(double elevation_deg, double a, double b) {
    return 1.0 / (1.0 + a * std::exp(-b * (elevation_deg - a)));
}

double air_ground_gain(const Vec3& u, const Vec3& q, const ChannelParams& cp) {
    const double d = distance(u, q);
    if (!(d > 0.0)) throw std::invalid_argument("air_ground_gain: MU and UAV are co-located");
    const double p_los = los_probability(elevation_angle_deg(u, q), cp.los_a, cp.los_b);
    return cp.ref_gain * (p_los + cp.nlos_atten * (1.0 - p_los)) / std::pow(d, cp.path_loss_exp);
}

double relay_gain(const Vec3& q, const Vec3& u_bs, double ref_gain) {
    const Vec3 diff = q - u_bs;
    const double d2 = diff.x * diff.x + diff.y * diff.y + diff.z * diff.z;
    if (!(d2 > 0.0)) throw std::invalid_argument("relay_gain: UAV and BS are co-located");
    return ref_gain / d2;
}

double uplink_rate(double bandwidth, double tx_power, double gain, double noise_density) {
    if (bandwidth <= 0.0) return 0.0;
    return bandwidth * std::log2(1.0 + tx_power * gain / (bandwidth * noise_density));
}

}  // namespace uavmec::physics
