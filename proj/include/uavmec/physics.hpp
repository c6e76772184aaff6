#pragma once

#include "uavmec/geometry.hpp"
#include "uavmec/random.hpp"

namespace uavmec::physics {

struct MuKinematics {
    Vec3 position;      // z = 0
    double speed = 0.0;  // m/s
    double heading = 0.0;  // rad
};

/// Gauss-Markov mobility constants. The noise terms are N(mean, variance).
struct MobilityParams {
    double memory_speed = 0.5;    // mu1
    double memory_heading = 0.5;  // mu2
    double mean_speed = 1.0;      // m/s
    double mean_heading = 0.0;    // rad
    double speed_noise_mean = 0.0;
    double speed_noise_var = 1.0;
    double heading_noise_mean = 0.0;
    double heading_noise_var = 1.0;
};

struct ChannelParams {
    double los_a = 15.0;
    double los_b = 0.5;
    double ref_gain = 1e-3;  // beta0, linear gain at 1 m (-30 dB)
    double path_loss_exp = 2.2;
    double nlos_atten = 0.2;
    double noise_density = 1.9952623149688828e-16;  // W/Hz (-127 dBm/Hz)
    double bandwidth = 50e6;        // shared MU-UAV budget, Hz
    double relay_bandwidth = 10e6;  // per-UAV relay link, Hz
};

/// Draws of the two Gaussian innovations for one mobility step.
struct MobilityNoise {
    double speed = 0.0;
    double heading = 0.0;
};

MobilityNoise draw_mobility_noise(const MobilityParams& p, SplitMix64& rng);

/// One Gauss-Markov step with explicit innovations. Position advances with
/// the pre-update speed and heading and is clamped to [0, width]^2.
MuKinematics step_mobility(const MuKinematics& state, const MobilityParams& p, double dt, double width,
                           const MobilityNoise& noise);

MuKinematics step_mobility(const MuKinematics& state, const MobilityParams& p, double dt, double width,
                           SplitMix64& rng);

/// Elevation of `q` seen from `u`, in degrees; 90 when directly overhead.
double elevation_angle_deg(const Vec3& u, const Vec3& q);

double los_probability(double elevation_deg, double a, double b);

/// Expected air-ground gain beta0 [P_los + nu (1 - P_los)] / d^iota.
/// Throws std::invalid_argument when the endpoints coincide.
double air_ground_gain(const Vec3& u, const Vec3& q, const ChannelParams& cp);

/// LoS relay gain beta0 / |q - u_bs|^2.
double relay_gain(const Vec3& q, const Vec3& u_bs, double ref_gain);

/// Shannon rate of an OFDMA slice; 0 for an empty slice.
double uplink_rate(double bandwidth, double tx_power, double gain, double noise_density);

inline double relay_rate(double relay_bandwidth, double tx_power, double gain, double noise_density) {
    return uplink_rate(relay_bandwidth, tx_power, gain, noise_density);
}

}  // namespace uavmec::physics
