#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace uavmec {

/// SplitMix64 engine. Satisfies UniformRandomBitGenerator so it plugs into
/// the <random> distributions; cheap enough to construct one per entity per slot.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

/// Derives an independent stream from a base seed and a key path
/// (e.g. {slot, entity kind, entity id, purpose}).
inline SplitMix64 keyed_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    SplitMix64 mix(seed ^ 0x5851f42d4c957f2dULL);
    std::uint64_t h = mix();
    for (std::uint64_t k : keys) {
        SplitMix64 step(h ^ (k * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
        h = step() ^ step();
    }
    return SplitMix64(h);
}

/// Purpose tags for keyed streams.
enum class StreamTag : std::uint64_t {
    reset = 1,
    mobility = 2,
    task = 3,
    local_freq_dev = 4,
    edge_freq_dev = 5,
    mu_position_dev = 6,
    uav_position_dev = 7,
};

inline std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

}  // namespace uavmec
