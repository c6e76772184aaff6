#include <doctest.h>

#include <cmath>

#include "uavmec/dt_layer.hpp"
#include "uavmec/env.hpp"

using namespace uavmec;
using namespace uavmec::dt;

TEST_CASE("frequency deviation draws") {
    SplitMix64 rng(1);
    CHECK(draw_freq_deviation(1e9, 0.0, rng) == 0.0);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double d = draw_freq_deviation(1e9, 0.25, rng);
        CHECK(d >= -2.5e8);
        CHECK(d <= 2.5e8);
        CHECK(1e9 + d > 0.0);
        sum += d / 1e9;
    }
    // U[-r, r] has variance r^2 / 3
    const double se = 0.25 / std::sqrt(3.0) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(sum / n) < 3.0 * se);
    // actual frequency stays positive for any rate below one
    for (int i = 0; i < 1000; ++i) CHECK(5e8 + draw_freq_deviation(5e8, 0.999, rng) > 0.0);
}

TEST_CASE("position noise") {
    SplitMix64 rng(2);
    const Vec3 p{100, 200, 0};
    const Vec3 same = noisy_position(p, 0.0, 1000, rng);
    CHECK(same.x == p.x);
    CHECK(same.y == p.y);
    for (int i = 0; i < 1000; ++i) {
        const Vec3 c = noisy_position({0, 0, 0}, 0.3, 1000, rng);
        CHECK(c.x >= 0.0);
        CHECK(c.y >= 0.0);
        CHECK(c.x <= 1000.0);
        const Vec3 h = noisy_position({500, 500, 200}, 0.5, 1000, rng);
        CHECK(std::abs(h.x - 500) <= 500.0);
        CHECK(std::abs(h.y - 500) <= 500.0);
        CHECK(h.z == 200.0);
    }
}

namespace {

PhysicalSnapshot world() {
    PhysicalSnapshot w;
    w.mu_positions = {{10, 20, 0}, {300, 40, 0}, {250, 450, 0}};
    w.mu_tasks = {{6e5, 800, 1}, {7e5, 900, 1}, {1e6, 1200, 1}};
    w.mu_est_local_freq = {1e8, 2e8, 3e8};
    w.uav_positions = {{100, 100, 200}, {400, 400, 200}};
    w.association = {{1, 0, 0}, {0, 1, 0}};
    w.est_edge_freq = {{1e9, 0, 0}, {0, 2e9, 0}};
    return w;
}

}  // namespace

TEST_CASE("sync without deviation mirrors the physical state") {
    DeviationModel off;
    const auto w = world();
    const auto t = sync(w, off, 500, 7, 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(t.mus[k].position.x == w.mu_positions[k].x);
        CHECK(t.mus[k].position.y == w.mu_positions[k].y);
        CHECK(t.mus[k].task == w.mu_tasks[k]);
        CHECK(t.mus[k].est_local_freq == w.mu_est_local_freq[k]);
    }
    for (std::size_t m = 0; m < 2; ++m) {
        CHECK(t.uavs[m].position.x == w.uav_positions[m].x);
        CHECK(t.uavs[m].association == w.association[m]);
        CHECK(t.uavs[m].est_freq == w.est_edge_freq[m]);
    }
    // Rates set but model disabled: still exact.
    DeviationModel disabled{0.2, 0.2, false, false};
    const auto t2 = sync(w, disabled, 500, 7, 3);
    CHECK(t2.mus[1].position.x == w.mu_positions[1].x);
}

TEST_CASE("sync is deterministic and independent of entity order") {
    DeviationModel dev{0.2, 0.1, true, false};
    const auto w = world();
    const auto a = sync(w, dev, 500, 7, 3);
    const auto b = sync(w, dev, 500, 7, 3);
    for (std::size_t k = 0; k < 3; ++k) CHECK(a.mus[k].position.x == b.mus[k].position.x);

    // Reverse the MU order: every MU keeps the draw of its index stream, so
    // reordering the inputs reorders the noise with them only through the key.
    PhysicalSnapshot r = w;
    std::swap(r.mu_positions[0], r.mu_positions[2]);
    std::swap(r.mu_tasks[0], r.mu_tasks[2]);
    const auto c = sync(r, dev, 500, 7, 3);
    // MU 1 is untouched by the swap, so its twin is unchanged.
    CHECK(c.mus[1].position.x == a.mus[1].position.x);
    CHECK(c.mus[1].position.y == a.mus[1].position.y);
    // Entity 0's offset is keyed by its index, not by how many draws preceded it.
    const double off0 = a.mus[0].position.x - w.mu_positions[0].x;
    const double off0c = c.mus[0].position.x - r.mu_positions[0].x;
    CHECK(off0 == doctest::Approx(off0c).epsilon(1e-12));

    const auto other_slot = sync(w, dev, 500, 7, 4);
    CHECK(other_slot.mus[0].position.x != a.mus[0].position.x);
}

TEST_CASE("env with deviations disabled equals zero-rate deviations") {
    EnvConfig base;
    base.num_mus = 4;
    base.num_uavs = 2;
    base.width = 500;
    EnvConfig zero = base;
    zero.deviation = DeviationModel{0.0, 0.0, true, true};
    MecEnv a(base), b(zero);
    a.reset(11);
    b.reset(11);
    SplitMix64 rng(3);
    for (int t = 0; t < 50; ++t) {
        std::vector<MuAction> mu;
        for (int k = 0; k < 4; ++k) {
            std::vector<double> v(base.mu_action_dim());
            for (auto& x : v) x = rng.uniform() * 4 - 2;
            mu.push_back(remap_mu_action(v, 2));
        }
        std::vector<std::vector<double>> u(2, std::vector<double>(base.uav_action_dim()));
        for (auto& row : u)
            for (auto& x : row) x = rng.uniform() * 4 - 2;
        const auto ua = remap_uav_actions(u, mu, base);
        CHECK(a.observe_mu(0) == b.observe_mu(0));
        CHECK(a.observe_uav(1, mu) == b.observe_uav(1, mu));
        const auto ra = a.step(mu, ua);
        const auto rb = b.step(mu, ua);
        CHECK(ra.mu_rewards == rb.mu_rewards);
        CHECK(ra.uav_rewards == rb.uav_rewards);
        CHECK(ra.objective == rb.objective);
    }
}
