#include "uavmec/validate.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "uavmec/distributions.hpp"
#include "uavmec/mappo.hpp"
#include "uavmec/random.hpp"

namespace uavmec::validate {

void Report::expect(bool ok, const std::string& what, std::ostream* log) {
    ++checks;
    if (!ok) failures.push_back(what);
    if (log) *log << (ok ? "ok   " : "FAIL ") << what << '\n';
}

std::size_t constraint_violations(const EnvConfig& cfg, const std::vector<MuAction>& mu,
                                  const std::vector<UavAction>& uav) {
    const int K = cfg.num_mus;
    const int M = cfg.num_uavs;
    std::size_t bad = 0;
    double total_bw = 0.0;
    for (int k = 0; k < K; ++k) {
        const MuAction& a = mu[k];
        bad += a.assoc < 0 || a.assoc > M;                              // exactly one choice
        bad += (a.rho > 0.0) != (a.assoc != 0);                          // ceil(rho) = 1 - alpha_0
        bad += !(a.rho >= 0.0 && a.rho <= 1.0);
        bad += a.relay_to_bs && a.assoc == 0;                            // relay needs a carrier UAV
    }
    for (int m = 0; m < M; ++m) {
        const UavAction& u = uav[m];
        double bw = 0.0;
        double fr = 0.0;
        for (int k = 0; k < K; ++k) {
            const bool served = mu[k].assoc == m + 1;
            bad += (u.bandwidth[k] > 0.0) != served;
            bad += (u.freq[k] > 0.0) != (served && !mu[k].relay_to_bs);
            bad += u.bandwidth[k] < 0.0 || u.freq[k] < 0.0;
            bw += u.bandwidth[k];
            fr += u.freq[k];
        }
        total_bw += bw;
        bad += fr > cfg.f_max_edge * (1.0 + 1e-12);  // summation order differs from the remap
        bad += u.accel.norm() > cfg.a_max * (1.0 + 1e-12);
    }
    bad += total_bw > cfg.channel.bandwidth * (1.0 + 1e-12);
    return bad;
}

namespace {

EnvConfig small_env() {
    EnvConfig e;
    e.num_mus = 3;
    e.num_uavs = 2;
    e.width = 500.0;
    return e;
}

void physics_checks(Report& r, std::ostream* log) {
    tasking::UavPowerParams pp;
    r.expect(std::abs(tasking::propulsion_energy(0.0, pp, 1.0) - 118.11) < 1e-9, "hover energy is P0 + Pi", log);
    bool anchor = true;
    for (double b : {0.1, 0.5, 2.0}) anchor &= std::abs(physics::los_probability(15.0, 15.0, b) - 0.0625) < 1e-12;
    r.expect(anchor, "LoS probability at theta = a is 1/16", log);

    SplitMix64 rng(7);
    tasking::TaskRanges ranges;
    bool dvfs = true;
    bool gap = true;
    for (int i = 0; i < 1000; ++i) {
        const tasking::TaskSpec t = tasking::generate_task(rng, ranges, 1.0);
        const double f_max = 2e8 + rng.uniform() * 2e9;
        const double f = tasking::required_local_frequency(t, 0.0, 1.0, f_max);
        const auto res = tasking::local_compute(t, 0.0, f, 0.0, 1e-27);
        if (t.cycles() <= f_max) dvfs &= std::abs(res.time - 1.0) < 1e-9;
        else dvfs &= res.time > 1.0;
        const double y = t.cycles();
        const double fe = 1e8 + rng.uniform() * 1e10;
        const double fd = (rng.uniform() - 0.5) * fe;
        gap &= std::abs((y / fe + tasking::latency_gap(y, fe, fd)) - y / (fe + fd)) <= 1e-12 * (y / (fe + fd));
    }
    r.expect(dvfs, "DVFS meets the slot exactly when feasible", log);
    r.expect(gap, "latency gap closes the estimated time", log);
}

void gae_checks(Report& r, std::ostream* log) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    bool ok = true;
    for (int n = 0; n < 100; ++n) {
        const int T = 10;
        std::vector<double> rew(T), val(T);
        for (auto& v : rew) v = u(rng);
        for (auto& v : val) v = u(rng);
        const double g = 0.5 + 0.5 * (u(rng) + 1.0) / 2.0;
        const double l = (u(rng) + 1.0) / 2.0;
        const auto res = mappo::compute_gae(rew, val, 0.0, g, l);
        for (int t = 0; t < T; ++t) {
            double adv = 0.0;
            for (int j = t; j < T; ++j) {
                const double next = j + 1 < T ? val[j + 1] : 0.0;
                adv += std::pow(g * l, j - t) * (rew[j] + g * next - val[j]);
            }
            ok &= std::abs(adv - res.advantages[t]) < 1e-12;
        }
    }
    r.expect(ok, "GAE equals the brute-force double sum", log);
}

void beta_checks(Report& r, std::ostream* log) {
    bool ok = true;
    for (double a : {1.0, 1.5, 2.0, 4.0, 8.0})
        for (double b : {1.0, 1.5, 2.0, 4.0, 8.0}) {
            const int n = 20000;  // Simpson on [0, 1]; the density is bounded for a, b >= 1
            double s = 0.0;
            for (int i = 0; i <= n; ++i) {
                const double x = static_cast<double>(i) / n;
                const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
                const double lx = a == 1.0 ? 0.0 : (a - 1) * std::log(x);
                const double l1x = b == 1.0 ? 0.0 : (b - 1) * std::log1p(-x);
                const double f =
                    std::exp(lx + l1x - (nn::log_gamma(a) + nn::log_gamma(b) - nn::log_gamma(a + b)));
                s += w * f;
            }
            ok &= std::abs(s / (3.0 * n) - 1.0) < 1e-6;
        }
    r.expect(ok, "Beta density integrates to one", log);
}

void remap_checks(Report& r, std::ostream* log) {
    EnvConfig cfg = small_env();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> raw(-4.0, 4.0);
    std::size_t bad = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<MuAction> mu;
        for (int k = 0; k < cfg.num_mus; ++k) {
            std::vector<double> v(cfg.mu_action_dim());
            for (auto& x : v) x = raw(rng);
            mu.push_back(remap_mu_action(v, cfg.num_uavs));
        }
        std::vector<std::vector<double>> uraw(cfg.num_uavs, std::vector<double>(cfg.uav_action_dim()));
        for (auto& v : uraw)
            for (auto& x : v) x = raw(rng);
        bad += constraint_violations(cfg, mu, remap_uav_actions(uraw, mu, cfg));
    }
    r.expect(bad == 0, "remapped actions satisfy every decision constraint", log);
}

void kinematics_checks(Report& r, std::ostream* log) {
    EnvConfig cfg = small_env();
    MecEnv env(cfg);
    env.reset(5);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> raw(-6.0, 6.0);
    bool ok = true;
    for (int t = 0; t < 300; ++t) {
        std::vector<MuAction> mu;
        for (int k = 0; k < cfg.num_mus; ++k) {
            std::vector<double> v(cfg.mu_action_dim());
            for (auto& x : v) x = raw(rng);
            mu.push_back(remap_mu_action(v, cfg.num_uavs));
        }
        std::vector<std::vector<double>> uraw(cfg.num_uavs, std::vector<double>(cfg.uav_action_dim()));
        for (auto& v : uraw)
            for (auto& x : v) x = raw(rng);
        env.step(mu, remap_uav_actions(uraw, mu, cfg));
        for (const auto& u : env.state().uavs) {
            ok &= u.velocity.norm() <= cfg.v_max + 1e-9;
            ok &= u.position.x >= 0.0 && u.position.x <= cfg.width && u.position.y >= 0.0 && u.position.y <= cfg.width;
        }
        for (const auto& m : env.state().mus)
            ok &= m.kin.position.x >= 0.0 && m.kin.position.x <= cfg.width && m.kin.position.y >= 0.0 &&
                  m.kin.position.y <= cfg.width;
    }
    r.expect(ok, "speeds and positions stay in bounds", log);
}

void gradient_checks(Report& r, std::ostream* log) {
    nn::Rng rng(21);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (nn::HeadKind kind : {nn::HeadKind::beta, nn::HeadKind::gaussian}) {
        nn::Actor actor(4, 3, 8, kind);
        actor.init(rng);
        // Larger output weights so the check is not dominated by the init scale.
        for (nn::Matrix* p : actor.parameters())
            for (std::size_t i = 0; i < p->size(); ++i) p->data()[i] += 0.3 * nd(rng);
        nn::Matrix obs(6, 4);
        for (std::size_t i = 0; i < obs.size(); ++i) obs.data()[i] = nd(rng);
        const nn::PolicySample s = actor.act(obs, rng);
        std::vector<double> old(s.log_prob.size()), adv(s.log_prob.size());
        for (std::size_t i = 0; i < old.size(); ++i) {
            old[i] = s.log_prob[i] + 0.05 * nd(rng);
            adv[i] = nd(rng);
        }
        nn::Grads g;
        mappo::actor_loss(actor, obs, s.raw, old, adv, 0.2, 0.01, &g);
        const auto rep = nn::grad_check(
            [&] { return mappo::actor_loss(actor, obs, s.raw, old, adv, 0.2, 0.01, nullptr).loss; },
            actor.parameters(), g);
        r.expect(rep.max_rel_error < 1e-4,
                 std::string("actor loss gradient (") + (kind == nn::HeadKind::beta ? "beta" : "gaussian") + ")", log);
    }

    nn::CriticShape shape;
    shape.num_mus = 3;
    shape.num_uavs = 2;
    shape.mu_obs_dim = 5;
    shape.uav_obs_dim = 7;
    shape.hidden = 8;
    shape.feature_dim = 8;
    shape.heads = 4;
    nn::CentralCritic critic(nn::AgentType::uav, shape);
    critic.init(rng);
    nn::GlobalStates st;
    st.num_mus = 3;
    st.num_uavs = 2;
    st.mu_obs = nn::Matrix(2 * 3, 5);
    st.uav_obs = nn::Matrix(2 * 2, 7);
    for (std::size_t i = 0; i < st.mu_obs.size(); ++i) st.mu_obs.data()[i] = nd(rng);
    for (std::size_t i = 0; i < st.uav_obs.size(); ++i) st.uav_obs.data()[i] = nd(rng);
    std::vector<double> targets(4);
    for (auto& t : targets) t = nd(rng);
    nn::Grads g;
    critic.loss(st, targets, &g);
    const auto rep = nn::grad_check([&] { return critic.loss(st, targets, nullptr); }, critic.parameters(), g);
    r.expect(rep.max_rel_error < 1e-4, "attention critic loss gradient", log);
}

void determinism_checks(Report& r, std::ostream* log) {
    EnvConfig cfg = small_env();
    mappo::TrainConfig tc;
    tc.episode_length = 8;
    tc.total_steps = 16;
    tc.hidden = 16;
    tc.feature_dim = 8;
    auto trace = [&] {
        mappo::Trainer t(cfg, tc, mappo::Variant::ab_mappo, 4);
        std::ostringstream os;
        os.precision(17);
        for (int e = 0; e < tc.episodes(); ++e) {
            const auto m = t.run_episode();
            os << m.mean_mu_reward << ' ' << m.mean_uav_reward << ' ' << m.weighted_energy << ' ' << m.jain << '\n';
        }
        return os.str();
    };
    r.expect(trace() == trace(), "identical seeds give identical training", log);
}

}  // namespace

Report run_invariant_suite(std::ostream* log) {
    Report r;
    physics_checks(r, log);
    gae_checks(r, log);
    beta_checks(r, log);
    remap_checks(r, log);
    kinematics_checks(r, log);
    gradient_checks(r, log);
    determinism_checks(r, log);
    return r;
}

}  // namespace uavmec::validate
