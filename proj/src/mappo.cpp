#include "uavmec/mappo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "uavmec/random.hpp"

namespace uavmec::mappo {

using nn::AgentType;
using nn::Matrix;

std::string to_string(Variant v) {
    switch (v) {
        case Variant::ab_mappo: return "ab-mappo";
        case Variant::b_mappo: return "b-mappo";
        case Variant::ag_mappo: return "ag-mappo";
        case Variant::random: return "random";
    }
    return "unknown";
}

Variant parse_variant(const std::string& name) {
    for (Variant v : {Variant::ab_mappo, Variant::b_mappo, Variant::ag_mappo, Variant::random})
        if (to_string(v) == name) return v;
    throw std::invalid_argument("unknown variant '" + name + "' (expected ab-mappo, b-mappo, ag-mappo, random)");
}

void TrainConfig::validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw ConfigError(std::string(field) + ": " + what);
    };
    require(total_steps >= 1, "total_steps", "must be >= 1");
    require(episode_length >= 1, "episode_length", "must be >= 1");
    require(ppo_epochs >= 1, "ppo_epochs", "must be >= 1");
    require(minibatches >= 1, "minibatches", "must be >= 1");
    require(actor_lr > 0.0, "actor_lr", "must be positive");
    require(critic_lr > 0.0, "critic_lr", "must be positive");
    require(clip_eps > 0.0 && clip_eps < 1.0, "clip_eps", "must be in (0, 1)");
    require(gae_lambda >= 0.0 && gae_lambda <= 1.0, "gae_lambda", "must be in [0, 1]");
    require(entropy_coef >= 0.0, "entropy_coef", "must be >= 0");
    require(max_grad_norm > 0.0, "max_grad_norm", "must be positive");
    require(gamma_mu >= 0.0 && gamma_mu <= 1.0, "gamma_mu", "must be in [0, 1]");
    require(gamma_uav >= 0.0 && gamma_uav <= 1.0, "gamma_uav", "must be in [0, 1]");
    require(hidden >= 1, "hidden", "must be >= 1");
    require(heads >= 1, "heads", "must be >= 1");
    require(feature_dim >= 1 && feature_dim % heads == 0, "feature_dim", "must be a positive multiple of heads");
}

AgentGroup make_group(AgentType type, const EnvConfig& env, const TrainConfig& cfg, Variant variant, nn::Rng& rng) {
    AgentGroup g;
    g.type = type;
    g.count = static_cast<std::size_t>(type == AgentType::mu ? env.num_mus : env.num_uavs);
    g.gamma = type == AgentType::mu ? cfg.gamma_mu : cfg.gamma_uav;
    const std::size_t obs_dim = static_cast<std::size_t>(type == AgentType::mu ? env.mu_obs_dim() : env.uav_obs_dim());
    const std::size_t act_dim =
        static_cast<std::size_t>(type == AgentType::mu ? env.mu_action_dim() : env.uav_action_dim());
    const nn::HeadKind head = variant == Variant::ag_mappo ? nn::HeadKind::gaussian : nn::HeadKind::beta;
    g.actor = nn::Actor(obs_dim, act_dim, static_cast<std::size_t>(cfg.hidden), head);
    g.actor.init(rng);

    nn::CriticShape shape;
    shape.num_mus = static_cast<std::size_t>(env.num_mus);
    shape.num_uavs = static_cast<std::size_t>(env.num_uavs);
    shape.mu_obs_dim = static_cast<std::size_t>(env.mu_obs_dim());
    shape.uav_obs_dim = static_cast<std::size_t>(env.uav_obs_dim());
    shape.hidden = static_cast<std::size_t>(cfg.hidden);
    shape.feature_dim = static_cast<std::size_t>(cfg.feature_dim);
    shape.heads = static_cast<std::size_t>(cfg.heads);
    shape.attention = variant != Variant::b_mappo && env.num_mus + env.num_uavs >= 2;
    g.critic = nn::CentralCritic(type, shape);
    g.critic.init(rng);

    g.actor_opt = nn::Adam(g.actor.parameters(), cfg.actor_lr);
    g.critic_opt = nn::Adam(g.critic.parameters(), cfg.critic_lr);
    return g;
}

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values, double bootstrap,
                      double gamma, double lambda) {
    if (rewards.size() != values.size()) throw std::invalid_argument("compute_gae: length mismatch");
    const std::size_t T = rewards.size();
    GaeResult r;
    r.advantages.assign(T, 0.0);
    r.returns.assign(T, 0.0);
    double acc = 0.0;
    for (std::size_t i = T; i-- > 0;) {
        const double next = i + 1 < T ? values[i + 1] : bootstrap;
        const double delta = rewards[i] + gamma * next - values[i];
        acc = delta + gamma * lambda * acc;
        r.advantages[i] = acc;
        r.returns[i] = acc + values[i];
    }
    return r;
}

void compute_group_gae(GroupBuffer& buf, double gamma, double lambda) {
    const std::size_t n = buf.agents;
    const std::size_t T = buf.steps();
    buf.advantages.assign(n * T, 0.0);
    buf.returns.assign(n * T, 0.0);
    std::vector<double> rew(T);
    std::vector<double> val(T);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < T; ++t) {
            rew[t] = buf.rewards[t * n + i];
            val[t] = buf.values[t * n + i];
        }
        const GaeResult g = compute_gae(rew, val, 0.0, gamma, lambda);
        for (std::size_t t = 0; t < T; ++t) {
            buf.advantages[t * n + i] = g.advantages[t];
            buf.returns[t * n + i] = g.returns[t];
        }
    }
}

ActorLossResult actor_loss(const nn::Actor& actor, const Matrix& obs, const Matrix& raw,
                           std::span<const double> old_log_prob, std::span<const double> advantages,
                           double clip_eps, double entropy_coef, nn::Grads* grads) {
    const nn::PolicyEval eval = actor.evaluate(obs, raw);
    const std::size_t n = obs.rows();
    const double inv_n = 1.0 / static_cast<double>(n);
    ActorLossResult res;
    std::vector<double> dlogp(n, 0.0);
    std::vector<double> dent(n, -entropy_coef * inv_n);
    std::size_t clipped = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ratio = std::exp(eval.log_prob[i] - old_log_prob[i]);
        const double adv = advantages[i];
        const double clipped_ratio = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
        const double unclipped_obj = ratio * adv;
        const double clipped_obj = clipped_ratio * adv;
        const bool clip_active = clipped_obj < unclipped_obj;
        if (clip_active) ++clipped;
        res.surrogate += (clip_active ? clipped_obj : unclipped_obj) * inv_n;
        res.entropy += eval.entropy[i] * inv_n;
        // d(-surrogate)/d logp; the clipped branch is constant in the parameters.
        if (!clip_active) dlogp[i] = -adv * ratio * inv_n;
    }
    res.loss = -res.surrogate - entropy_coef * res.entropy;
    res.clip_fraction = static_cast<double>(clipped) * inv_n;
    if (grads) *grads = actor.backward(eval, raw, dlogp, dent);
    return res;
}

double critic_loss(const nn::CentralCritic& critic, const nn::GlobalStates& states,
                   const std::vector<double>& targets, nn::Grads* grads) {
    return critic.loss(states, targets, grads);
}

namespace {

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    return m;
}

void append_rows(std::vector<double>& dst, const Matrix& m) {
    dst.insert(dst.end(), m.values().begin(), m.values().end());
}

nn::PolicySample random_actions(std::size_t n, std::size_t dim, nn::Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    nn::PolicySample s;
    s.raw = Matrix(n, dim);
    for (double& v : s.raw.values()) v = u(rng);
    s.env_action = s.raw;
    s.log_prob.assign(n, 0.0);
    return s;
}

std::vector<std::size_t> select_rows(const std::vector<std::size_t>& steps, std::size_t per_step) {
    std::vector<std::size_t> rows;
    rows.reserve(steps.size() * per_step);
    for (std::size_t t : steps)
        for (std::size_t i = 0; i < per_step; ++i) rows.push_back(t * per_step + i);
    return rows;
}

Matrix gather(const Matrix& m, const std::vector<std::size_t>& rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) std::copy(m.row(rows[i]).begin(), m.row(rows[i]).end(), out.row(i).begin());
    return out;
}

std::vector<double> gather(const std::vector<double>& v, const std::vector<std::size_t>& rows) {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = v[rows[i]];
    return out;
}

}  // namespace

Rollout collect_episode(MecEnv& env, AgentGroup* mu, AgentGroup* uav, int length, nn::Rng& rng, bool deterministic) {
    const EnvConfig& cfg = env.config();
    const std::size_t K = static_cast<std::size_t>(cfg.num_mus);
    const std::size_t M = static_cast<std::size_t>(cfg.num_uavs);
    const bool learned = mu != nullptr && uav != nullptr;

    Rollout r;
    r.mu.agents = K;
    r.uav.agents = M;
    r.states.num_mus = K;
    r.states.num_uavs = M;
    std::vector<double> mu_obs, mu_raw, uav_obs, uav_raw, mu_state, uav_state;

    for (int t = 0; t < length; ++t) {
        std::vector<std::vector<double>> obs_rows(K);
        std::vector<std::vector<double>> clean_rows(K);
        for (std::size_t k = 0; k < K; ++k) {
            obs_rows[k] = env.observe_mu(static_cast<int>(k), true);
            clean_rows[k] = env.observe_mu(static_cast<int>(k), false);
        }
        const Matrix obs_m = rows_to_matrix(obs_rows);
        const nn::PolicySample mu_act = learned ? mu->actor.act(obs_m, rng, deterministic)
                                                : random_actions(K, static_cast<std::size_t>(cfg.mu_action_dim()), rng);
        std::vector<MuAction> mu_actions(K);
        for (std::size_t k = 0; k < K; ++k) mu_actions[k] = remap_mu_action(mu_act.env_action.row(k), cfg.num_uavs);

        std::vector<std::vector<double>> uobs_rows(M);
        std::vector<std::vector<double>> uclean_rows(M);
        for (std::size_t m = 0; m < M; ++m) {
            uobs_rows[m] = env.observe_uav(static_cast<int>(m), mu_actions, true);
            uclean_rows[m] = env.observe_uav(static_cast<int>(m), mu_actions, false);
        }
        const Matrix uobs_m = rows_to_matrix(uobs_rows);
        const nn::PolicySample uav_act =
            learned ? uav->actor.act(uobs_m, rng, deterministic)
                    : random_actions(M, static_cast<std::size_t>(cfg.uav_action_dim()), rng);
        std::vector<std::vector<double>> uav_env_raw(M);
        for (std::size_t m = 0; m < M; ++m) {
            const auto row = uav_act.env_action.row(m);
            uav_env_raw[m].assign(row.begin(), row.end());
        }
        const std::vector<UavAction> uav_actions = remap_uav_actions(uav_env_raw, mu_actions, cfg);

        StepReport rep = env.step(mu_actions, uav_actions);

        append_rows(mu_obs, obs_m);
        append_rows(mu_raw, mu_act.raw);
        append_rows(uav_obs, uobs_m);
        append_rows(uav_raw, uav_act.raw);
        for (const auto& row : clean_rows) mu_state.insert(mu_state.end(), row.begin(), row.end());
        for (const auto& row : uclean_rows) uav_state.insert(uav_state.end(), row.begin(), row.end());
        r.mu.log_prob.insert(r.mu.log_prob.end(), mu_act.log_prob.begin(), mu_act.log_prob.end());
        r.uav.log_prob.insert(r.uav.log_prob.end(), uav_act.log_prob.begin(), uav_act.log_prob.end());
        r.mu.rewards.insert(r.mu.rewards.end(), rep.mu_rewards.begin(), rep.mu_rewards.end());
        r.uav.rewards.insert(r.uav.rewards.end(), rep.uav_rewards.begin(), rep.uav_rewards.end());
        r.reports.push_back(std::move(rep));
    }

    const std::size_t T = static_cast<std::size_t>(length);
    const std::size_t dmu = static_cast<std::size_t>(cfg.mu_obs_dim());
    const std::size_t duav = static_cast<std::size_t>(cfg.uav_obs_dim());
    r.mu.obs = Matrix(T * K, dmu, std::move(mu_obs));
    r.mu.raw = Matrix(T * K, static_cast<std::size_t>(cfg.mu_action_dim()), std::move(mu_raw));
    r.uav.obs = Matrix(T * M, duav, std::move(uav_obs));
    r.uav.raw = Matrix(T * M, static_cast<std::size_t>(cfg.uav_action_dim()), std::move(uav_raw));
    r.states.mu_obs = Matrix(T * K, dmu, std::move(mu_state));
    r.states.uav_obs = Matrix(T * M, duav, std::move(uav_state));
    if (learned) {
        r.mu.values = mu->critic.values(r.states);
        r.uav.values = uav->critic.values(r.states);
    } else {
        r.mu.values.assign(T * K, 0.0);
        r.uav.values.assign(T * M, 0.0);
    }
    return r;
}

UpdateStats update_group(AgentGroup& group, const GroupBuffer& buf, const nn::GlobalStates& states,
                         const TrainConfig& cfg, nn::Rng& rng) {
    const std::size_t n = buf.agents;
    const std::size_t T = buf.steps();
    std::vector<double> adv = buf.advantages;
    const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(adv.size());
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / static_cast<double>(adv.size()));
    for (double& a : adv) a = (a - mean) / (sd + 1e-8);

    const std::size_t batches = std::min<std::size_t>(static_cast<std::size_t>(cfg.minibatches), T);
    UpdateStats stats;
    int updates = 0;
    std::vector<std::size_t> order(T);
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < cfg.ppo_epochs; ++epoch) {
        if (batches > 1) std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t b = 0; b < batches; ++b) {
            const std::size_t lo = b * T / batches;
            const std::size_t hi = (b + 1) * T / batches;
            const bool full = batches == 1;
            std::vector<std::size_t> steps(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                           order.begin() + static_cast<std::ptrdiff_t>(hi));
            const auto rows = select_rows(steps, n);

            const Matrix obs = full ? buf.obs : gather(buf.obs, rows);
            const Matrix raw = full ? buf.raw : gather(buf.raw, rows);
            const std::vector<double> old_lp = full ? buf.log_prob : gather(buf.log_prob, rows);
            const std::vector<double> a = full ? adv : gather(adv, rows);
            nn::Grads ag;
            const auto ar = actor_loss(group.actor, obs, raw, old_lp, a, cfg.clip_eps, cfg.entropy_coef, &ag);
            nn::clip_grad_norm(ag, cfg.max_grad_norm);
            group.actor_opt.step(group.actor.parameters(), ag);

            nn::GlobalStates sub;
            if (full) {
                sub = states;
            } else {
                sub.num_mus = states.num_mus;
                sub.num_uavs = states.num_uavs;
                sub.mu_obs = gather(states.mu_obs, select_rows(steps, states.num_mus));
                sub.uav_obs = gather(states.uav_obs, select_rows(steps, states.num_uavs));
            }
            const std::vector<double> targets = full ? buf.returns : gather(buf.returns, rows);
            nn::Grads cg;
            const double cl = critic_loss(group.critic, sub, targets, &cg);
            nn::clip_grad_norm(cg, cfg.max_grad_norm);
            group.critic_opt.step(group.critic.parameters(), cg);

            stats.actor_loss += ar.loss;
            stats.critic_loss += cl;
            stats.entropy += ar.entropy;
            stats.clip_fraction += ar.clip_fraction;
            ++updates;
        }
    }
    if (updates > 0) {
        stats.actor_loss /= updates;
        stats.critic_loss /= updates;
        stats.entropy /= updates;
        stats.clip_fraction /= updates;
    }
    return stats;
}

EpisodeMetrics summarize_episode(const Rollout& r, int episode, std::int64_t steps) {
    EpisodeMetrics m;
    m.episode = episode;
    m.steps = steps;
    const double T = static_cast<double>(r.reports.size());
    if (r.reports.empty()) return m;
    const double K = static_cast<double>(r.mu.agents);
    const double M = static_cast<double>(r.uav.agents);
    for (const auto& rep : r.reports) {
        for (double v : rep.mu_rewards) m.mean_mu_reward += v / K;
        for (double v : rep.uav_rewards) m.mean_uav_reward += v / M;
        m.weighted_energy += rep.objective / T;
        m.mu_energy += std::accumulate(rep.mu_energy.begin(), rep.mu_energy.end(), 0.0) / T;
        m.uav_energy += std::accumulate(rep.uav_energy.begin(), rep.uav_energy.end(), 0.0) / T;
        m.jain += rep.jain / T;
        m.penalty_latency += std::accumulate(rep.penalty_latency.begin(), rep.penalty_latency.end(), 0.0) / T;
        m.penalty_boundary += std::accumulate(rep.penalty_boundary.begin(), rep.penalty_boundary.end(), 0.0) / T;
        m.penalty_collision += std::accumulate(rep.penalty_collision.begin(), rep.penalty_collision.end(), 0.0) / T;
        m.penalty_distance += std::accumulate(rep.penalty_distance.begin(), rep.penalty_distance.end(), 0.0) / T;
    }
    return m;
}

std::uint64_t Trainer::episode_seed(std::uint64_t seed, int episode) {
    return keyed_stream(seed, {0xe915'0de5ULL, static_cast<std::uint64_t>(episode)})();
}

Trainer::Trainer(EnvConfig env, TrainConfig cfg, Variant variant, std::uint64_t seed)
    : env_cfg_(std::move(env)), cfg_(cfg), variant_(variant), seed_(seed), env_(env_cfg_), rng_(seed) {
    cfg_.validate();
    mu_ = make_group(AgentType::mu, env_cfg_, cfg_, variant_, rng_);
    uav_ = make_group(AgentType::uav, env_cfg_, cfg_, variant_, rng_);
}

EpisodeMetrics Trainer::run_episode() {
    env_.reset(episode_seed(seed_, episode_));
    const bool learned = variant_ != Variant::random;
    Rollout r = collect_episode(env_, learned ? &mu_ : nullptr, learned ? &uav_ : nullptr, cfg_.episode_length, rng_);
    steps_ += cfg_.episode_length;
    if (learned) {
        compute_group_gae(r.mu, mu_.gamma, cfg_.gae_lambda);
        compute_group_gae(r.uav, uav_.gamma, cfg_.gae_lambda);
        mu_stats_ = update_group(mu_, r.mu, r.states, cfg_, rng_);
        uav_stats_ = update_group(uav_, r.uav, r.states, cfg_, rng_);
    }
    EpisodeMetrics m = summarize_episode(r, episode_, steps_);
    ++episode_;
    return m;
}

Rollout Trainer::evaluate(std::uint64_t env_seed) {
    env_.reset(env_seed);
    const bool learned = variant_ != Variant::random;
    nn::Rng eval_rng(env_seed);
    return collect_episode(env_, learned ? &mu_ : nullptr, learned ? &uav_ : nullptr, cfg_.episode_length, eval_rng,
                           true);
}

void put_group(nn::Checkpoint& ckpt, const std::string& prefix, AgentGroup& group) {
    auto put_all = [&](const std::string& name, const std::vector<Matrix*>& params) {
        for (std::size_t i = 0; i < params.size(); ++i) ckpt.put(prefix + "." + name + "." + std::to_string(i), *params[i]);
    };
    auto put_moments = [&](const std::string& name, nn::Adam& opt) {
        for (std::size_t i = 0; i < opt.first_moments().size(); ++i) {
            ckpt.put(prefix + "." + name + ".m." + std::to_string(i), opt.first_moments()[i]);
            ckpt.put(prefix + "." + name + ".v." + std::to_string(i), opt.second_moments()[i]);
        }
        ckpt.put_meta(prefix + "." + name + ".steps", std::to_string(opt.steps()));
    };
    put_all("actor", group.actor.parameters());
    put_all("critic", group.critic.parameters());
    put_moments("actor_opt", group.actor_opt);
    put_moments("critic_opt", group.critic_opt);
}

void load_group(const nn::Checkpoint& ckpt, const std::string& prefix, AgentGroup& group) {
    auto load_all = [&](const std::string& name, const std::vector<Matrix*>& params) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            const Matrix& m = ckpt.tensor(prefix + "." + name + "." + std::to_string(i));
            if (!m.same_shape(*params[i])) throw std::runtime_error("checkpoint shape mismatch for " + prefix + "." + name);
            *params[i] = m;
        }
    };
    auto load_moments = [&](const std::string& name, nn::Adam& opt) {
        for (std::size_t i = 0; i < opt.first_moments().size(); ++i) {
            opt.first_moments()[i] = ckpt.tensor(prefix + "." + name + ".m." + std::to_string(i));
            opt.second_moments()[i] = ckpt.tensor(prefix + "." + name + ".v." + std::to_string(i));
        }
        opt.set_steps(std::stoll(ckpt.meta_value(prefix + "." + name + ".steps")));
    };
    load_all("actor", group.actor.parameters());
    load_all("critic", group.critic.parameters());
    load_moments("actor_opt", group.actor_opt);
    load_moments("critic_opt", group.critic_opt);
}

nn::Checkpoint Trainer::checkpoint() {
    nn::Checkpoint ckpt;
    ckpt.put_meta("variant", to_string(variant_));
    ckpt.put_meta("seed", std::to_string(seed_));
    ckpt.put_meta("episode", std::to_string(episode_));
    ckpt.put_meta("steps", std::to_string(steps_));
    std::ostringstream rng_state;
    rng_state << rng_;
    ckpt.put_meta("rng", rng_state.str());
    put_group(ckpt, "mu", mu_);
    put_group(ckpt, "uav", uav_);
    return ckpt;
}

void Trainer::restore(const nn::Checkpoint& ckpt) {
    if (ckpt.meta_value("variant") != to_string(variant_))
        throw std::runtime_error("checkpoint variant " + ckpt.meta_value("variant") + " does not match " +
                                 to_string(variant_));
    seed_ = std::stoull(ckpt.meta_value("seed"));
    episode_ = std::stoi(ckpt.meta_value("episode"));
    steps_ = std::stoll(ckpt.meta_value("steps"));
    std::istringstream rng_state(ckpt.meta_value("rng"));
    rng_state >> rng_;
    load_group(ckpt, "mu", mu_);
    load_group(ckpt, "uav", uav_);
}

}  // namespace uavmec::mappo
