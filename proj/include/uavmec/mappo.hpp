#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uavmec/checkpoint.hpp"
#include "uavmec/critic.hpp"
#include "uavmec/env.hpp"
#include "uavmec/policy.hpp"

namespace uavmec::mappo {

enum class Variant { ab_mappo, b_mappo, ag_mappo, random };

std::string to_string(Variant v);
/// Throws std::invalid_argument for unknown names.
Variant parse_variant(const std::string& name);

struct TrainConfig {
    std::int64_t total_steps = 80000;
    int episode_length = 300;
    int ppo_epochs = 5;
    int minibatches = 1;
    double actor_lr = 3e-4;
    double critic_lr = 3e-4;
    double clip_eps = 0.2;
    double gae_lambda = 0.95;
    double entropy_coef = 0.01;
    double max_grad_norm = 0.5;
    double gamma_mu = 0.8;
    double gamma_uav = 0.95;
    int hidden = 128;
    int feature_dim = 32;
    int heads = 4;

    int episodes() const {
        return static_cast<int>((total_steps + episode_length - 1) / episode_length);
    }
    void validate() const;
};

/// Per-type experience, rows ordered (slot, agent) with slots outermost.
struct GroupBuffer {
    std::size_t agents = 0;
    nn::Matrix obs;
    nn::Matrix raw;
    std::vector<double> log_prob;
    std::vector<double> rewards;
    std::vector<double> values;
    std::vector<double> advantages;
    std::vector<double> returns;

    std::size_t steps() const { return agents == 0 ? 0 : rewards.size() / agents; }
};

struct Rollout {
    GroupBuffer mu;
    GroupBuffer uav;
    nn::GlobalStates states;
    std::vector<StepReport> reports;
};

/// Shared actor and critic for one homogeneous agent type.
struct AgentGroup {
    nn::AgentType type = nn::AgentType::mu;
    std::size_t count = 0;
    nn::Actor actor;
    nn::CentralCritic critic;
    nn::Adam actor_opt;
    nn::Adam critic_opt;
    double gamma = 0.9;
};

AgentGroup make_group(nn::AgentType type, const EnvConfig& env, const TrainConfig& cfg, Variant variant,
                      nn::Rng& rng);

/// GAE with bootstrap value for the step after the last one.
struct GaeResult {
    std::vector<double> advantages;
    std::vector<double> returns;
};
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values, double bootstrap,
                      double gamma, double lambda);

/// Fills advantages/returns for every agent sequence of a buffer (bootstrap 0).
void compute_group_gae(GroupBuffer& buf, double gamma, double lambda);

struct ActorLossResult {
    double loss = 0.0;
    double surrogate = 0.0;
    double entropy = 0.0;
    double clip_fraction = 0.0;
};

/// Negated clipped surrogate minus the entropy bonus, averaged over rows.
ActorLossResult actor_loss(const nn::Actor& actor, const nn::Matrix& obs, const nn::Matrix& raw,
                           std::span<const double> old_log_prob, std::span<const double> advantages,
                           double clip_eps, double entropy_coef, nn::Grads* grads);

double critic_loss(const nn::CentralCritic& critic, const nn::GlobalStates& states,
                   const std::vector<double>& targets, nn::Grads* grads);

/// Rolls one episode. MUs act on their observations, the env remaps, the UAVs
/// act on theirs, then the env steps. With `groups` null the actions are
/// uniform random. Values are filled from the critics.
Rollout collect_episode(MecEnv& env, AgentGroup* mu, AgentGroup* uav, int length, nn::Rng& rng,
                        bool deterministic = false);

struct UpdateStats {
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    double entropy = 0.0;
    double clip_fraction = 0.0;
};

/// Normalizes advantages and runs the PPO epochs on one group.
UpdateStats update_group(AgentGroup& group, const GroupBuffer& buf, const nn::GlobalStates& states,
                         const TrainConfig& cfg, nn::Rng& rng);

struct EpisodeMetrics {
    int episode = 0;
    std::int64_t steps = 0;
    double mean_mu_reward = 0.0;   // episode return averaged over MUs
    double mean_uav_reward = 0.0;  // episode return averaged over UAVs
    double weighted_energy = 0.0;  // per-slot mean of the weighted objective
    double mu_energy = 0.0;        // per-slot mean of sum_k E_k
    double uav_energy = 0.0;       // per-slot mean of sum_m E_m
    double jain = 0.0;             // per-slot mean Jain index
    double penalty_latency = 0.0;
    double penalty_boundary = 0.0;
    double penalty_collision = 0.0;
    double penalty_distance = 0.0;
};

EpisodeMetrics summarize_episode(const Rollout& r, int episode, std::int64_t steps);

/// CTDE trainer holding both agent groups, their optimizers and the
/// sampling RNG. Episode e uses env seed derived from (seed, e).
class Trainer {
public:
    Trainer(EnvConfig env, TrainConfig cfg, Variant variant, std::uint64_t seed);

    /// Collects one episode and, unless the variant is random, updates.
    EpisodeMetrics run_episode();
    int episodes_done() const { return episode_; }
    std::int64_t steps_done() const { return steps_; }

    /// Greedy (distribution mean) episode with the current actors.
    Rollout evaluate(std::uint64_t env_seed);

    nn::Checkpoint checkpoint();
    /// Restores parameters, optimizer moments, RNG state and counters.
    void restore(const nn::Checkpoint& ckpt);

    AgentGroup& mu_group() { return mu_; }
    AgentGroup& uav_group() { return uav_; }
    MecEnv& env() { return env_; }
    Variant variant() const { return variant_; }
    const UpdateStats& last_mu_update() const { return mu_stats_; }
    const UpdateStats& last_uav_update() const { return uav_stats_; }

    static std::uint64_t episode_seed(std::uint64_t seed, int episode);

private:
    EnvConfig env_cfg_;
    TrainConfig cfg_;
    Variant variant_;
    std::uint64_t seed_;
    MecEnv env_;
    nn::Rng rng_;
    AgentGroup mu_;
    AgentGroup uav_;
    int episode_ = 0;
    std::int64_t steps_ = 0;
    UpdateStats mu_stats_;
    UpdateStats uav_stats_;
};

/// Stores/loads one group's actor and critic parameters and Adam moments.
void put_group(nn::Checkpoint& ckpt, const std::string& prefix, AgentGroup& group);
void load_group(const nn::Checkpoint& ckpt, const std::string& prefix, AgentGroup& group);

}  // namespace uavmec::mappo
