#pragma once

#include <vector>

#include "uavmec/nn.hpp"

namespace uavmec::nn {

enum class AgentType { mu, uav };

/// A batch of global states: every agent's observation, states outermost.
struct GlobalStates {
    Matrix mu_obs;   // (S * K) x d_mu
    Matrix uav_obs;  // (S * M) x d_uav
    std::size_t num_mus = 0;
    std::size_t num_uavs = 0;

    std::size_t num_states() const { return num_mus == 0 ? 0 : mu_obs.rows() / num_mus; }
};

struct CriticShape {
    std::size_t num_mus = 0;
    std::size_t num_uavs = 0;
    std::size_t mu_obs_dim = 0;
    std::size_t uav_obs_dim = 0;
    std::size_t hidden = 128;
    std::size_t feature_dim = 32;
    std::size_t heads = 4;
    bool attention = true;
};

/// Centralized value function for one agent type. With attention, each
/// type's observations pass through their own feature MLP, the features
/// are mixed across agents by multi-head attention and the head MLP maps
/// (attention output, own observation) to a value. Without attention the
/// head sees the flat global state next to the own observation.
class CentralCritic {
public:
    CentralCritic() = default;
    CentralCritic(AgentType owner, const CriticShape& shape);

    void init(Rng& rng);

    AgentType owner() const { return owner_; }
    const CriticShape& shape() const { return shape_; }
    std::size_t agents_per_state() const { return owner_ == AgentType::mu ? shape_.num_mus : shape_.num_uavs; }

    /// One value per (state, owned agent), states outermost.
    std::vector<double> values(const GlobalStates& s) const;

    /// Mean of 0.5 (V - target)^2 and its gradients.
    double loss(const GlobalStates& s, const std::vector<double>& targets, Grads* grads) const;

    std::vector<Matrix*> parameters();
    std::vector<const Matrix*> parameters() const;

private:
    struct Cache {
        MlpCache mu_feat;
        MlpCache uav_feat;
        AttentionCache attn;
        MlpCache head;
    };

    Matrix head_input(const GlobalStates& s, Cache* cache) const;
    const Matrix& own_obs(const GlobalStates& s) const;

    AgentType owner_ = AgentType::mu;
    CriticShape shape_;
    MlpNet mu_features_;
    MlpNet uav_features_;
    AttentionBlock attention_;
    MlpNet head_;
};

}  // namespace uavmec::nn
