#pragma once

#include <span>
#include <vector>

#include "uavmec/nn.hpp"

namespace uavmec::nn {

enum class HeadKind { beta, gaussian };

/// Per-row policy outputs for a batch of observations. For the Beta head
/// `first`/`second` are alpha/beta; for the Gaussian head they are the mean
/// and the (broadcast) log-std.
struct PolicyEval {
    MlpCache cache;
    Matrix first;
    Matrix second;
    std::vector<double> log_prob;
    std::vector<double> entropy;
};

struct PolicySample {
    Matrix raw;         // what the log-probability refers to
    Matrix env_action;  // in [0, 1]; logistic-squashed for the Gaussian head
    std::vector<double> log_prob;
};

/// Stochastic actor: MLP trunk plus a Beta or diagonal Gaussian head.
class Actor {
public:
    Actor() = default;
    Actor(std::size_t obs_dim, std::size_t act_dim, std::size_t hidden, HeadKind kind);

    /// Orthogonal init; the output layer is scaled by 0.01 so the initial
    /// Beta heads sit near alpha = beta = 1 + ln 2.
    void init(Rng& rng);

    HeadKind kind() const { return kind_; }
    std::size_t obs_dim() const { return net_.in_dim(); }
    std::size_t act_dim() const { return act_dim_; }

    /// Samples actions, or takes the distribution mean when `deterministic`.
    PolicySample act(const Matrix& obs, Rng& rng, bool deterministic = false) const;

    PolicyEval evaluate(const Matrix& obs, const Matrix& raw) const;

    /// Gradients of sum_i (dlogp_i log_prob_i + dent_i entropy_i).
    Grads backward(const PolicyEval& eval, const Matrix& raw, std::span<const double> dlogp,
                   std::span<const double> dent) const;

    std::vector<Matrix*> parameters();
    std::vector<const Matrix*> parameters() const;

private:
    void head_params(const Matrix& out, Matrix& first, Matrix& second) const;

    MlpNet net_;
    Matrix log_std_;  // 1 x act_dim, Gaussian head only
    HeadKind kind_ = HeadKind::beta;
    std::size_t act_dim_ = 0;
};

}  // namespace uavmec::nn
